#pragma once
// Width of predicates over the additive group Z_q: the best fraction of the
// diagonal shifts b + (a, ..., a) of a base point that satisfy f.

#include <vector>

#include "cspgap/csp.hpp"

namespace cspgap {

/// b + (a, ..., a) over Z_q.
inline std::vector<int> shift(std::span<const int> base, int a, int q) {
  std::vector<int> out(base.begin(), base.end());
  for (auto& v : out) v = (v + a) % q;
  return out;
}

/// omega_b(f) = |{a in Z_q : f(b + a^k) = 1}| / q.
inline Rational shift_width(const Predicate& f, std::span<const int> base, int q) {
  long hits = 0;
  for (int a = 0; a < q; ++a) {
    auto t = shift(base, a, q);
    if (f(encode_tuple(t, q))) ++hits;
  }
  return Rational(Integer(hits), Integer(q));
}

struct PredicateWidth {
  Rational width;         // omega(f)
  std::vector<int> base;  // lexicographically smallest maximizer b_f
};

inline PredicateWidth predicate_width(const Predicate& f, int q, int k) {
  const std::size_t count = f.table.size();
  PredicateWidth best{Rational(-1), {}};
  for (std::size_t t = 0; t < count; ++t) {
    auto b = decode_tuple(t, q, k);
    Rational w = shift_width(f, b, q);
    if (w > best.width) best = {w, std::move(b)};
  }
  return best;
}

struct FamilyWidth {
  Rational value;  // omega(F) = min over predicates
  std::vector<PredicateWidth> per_predicate;
};

inline FamilyWidth width(const PredicateFamily& fam) {
  FamilyWidth out;
  for (const auto& f : fam.predicates()) {
    out.per_predicate.push_back(predicate_width(f, fam.q(), fam.k()));
    if (out.per_predicate.size() == 1 || out.per_predicate.back().width < out.value)
      out.value = out.per_predicate.back().width;
  }
  return out;
}

}  // namespace cspgap
