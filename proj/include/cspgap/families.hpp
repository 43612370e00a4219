#pragma once
// Standard predicate families and instance builders used by the CLI, the
// empirical threshold search and the tests.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cspgap/csp.hpp"

namespace cspgap::families {

/// Predicate whose table is produced by evaluating fn on every tuple.
template <class Fn>
Predicate tabulate(std::string name, int q, int k, Fn&& fn) {
  const std::size_t count = *checked_pow(static_cast<std::uint64_t>(q), static_cast<std::uint64_t>(k));
  Predicate p{std::move(name), std::vector<std::uint8_t>(count)};
  for (std::size_t t = 0; t < count; ++t) p.table[t] = fn(decode_tuple(t, q, k)) ? 1 : 0;
  return p;
}

/// f_Cut(b1, b2) = [b1 != b2], q = k = 2.
inline FamilyPtr cut() {
  return std::make_shared<const PredicateFamily>(
      2, 2, std::vector{tabulate("cut", 2, 2, [](const std::vector<int>& a) { return a[0] != a[1]; })});
}

/// f_DiCut(b1, b2) = [b1 = 1 and b2 = 0], q = k = 2.
inline FamilyPtr dicut() {
  return std::make_shared<const PredicateFamily>(
      2, 2, std::vector{tabulate("dicut", 2, 2, [](const std::vector<int>& a) { return a[0] == 1 && a[1] == 0; })});
}

inline FamilyPtr constant_one(int q = 2, int k = 2) {
  return std::make_shared<const PredicateFamily>(
      q, k, std::vector{tabulate("one", q, k, [](const std::vector<int>&) { return true; })});
}

inline FamilyPtr constant_zero(int q = 2, int k = 2) {
  return std::make_shared<const PredicateFamily>(
      q, k, std::vector{tabulate("zero", q, k, [](const std::vector<int>&) { return false; })});
}

}  // namespace cspgap::families

namespace cspgap::builders {

/// Single-predicate cycle 1 -> 2 -> ... -> n -> 1 (k = 2), unit weights.
inline Instance cycle(FamilyPtr fam, int n, std::size_t predicate = 0) {
  std::vector<Constraint> cs;
  for (int i = 0; i < n; ++i) cs.push_back({predicate, {i, (i + 1) % n}, 1});
  return Instance(std::move(fam), n, std::move(cs));
}

/// Every predicate of the family (or only `only`) on every ordered tuple of
/// distinct variables.
inline Instance complete(FamilyPtr fam, int n, std::optional<std::size_t> only = std::nullopt) {
  const int k = fam->k();
  std::vector<Constraint> cs;
  std::vector<int> t(static_cast<std::size_t>(k), 0);
  const auto total = *checked_pow(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t rest = idx;
    for (int l = k - 1; l >= 0; --l) {
      t[static_cast<std::size_t>(l)] = static_cast<int>(rest % static_cast<std::uint64_t>(n));
      rest /= static_cast<std::uint64_t>(n);
    }
    bool distinct = true;
    for (int a = 0; a < k && distinct; ++a)
      for (int b = 0; b < a; ++b)
        if (t[static_cast<std::size_t>(a)] == t[static_cast<std::size_t>(b)]) distinct = false;
    if (!distinct) continue;
    for (std::size_t f = 0; f < fam->size(); ++f)
      if (!only || *only == f) cs.push_back({f, t, 1});
  }
  return Instance(std::move(fam), n, std::move(cs));
}

}  // namespace cspgap::builders
