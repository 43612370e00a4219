#pragma once
// Brackets for the trivial approximability threshold rho(F).
//
// Lower side: the best i.i.d. product assignment,
//   max_{P in Delta([q])} min_{f in F} E_{a ~ P^k} f(a),
// found on a simplex grid and refined by local ascent. Moving P by at most
// 1/G per coordinate moves every E_{P^k} f by at most k * q / (2G), so the
// grid optimum certifies the maximin to within that amount.
//
// Upper side: the smallest brute-force optimum over a deterministic stream
// of small instances. Any instance's optimum bounds rho(F) from above.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "cspgap/csp.hpp"
#include "cspgap/enumerate.hpp"
#include "cspgap/families.hpp"

namespace cspgap {

struct RhoLower {
  Rational value;                     // achieved by `distribution`
  std::vector<Rational> distribution; // P over [q]
  std::int64_t grid = 0;              // final grid denominator G
  Rational certified_gap;             // maximin <= value + certified_gap
};

namespace detail {

using Wide = __int128;

// min_f sum_a f(a) prod_l c[a_l]; the expectation is this over D^k.
inline Wide product_score(const PredicateFamily& fam, const std::vector<std::int64_t>& counts,
                          const std::vector<std::vector<int>>& tuples) {
  Wide best = -1;
  for (const auto& f : fam.predicates()) {
    Wide s = 0;
    for (std::size_t a = 0; a < tuples.size(); ++a) {
      if (!f(a)) continue;
      Wide prod = 1;
      for (int v : tuples[a]) prod *= counts[static_cast<std::size_t>(v)];
      s += prod;
    }
    if (best < 0 || s < best) best = s;
  }
  return best;
}

inline Integer to_integer(Wide v) {
  Integer hi = static_cast<std::int64_t>(v >> 62);
  Integer lo = static_cast<std::int64_t>(v & ((Wide{1} << 62) - 1));
  return hi * (Integer(1) << 62) + lo;
}

inline Integer power(std::int64_t base, int e) {
  Integer r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace detail

inline RhoLower rho_product_lower(const PredicateFamily& fam, const Rational& precision) {
  if (precision.sign() <= 0) throw ValidationError("precision must be positive");
  const int q = fam.q();
  const int k = fam.k();
  std::vector<std::vector<int>> tuples;
  for (std::size_t a = 0; a < fam.tuple_count(); ++a) tuples.push_back(decode_tuple(a, q, k));

  std::int64_t grid = 64;
  auto gap_for = [&](std::int64_t g) { return Rational(Integer(k * q), Integer(2 * g)); };
  while (gap_for(grid) > precision) grid *= 2;
  // Scores are bounded by G^k; keep them inside 128 bits with headroom for refinement.
  if (static_cast<double>(k) * std::log2(static_cast<double>(grid)) > 100)
    throw BudgetExceeded("grid 1/" + std::to_string(grid) + " too fine for arity " + std::to_string(k));

  // Grid pass over all compositions of G into q parts, in lexicographic order.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(q), 0);
  std::vector<std::int64_t> best_counts;
  detail::Wide best = -1;
  auto visit = [&](auto&& self, int pos, std::int64_t left) -> void {
    if (pos == q - 1) {
      counts[static_cast<std::size_t>(pos)] = left;
      auto s = detail::product_score(fam, counts, tuples);
      if (s > best) {
        best = s;
        best_counts = counts;
      }
      return;
    }
    for (std::int64_t c = 0; c <= left; ++c) {
      counts[static_cast<std::size_t>(pos)] = c;
      self(self, pos + 1, left - c);
    }
  };
  visit(visit, 0, grid);

  // Local ascent: unit transfers between coordinates, halving the step when stuck.
  std::int64_t denom = grid;
  std::vector<std::int64_t> cur = best_counts;
  detail::Wide cur_score = best;
  for (int level = 0; level < 6; ++level) {
    if (static_cast<double>(k) * std::log2(static_cast<double>(denom * 2)) > 110) break;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int from = 0; from < q && !improved; ++from)
        for (int to = 0; to < q && !improved; ++to) {
          if (from == to || cur[static_cast<std::size_t>(from)] == 0) continue;
          auto cand = cur;
          --cand[static_cast<std::size_t>(from)];
          ++cand[static_cast<std::size_t>(to)];
          auto s = detail::product_score(fam, cand, tuples);
          if (s > cur_score) {
            cur = std::move(cand);
            cur_score = s;
            improved = true;
          }
        }
    }
    for (auto& c : cur) c *= 2;
    for (int i = 0; i < k; ++i) cur_score *= 2;
    denom *= 2;
  }

  RhoLower out;
  out.value = Rational(detail::to_integer(cur_score), detail::power(denom, k));
  for (auto c : cur) out.distribution.emplace_back(Integer(c), Integer(denom));
  out.grid = grid;
  out.certified_gap = gap_for(grid);
  return out;
}

struct RhoUpper {
  Rational value;
  std::optional<Instance> witness;  // instance attaining `value`
  std::uint64_t evaluated = 0;
};

/// Smallest brute-force optimum over, in order: complete instances (each
/// predicate alone, then the whole family) for n = k..n_max; the exhaustive
/// renaming-canonical stream with up to kExhaustiveConstraints constraints;
/// then seeded random instances until `budget` instances were evaluated.
inline RhoUpper rho_upper_empirical(FamilyPtr fam, int n_max, std::uint64_t budget, std::uint64_t seed = 0,
                                    std::uint64_t brute_force_budget = kDefaultBruteForceBudget) {
  constexpr std::size_t kExhaustiveConstraints = 6;
  if (n_max < fam->k()) throw ValidationError("n_max must be >= k");
  RhoUpper out;
  auto consider = [&](const Instance& inst) {
    if (out.evaluated >= budget) return false;
    ++out.evaluated;
    auto opt = brute_force_opt(inst, brute_force_budget);
    if (!out.witness || opt.value < out.value) {
      out.value = opt.value;
      out.witness = inst;
    }
    return true;
  };
  for (int n = fam->k(); n <= n_max; ++n) {
    if (fam->size() > 1)
      for (std::size_t f = 0; f < fam->size(); ++f)
        if (!consider(builders::complete(fam, n, f))) break;
    if (!consider(builders::complete(fam, n))) break;
  }
  if (out.evaluated < budget) {
    const int renaming_n = std::min(n_max, 6);
    InstanceStream stream({fam, fam->k(), renaming_n, kExhaustiveConstraints, StreamMode::exhaustive, 0, true});
    while (auto inst = stream.next())
      if (!consider(*inst)) break;
  }
  if (out.evaluated < budget) {
    InstanceStream stream({fam, fam->k(), n_max, static_cast<std::size_t>(3 * n_max), StreamMode::random, seed, false});
    while (out.evaluated < budget) consider(*stream.next());
  }
  if (out.evaluated == 0) throw BudgetExceeded("budget exhausted before any instance was evaluated");
  return out;
}

}  // namespace cspgap
