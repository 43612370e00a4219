#pragma once
// Distributions over F x [q]^k, their marginal vectors, symbol kernels, the
// YES/NO construction from a basic-LP solution, and one-wise independence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "cspgap/basic_lp.hpp"
#include "cspgap/csp.hpp"
#include "cspgap/lp.hpp"
#include "cspgap/rho.hpp"

namespace cspgap {

/// D in Delta(F x [q]^k), stored densely: mass[f * q^k + a].
struct PairDistribution {
  FamilyPtr family;
  std::vector<Rational> mass;

  explicit PairDistribution(FamilyPtr fam) : family(std::move(fam)), mass(family->size() * family->tuple_count()) {}

  Rational& at(std::size_t f, std::size_t a) { return mass[f * family->tuple_count() + a]; }
  const Rational& at(std::size_t f, std::size_t a) const { return mass[f * family->tuple_count() + a]; }

  friend bool operator==(const PairDistribution& a, const PairDistribution& b) { return a.mass == b.mass; }
};

inline std::optional<std::string> check_pair_distribution(const PairDistribution& d) {
  if (d.mass.size() != d.family->size() * d.family->tuple_count()) return "distribution has the wrong number of atoms";
  for (const auto& v : d.mass)
    if (v.sign() < 0) return "distribution has a negative mass";
  if (sum(d.mass) != 1) return "distribution masses do not sum to 1";
  return std::nullopt;
}

/// mu(D), indexed by (predicate f, position l, symbol s).
struct MarginalVector {
  std::size_t predicates = 0, k = 0, q = 0;
  std::vector<Rational> entries;

  MarginalVector() = default;
  MarginalVector(std::size_t f, std::size_t k_, std::size_t q_) : predicates(f), k(k_), q(q_), entries(f * k_ * q_) {}

  Rational& at(std::size_t f, std::size_t l, std::size_t s) { return entries[(f * k + l) * q + s]; }
  const Rational& at(std::size_t f, std::size_t l, std::size_t s) const { return entries[(f * k + l) * q + s]; }

  /// First (f, l, s) where the two vectors differ.
  std::optional<std::array<std::size_t, 3>> first_mismatch(const MarginalVector& other) const {
    if (predicates != other.predicates || k != other.k || q != other.q) return std::array<std::size_t, 3>{0, 0, 0};
    for (std::size_t f = 0; f < predicates; ++f)
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t s = 0; s < q; ++s)
          if (at(f, l, s) != other.at(f, l, s)) return std::array<std::size_t, 3>{f, l, s};
    return std::nullopt;
  }

  friend bool operator==(const MarginalVector& a, const MarginalVector& b) { return !a.first_mismatch(b); }
};

/// Entry (f, l, s) = Pr_{(g, a) ~ D}[g = f and a_l = s]; over s it sums to Pr_D[f].
inline MarginalVector marginal_vector(const PairDistribution& d) {
  const auto& fam = *d.family;
  const int q = fam.q();
  const int k = fam.k();
  MarginalVector mu(fam.size(), static_cast<std::size_t>(k), static_cast<std::size_t>(q));
  for (std::size_t f = 0; f < fam.size(); ++f)
    for (std::size_t a = 0; a < fam.tuple_count(); ++a) {
      const auto& p = d.at(f, a);
      if (p.is_zero()) continue;
      auto t = decode_tuple(a, q, k);
      for (int l = 0; l < k; ++l) mu.at(f, static_cast<std::size_t>(l), static_cast<std::size_t>(t[static_cast<std::size_t>(l)])) += p;
    }
  return mu;
}

/// E_{(f,a) ~ D} f(a).
inline Rational yes_value(const PairDistribution& d) {
  Rational s = 0;
  for (std::size_t f = 0; f < d.family->size(); ++f)
    for (std::size_t a = 0; a < d.family->tuple_count(); ++a)
      if ((*d.family)[f](a)) s += d.at(f, a);
  return s;
}

/// Rows P_s over [q]: a symbol s is replaced by b with probability rows[s][b].
struct SymbolKernel {
  std::vector<std::vector<Rational>> rows;

  static SymbolKernel identity(int q) {
    SymbolKernel p;
    p.rows.assign(static_cast<std::size_t>(q), std::vector<Rational>(static_cast<std::size_t>(q)));
    for (int s = 0; s < q; ++s) p.rows[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = 1;
    return p;
  }
  static SymbolKernel uniform(int q) {
    SymbolKernel p;
    p.rows.assign(static_cast<std::size_t>(q), std::vector<Rational>(static_cast<std::size_t>(q), Rational(1, q)));
    return p;
  }
  /// s -> map[s] with certainty.
  static SymbolKernel deterministic(const std::vector<int>& map) {
    SymbolKernel p;
    const auto q = map.size();
    p.rows.assign(q, std::vector<Rational>(q));
    for (std::size_t s = 0; s < q; ++s) p.rows[s][static_cast<std::size_t>(map[s])] = 1;
    return p;
  }

  friend bool operator==(const SymbolKernel&, const SymbolKernel&) = default;
  friend bool operator<(const SymbolKernel& a, const SymbolKernel& b) { return a.rows < b.rows; }
};

inline std::optional<std::string> check_kernel(const SymbolKernel& p, int q) {
  if (p.rows.size() != static_cast<std::size_t>(q)) return "kernel has the wrong number of rows";
  for (const auto& row : p.rows) {
    if (row.size() != static_cast<std::size_t>(q)) return "kernel row has the wrong length";
    for (const auto& v : row)
      if (v.sign() < 0) return "kernel has a negative entry";
    if (sum(row) != 1) return "kernel row does not sum to 1";
  }
  return std::nullopt;
}

namespace detail {
// Pr[b | a] = prod_l P_{a_l}(b_l), for every (a, b) pair.
template <class T, class Rows>
std::vector<T> transition_table(const Rows& rows, const std::vector<std::vector<int>>& tuples) {
  const std::size_t n = tuples.size();
  std::vector<T> out(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      T prod = 1;
      for (std::size_t l = 0; l < tuples[a].size(); ++l) {
        prod *= rows[static_cast<std::size_t>(tuples[a][l])][static_cast<std::size_t>(tuples[b][l])];
        if (prod == 0) break;
      }
      out[a * n + b] = prod;
    }
  return out;
}

inline std::vector<std::vector<int>> all_tuples(const PredicateFamily& fam) {
  std::vector<std::vector<int>> t;
  for (std::size_t a = 0; a < fam.tuple_count(); ++a) t.push_back(decode_tuple(a, fam.q(), fam.k()));
  return t;
}
}  // namespace detail

/// E_{(f,a) ~ D} E_{b : b_l ~ P_{a_l} independently} f(b).
inline Rational no_value(const PairDistribution& d, const SymbolKernel& p) {
  const auto& fam = *d.family;
  if (auto err = check_kernel(p, fam.q())) throw ValidationError(*err);
  const auto tuples = detail::all_tuples(fam);
  const std::size_t n = tuples.size();
  Rational total = 0;
  for (std::size_t a = 0; a < n; ++a) {
    bool any = false;
    for (std::size_t f = 0; f < fam.size(); ++f) any = any || !d.at(f, a).is_zero();
    if (!any) continue;
    for (std::size_t b = 0; b < n; ++b) {
      Rational prod = 1;
      for (std::size_t l = 0; l < tuples[a].size() && !prod.is_zero(); ++l)
        prod *= p.rows[static_cast<std::size_t>(tuples[a][l])][static_cast<std::size_t>(tuples[b][l])];
      if (prod.is_zero()) continue;
      Rational sat = 0;
      for (std::size_t f = 0; f < fam.size(); ++f)
        if (fam[f](b)) sat += d.at(f, a);
      total += sat * prod;
    }
  }
  return total;
}

struct NoSupResult {
  Rational bound;  // exact no_value at `kernel`
  SymbolKernel kernel;
  std::uint64_t evaluations = 0;
};

namespace detail {

class KernelSearch {
 public:
  KernelSearch(const PairDistribution& d) : d_(d), q_(d.family->q()), tuples_(all_tuples(*d.family)) {
    const auto& fam = *d.family;
    const std::size_t n = tuples_.size();
    // weight[a * n + b] = sum_f D(f, a) f(b).
    weight_.assign(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t f = 0; f < fam.size(); ++f) {
        const double m = to_double(d.at(f, a));
        if (m == 0) continue;
        active_.push_back(a);
        for (std::size_t b = 0; b < n; ++b)
          if (fam[f](b)) weight_[a * n + b] += m;
      }
    std::sort(active_.begin(), active_.end());
    active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
  }

  double evaluate(const std::vector<std::vector<double>>& rows) {
    ++evaluations_;
    const std::size_t n = tuples_.size();
    double total = 0;
    for (std::size_t a : active_)
      for (std::size_t b = 0; b < n; ++b) {
        const double w = weight_[a * n + b];
        if (w == 0) continue;
        double prod = w;
        for (std::size_t l = 0; l < tuples_[a].size() && prod != 0; ++l)
          prod *= rows[static_cast<std::size_t>(tuples_[a][l])][static_cast<std::size_t>(tuples_[b][l])];
        total += prod;
      }
    return total;
  }

  std::uint64_t evaluations() const { return evaluations_; }
  int q() const { return q_; }

 private:
  const PairDistribution& d_;
  int q_;
  std::vector<std::vector<int>> tuples_;
  std::vector<double> weight_;
  std::vector<std::size_t> active_;
  std::uint64_t evaluations_ = 0;
};

inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Snaps a probability row to multiples of 1/denominator, keeping the sum at 1.
// Largest remainders get the leftover units; ties go to the lower index.
inline std::vector<std::int64_t> snap_units(const std::vector<double>& row, std::int64_t denominator) {
  const std::size_t q = row.size();
  std::vector<std::int64_t> units(q);
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t b = 0; b < q; ++b) {
    const double x = std::clamp(row[b], 0.0, 1.0) * static_cast<double>(denominator);
    units[b] = std::min(static_cast<std::int64_t>(std::floor(x)), denominator);
    used += units[b];
    rem.emplace_back(-(x - std::floor(x)), b);
  }
  std::stable_sort(rem.begin(), rem.end());
  for (std::size_t i = 0; used < denominator; i = (i + 1) % q, ++used) ++units[rem[i].second];
  // Overshoot only comes from clamping noise; take units back from the largest entries.
  while (used > denominator) {
    *std::max_element(units.begin(), units.end()) -= 1;
    --used;
  }
  return units;
}

// Compositions of `total` into q parts, lexicographic.
inline void for_each_composition(int q, std::int64_t total, const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(q));
  auto rec = [&](auto&& self, int pos, std::int64_t left) -> void {
    if (pos == q - 1) {
      c[static_cast<std::size_t>(pos)] = left;
      fn(c);
      return;
    }
    for (std::int64_t v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
}

}  // namespace detail

inline constexpr std::int64_t kKernelLattice = 1024;

inline constexpr std::size_t kExactRescores = 32;

/// Lower bound on sup_P no_value(D, P): every deterministic kernel, a product
/// grid over the kernel rows, then seeded multistart pairwise-transfer ascent.
/// Candidates are ranked in floating point; the best few (ties in stream
/// order) are re-scored exactly and the maximum wins, ties going to the
/// lexicographically smallest kernel. Every candidate is a lattice kernel, so
/// the reported bound is exactly reproducible.
inline NoSupResult no_sup_search(const PairDistribution& d, std::uint64_t budget, std::uint64_t seed) {
  if (auto err = check_pair_distribution(d)) throw ValidationError(*err);
  detail::KernelSearch search(d);
  const int q = search.q();
  const auto qs = static_cast<std::size_t>(q);

  // A lattice kernel: rows[s][b] = units[s][b] / denominator.
  struct Candidate {
    double value;
    std::vector<std::vector<std::int64_t>> units;
    std::int64_t denominator;
  };
  std::vector<Candidate> pool;
  double best_seen = -1;
  std::vector<std::vector<double>> rows(qs, std::vector<double>(qs));
  auto offer = [&](const std::vector<std::vector<std::int64_t>>& units, std::int64_t denom) {
    for (std::size_t s = 0; s < qs; ++s)
      for (std::size_t b = 0; b < qs; ++b) rows[s][b] = static_cast<double>(units[s][b]) / static_cast<double>(denom);
    const double v = search.evaluate(rows);
    if (v < best_seen - 1e-9) return;
    best_seen = std::max(best_seen, v);
    pool.push_back({v, units, denom});
    if (pool.size() > 4 * kExactRescores) std::erase_if(pool, [&](const auto& e) { return e.value < best_seen - 1e-9; });
  };
  std::vector<std::vector<std::int64_t>> units(qs, std::vector<std::int64_t>(qs));

  // Deterministic kernels, lexicographic in (map(0), ..., map(q-1)).
  std::vector<std::size_t> map(qs, 0);
  for (;;) {
    for (std::size_t s = 0; s < qs; ++s)
      for (std::size_t b = 0; b < qs; ++b) units[s][b] = map[s] == b ? 1 : 0;
    offer(units, 1);
    std::size_t i = qs;
    while (i > 0 && map[i - 1] == qs - 1) map[--i] = 0;
    if (i == 0) break;
    ++map[i - 1];
  }

  // Product grid: each row a composition of R; largest R whose grid fits half the budget.
  const std::uint64_t grid_budget = budget / 2;
  std::int64_t resolution = 0;
  for (std::int64_t r = 2; r <= 64; ++r) {
    double per_row = 1;
    for (int i = 1; i < q; ++i) per_row = per_row * static_cast<double>(r + i) / i;
    if (std::pow(per_row, q) > static_cast<double>(grid_budget)) break;
    resolution = r;
  }
  if (resolution >= 2) {
    std::vector<std::vector<std::int64_t>> row_choices;
    detail::for_each_composition(q, resolution, [&](const std::vector<std::int64_t>& c) { row_choices.push_back(c); });
    std::vector<std::size_t> pick(qs, 0);
    for (;;) {
      for (std::size_t s = 0; s < qs; ++s) units[s] = row_choices[pick[s]];
      offer(units, resolution);
      std::size_t i = qs;
      while (i > 0 && pick[i - 1] + 1 == row_choices.size()) pick[--i] = 0;
      if (i == 0) break;
      ++pick[i - 1];
    }
  }

  // Seeded multistart ascent with whatever budget remains.
  std::mt19937_64 rng(seed);
  // One evaluation is held back for the snapped kernel.
  auto room = [&] { return search.evaluations() + 1 < budget; };
  while (search.evaluations() + 8 < budget) {
    std::vector<std::vector<double>> x(qs, std::vector<double>(qs));
    for (auto& row : x) {
      double total = 0;
      for (auto& v : row) total += (v = -std::log(1.0 - detail::unit_double(rng)));
      for (auto& v : row) v /= total;
    }
    double cur = search.evaluate(x);
    for (double step = 0.25; step > 1e-4 && room(); step /= 2) {
      bool improved = true;
      while (improved && room()) {
        improved = false;
        for (std::size_t s = 0; s < qs && room(); ++s)
          for (std::size_t from = 0; from < qs; ++from)
            for (std::size_t to = 0; to < qs; ++to) {
              if (from == to || x[s][from] <= 0 || !room()) continue;
              const double delta = std::min(step, x[s][from]);
              x[s][from] -= delta;
              x[s][to] += delta;
              double v = search.evaluate(x);
              if (v > cur + 1e-15) {
                cur = v;
                improved = true;
              } else {
                x[s][from] += delta;
                x[s][to] -= delta;
              }
            }
      }
    }
    for (std::size_t s = 0; s < qs; ++s) units[s] = detail::snap_units(x[s], kKernelLattice);
    offer(units, kKernelLattice);
  }

  std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
  if (pool.size() > kExactRescores) pool.resize(kExactRescores);
  NoSupResult out;
  bool have = false;
  for (const auto& c : pool) {
    SymbolKernel k;
    for (const auto& row : c.units) {
      k.rows.emplace_back();
      for (auto u : row) k.rows.back().emplace_back(Integer(u), Integer(c.denominator));
    }
    Rational exact = no_value(d, k);
    if (!have || exact > out.bound || (exact == out.bound && k < out.kernel)) {
      out.bound = std::move(exact);
      out.kernel = std::move(k);
      have = true;
    }
  }
  out.evaluations = search.evaluations();
  return out;
}

/// E over independent z_i ~ sum_s X_i(s) P_s of val(z): the NO value computed
/// on the instance side. It is multilinear in the independent z_i, hence at
/// most the CSP optimum.
inline Rational instance_route_no_value(const Instance& inst, const std::vector<std::vector<Rational>>& marginals,
                                        const SymbolKernel& p) {
  const auto& fam = inst.family();
  const auto qs = static_cast<std::size_t>(fam.q());
  std::vector<std::vector<Rational>> z(marginals.size(), std::vector<Rational>(qs));
  for (std::size_t i = 0; i < marginals.size(); ++i)
    for (std::size_t s = 0; s < qs; ++s)
      if (!marginals[i][s].is_zero())
        for (std::size_t b = 0; b < qs; ++b) z[i][b] += marginals[i][s] * p.rows[s][b];
  const auto tuples = detail::all_tuples(fam);
  Rational total = 0;
  for (std::size_t c = 0; c < inst.m(); ++c) {
    const auto& con = inst.constraints()[c];
    Rational local = 0;
    for (std::size_t b = 0; b < tuples.size(); ++b) {
      if (!fam[con.predicate](b)) continue;
      Rational prod = 1;
      for (std::size_t l = 0; l < tuples[b].size() && !prod.is_zero(); ++l)
        prod *= z[static_cast<std::size_t>(con.vars[l])][static_cast<std::size_t>(tuples[b][l])];
      local += prod;
    }
    total += inst.weight_fraction(c) * local;
  }
  return total;
}

struct YesNoPair {
  PairDistribution yes;
  PairDistribution no;
  MarginalVector marginals;  // mu(yes) = mu(no)
  NoSupResult falsifier;     // best over all seeds tried
  std::uint64_t falsifier_seed = 0;
};

struct ConstructOptions {
  std::optional<Rational> csp_opt;       // computed by brute force when absent
  std::vector<std::uint64_t> seeds{0};  // no_sup_search seeds used as falsifiers
  std::uint64_t no_sup_budget = 2048;
  std::uint64_t brute_force_budget = kDefaultBruteForceBudget;
};

/// D^YES: draw C by weight, then a ~ Y_C. D^NO: draw C by weight, then each
/// a_l ~ X_{j_l} independently. Both are emitted with (f_C, a) as the atom.
/// Before returning, checks mu(D^YES) = mu(D^NO), yes_value(D^YES) = sol.value,
/// and that the NO value never exceeds opt^CSP on any kernel tried, with the
/// distribution-side and instance-side computations agreeing exactly.
inline YesNoPair construct_yes_no(const Instance& inst, const LocalDistributionSolution& sol,
                                  const ConstructOptions& opt = {}) {
  if (auto err = check_local_solution(inst, sol)) throw ValidationError("solution fails the basic LP invariants: " + *err);
  const auto& fam = inst.family();
  const int q = fam.q();
  const int k = fam.k();
  PairDistribution yes(inst.family_ptr()), no(inst.family_ptr());
  const auto tuples = detail::all_tuples(fam);
  for (std::size_t c = 0; c < inst.m(); ++c) {
    const auto& con = inst.constraints()[c];
    const Rational w = inst.weight_fraction(c);
    for (std::size_t a = 0; a < tuples.size(); ++a) {
      if (!sol.local[c][a].is_zero()) yes.at(con.predicate, a) += w * sol.local[c][a];
      Rational prod = w;
      for (int l = 0; l < k && !prod.is_zero(); ++l)
        prod *= sol.marginals[static_cast<std::size_t>(con.vars[static_cast<std::size_t>(l)])]
                             [static_cast<std::size_t>(tuples[a][static_cast<std::size_t>(l)])];
      if (!prod.is_zero()) no.at(con.predicate, a) += prod;
    }
  }
  if (auto err = check_pair_distribution(yes)) throw InternalError("D^YES: " + *err);
  if (auto err = check_pair_distribution(no)) throw InternalError("D^NO: " + *err);

  auto mu_yes = marginal_vector(yes);
  if (auto at = mu_yes.first_mismatch(marginal_vector(no)))
    throw InternalError("marginal vectors of D^YES and D^NO differ");
  if (yes_value(yes) != sol.value) throw InternalError("yes_value(D^YES) differs from the LP objective");

  const Rational csp = opt.csp_opt ? *opt.csp_opt : brute_force_opt(inst, opt.brute_force_budget).value;
  if (opt.seeds.empty()) throw ValidationError("construct_yes_no needs at least one falsifier seed");
  std::optional<NoSupResult> best;
  std::uint64_t best_seed = 0;
  auto route_check = [&](const SymbolKernel& p) {
    Rational dist_side = no_value(no, p);
    if (dist_side != instance_route_no_value(inst, sol.marginals, p))
      throw InternalError("NO value differs between distribution and instance computations");
    if (dist_side > csp) throw InternalError("NO value " + to_string(dist_side) + " exceeds opt^CSP " + to_string(csp));
  };
  for (auto seed : opt.seeds) {
    auto r = no_sup_search(no, opt.no_sup_budget, seed);
    route_check(r.kernel);
    if (!best || r.bound > best->bound) {
      best = std::move(r);
      best_seed = seed;
    }
  }
  route_check(SymbolKernel::identity(q));
  return {std::move(yes), std::move(no), std::move(mu_yes), std::move(*best), best_seed};
}

// ---------------------------------------------------------------------------
// One-wise independence

struct OnewiseResult {
  std::optional<std::vector<Rational>> witness;  // distribution over [q]^k
  LpProblem system;                               // the feasibility system that was decided
  std::vector<Rational> farkas;                   // refusal certificate for `system`
};

/// Feasibility system: masses on f^{-1}(1), total 1, every position-l marginal 1/q.
inline LpProblem onewise_system(const Predicate& f, int q, int k) {
  LpProblem lp;
  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < f.table.size(); ++a)
    if (f(a)) {
      support.push_back(a);
      lp.add_variable("d_" + tuple_string(decode_tuple(a, q, k)));
    }
  std::vector<std::pair<std::size_t, Rational>> total;
  for (std::size_t v = 0; v < support.size(); ++v) total.emplace_back(v, 1);
  lp.add_row(total, 1);
  for (int l = 0; l < k; ++l)
    for (int s = 0; s < q; ++s) {
      std::vector<std::pair<std::size_t, Rational>> terms;
      for (std::size_t v = 0; v < support.size(); ++v)
        if (decode_tuple(support[v], q, k)[static_cast<std::size_t>(l)] == s) terms.emplace_back(v, 1);
      lp.add_row(terms, Rational(1, q));
    }
  return lp;
}

/// Does the witness sit on f^{-1}(1) with every coordinate marginal uniform?
inline bool is_onewise_witness(const Predicate& f, int q, int k, const std::vector<Rational>& d) {
  if (d.size() != f.table.size()) return false;
  for (std::size_t a = 0; a < d.size(); ++a)
    if (d[a].sign() < 0 || (!d[a].is_zero() && !f(a))) return false;
  if (sum(d) != 1) return false;
  for (int l = 0; l < k; ++l) {
    std::vector<Rational> marg(static_cast<std::size_t>(q));
    for (std::size_t a = 0; a < d.size(); ++a)
      marg[static_cast<std::size_t>(decode_tuple(a, q, k)[static_cast<std::size_t>(l)])] += d[a];
    for (const auto& m : marg)
      if (m != Rational(1, q)) return false;
  }
  return true;
}

/// Decides whether f supports one-wise independence. The uniform distribution
/// on f^{-1}(1) is returned when it qualifies; otherwise the witness is the
/// simplex's basic feasible point, and a refusal carries a Farkas vector.
inline OnewiseResult onewise_support(const Predicate& f, int q, int k) {
  OnewiseResult out;
  out.system = onewise_system(f, q, k);
  const std::size_t sat = f.support_size();
  if (sat > 0) {
    std::vector<Rational> uniform(f.table.size());
    for (std::size_t a = 0; a < f.table.size(); ++a)
      if (f(a)) uniform[a] = Rational(Integer(1), Integer(sat));
    if (is_onewise_witness(f, q, k, uniform)) {
      out.witness = std::move(uniform);
      return out;
    }
  }
  auto feas = check_feasible(out.system);
  if (!feas.feasible) {
    if (!is_farkas_certificate(out.system, feas.farkas)) throw InternalError("one-wise refusal lacks a valid Farkas vector");
    out.farkas = std::move(feas.farkas);
    return out;
  }
  std::vector<Rational> d(f.table.size());
  std::size_t v = 0;
  for (std::size_t a = 0; a < f.table.size(); ++a)
    if (f(a)) d[a] = feas.point[v++];
  if (!is_onewise_witness(f, q, k, d)) throw InternalError("one-wise witness failed re-verification");
  out.witness = std::move(d);
  return out;
}

enum class SupportKind { strong, weak, none, unknown };

inline const char* to_string(SupportKind k) {
  switch (k) {
    case SupportKind::strong: return "strong";
    case SupportKind::weak: return "weak";
    case SupportKind::none: return "none";
    case SupportKind::unknown: return "unknown";
  }
  return "?";
}

struct RhoBracket {
  Rational lower, upper;
};

struct SupportClassification {
  SupportKind kind = SupportKind::none;
  std::vector<std::size_t> subfamily;  // weak: the F' found
  std::vector<bool> supports;          // per predicate
  std::optional<RhoBracket> family_bracket;
};

struct ClassificationOptions {
  int n_max = 5;
  std::uint64_t rho_budget = 2000;
  std::size_t max_subfamilies = 4096;
};

inline RhoBracket rho_bracket(const FamilyPtr& fam, const Rational& precision, int n_max, std::uint64_t budget) {
  return {rho_product_lower(*fam, precision).value, rho_upper_empirical(fam, std::max(n_max, fam->k()), budget).value};
}

/// strong: every predicate supports one-wise independence. weak(F'): some
/// supporting subfamily provably has rho(F') = rho(F); since rho(F) <= rho(F')
/// always, upper(F') <= lower(F) proves it. none: no supporting predicate, or
/// every candidate F' provably has a larger threshold. unknown otherwise.
inline SupportClassification support_classification(const FamilyPtr& fam, const Rational& rho_precision,
                                                     const ClassificationOptions& opt = {}) {
  SupportClassification out;
  std::vector<std::size_t> supporting;
  for (std::size_t f = 0; f < fam->size(); ++f) {
    bool ok = onewise_support((*fam)[f], fam->q(), fam->k()).witness.has_value();
    out.supports.push_back(ok);
    if (ok) supporting.push_back(f);
  }
  if (supporting.size() == fam->size()) {
    out.kind = SupportKind::strong;
    return out;
  }
  if (supporting.empty()) {
    out.kind = SupportKind::none;
    return out;
  }
  const std::uint64_t subsets = (std::uint64_t{1} << supporting.size()) - 1;
  if (supporting.size() >= 63 || subsets > opt.max_subfamilies)
    throw BudgetExceeded("too many supporting subfamilies to examine (" + std::to_string(supporting.size()) +
                         " supporting predicates)");
  const auto whole = rho_bracket(fam, rho_precision, opt.n_max, opt.rho_budget);
  out.family_bracket = whole;
  bool undecided = false;
  for (std::uint64_t mask = 1; mask <= subsets; ++mask) {
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < supporting.size(); ++i)
      if (mask >> i & 1) pick.push_back(supporting[i]);
    auto sub = std::make_shared<const PredicateFamily>(fam->subfamily(pick));
    const auto b = rho_bracket(sub, rho_precision, opt.n_max, opt.rho_budget);
    if (b.upper <= whole.lower) {
      out.kind = SupportKind::weak;
      out.subfamily = std::move(pick);
      return out;
    }
    if (b.lower <= whole.upper) undecided = true;
  }
  out.kind = undecided ? SupportKind::unknown : SupportKind::none;
  return out;
}

}  // namespace cspgap
