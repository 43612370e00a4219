#pragma once
// The basic LP relaxation of a Max-CSP instance and its distributional view.
//
// Variables: x_{i,b} for every variable i and symbol b, and y_{C,a} for every
// constraint C and local tuple a. Rows: sum_b x_{i,b} = 1 for every i, and
// sum_{a : a_l = b} y_{C,a} = x_{j_l,b} for every constraint C, position l
// and symbol b. The objective is the weight-averaged expected satisfaction
// sum_C (w_C / W) sum_a f_C(a) y_{C,a}.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cspgap/csp.hpp"
#include "cspgap/lp.hpp"
#include "cspgap/width.hpp"

namespace cspgap {

/// Y_C per constraint (indexed by local tuple) and X_i per variable.
struct LocalDistributionSolution {
  std::vector<std::vector<Rational>> local;      // m x q^k
  std::vector<std::vector<Rational>> marginals;  // n x q
  Rational value;
};

/// Index of the LP columns, shared by the builder and the decoder.
struct BasicLpLayout {
  std::size_t n, q, m, tuples;

  explicit BasicLpLayout(const Instance& inst)
      : n(static_cast<std::size_t>(inst.n())),
        q(static_cast<std::size_t>(inst.family().q())),
        m(inst.m()),
        tuples(inst.family().tuple_count()) {}

  std::size_t x(std::size_t var, std::size_t symbol) const { return var * q + symbol; }
  std::size_t y(std::size_t constraint, std::size_t tuple) const { return n * q + constraint * tuples + tuple; }
  std::size_t num_vars() const { return n * q + m * tuples; }
};

inline LpProblem build_basic_lp(const Instance& inst) {
  const BasicLpLayout lay(inst);
  const auto& fam = inst.family();
  const int q = fam.q();
  const int k = fam.k();
  LpProblem lp;
  lp.objective.reserve(lay.num_vars());
  for (std::size_t i = 0; i < lay.n; ++i)
    for (std::size_t b = 0; b < lay.q; ++b) lp.add_variable("x_" + std::to_string(i + 1) + "_" + std::to_string(b));
  for (std::size_t c = 0; c < lay.m; ++c) {
    const auto& f = fam[inst.constraints()[c].predicate];
    const Rational w = inst.weight_fraction(c);
    for (std::size_t a = 0; a < lay.tuples; ++a)
      lp.add_variable("y_" + std::to_string(c + 1) + "_" + tuple_string(decode_tuple(a, q, k)),
                      f(a) ? w : Rational(0));
  }
  for (std::size_t i = 0; i < lay.n; ++i) {
    std::vector<std::pair<std::size_t, Rational>> terms;
    for (std::size_t b = 0; b < lay.q; ++b) terms.emplace_back(lay.x(i, b), 1);
    lp.add_row(terms, 1);
  }
  for (std::size_t c = 0; c < lay.m; ++c) {
    const auto& vars = inst.constraints()[c].vars;
    for (int l = 0; l < k; ++l)
      for (int b = 0; b < q; ++b) {
        std::vector<std::pair<std::size_t, Rational>> terms;
        for (std::size_t a = 0; a < lay.tuples; ++a)
          if (decode_tuple(a, q, k)[static_cast<std::size_t>(l)] == b) terms.emplace_back(lay.y(c, a), 1);
        terms.emplace_back(lay.x(static_cast<std::size_t>(vars[static_cast<std::size_t>(l)]), static_cast<std::size_t>(b)), -1);
        lp.add_row(terms, 0);
      }
  }
  return lp;
}

/// E_{C ~ weights} E_{a ~ Y_C} f_C(a).
inline Rational basic_lp_objective(const Instance& inst, const std::vector<std::vector<Rational>>& local) {
  Rational total = 0;
  for (std::size_t c = 0; c < inst.m(); ++c) {
    const auto& f = inst.family()[inst.constraints()[c].predicate];
    Rational s = 0;
    for (std::size_t a = 0; a < local[c].size(); ++a)
      if (f(a)) s += local[c][a];
    total += inst.weight_fraction(c) * s;
  }
  return total;
}

/// First violated invariant of a distributional solution, or nullopt.
inline std::optional<std::string> check_local_solution(const Instance& inst, const LocalDistributionSolution& sol) {
  const int q = inst.family().q();
  const int k = inst.family().k();
  const std::size_t tuples = inst.family().tuple_count();
  if (sol.local.size() != inst.m()) return "wrong number of local distributions";
  if (sol.marginals.size() != static_cast<std::size_t>(inst.n())) return "wrong number of variable marginals";
  for (std::size_t i = 0; i < sol.marginals.size(); ++i) {
    const auto& x = sol.marginals[i];
    if (x.size() != static_cast<std::size_t>(q)) return "marginal X_" + std::to_string(i + 1) + " has wrong length";
    for (const auto& v : x)
      if (v.sign() < 0) return "marginal X_" + std::to_string(i + 1) + " has a negative entry";
    if (sum(x) != 1) return "marginal X_" + std::to_string(i + 1) + " does not sum to 1";
  }
  for (std::size_t c = 0; c < inst.m(); ++c) {
    const auto& y = sol.local[c];
    if (y.size() != tuples) return "local distribution Y_" + std::to_string(c + 1) + " has wrong length";
    for (const auto& v : y)
      if (v.sign() < 0) return "local distribution Y_" + std::to_string(c + 1) + " has a negative entry";
    if (sum(y) != 1) return "local distribution Y_" + std::to_string(c + 1) + " does not sum to 1";
    const auto& vars = inst.constraints()[c].vars;
    for (int l = 0; l < k; ++l) {
      std::vector<Rational> marg(static_cast<std::size_t>(q));
      for (std::size_t a = 0; a < tuples; ++a)
        if (!y[a].is_zero()) marg[static_cast<std::size_t>(decode_tuple(a, q, k)[static_cast<std::size_t>(l)])] += y[a];
      const auto& x = sol.marginals[static_cast<std::size_t>(vars[static_cast<std::size_t>(l)])];
      for (int b = 0; b < q; ++b)
        if (marg[static_cast<std::size_t>(b)] != x[static_cast<std::size_t>(b)])
          return "consistency fails for constraint " + std::to_string(c + 1) + ", position " + std::to_string(l + 1) +
                 ", symbol " + std::to_string(b);
    }
  }
  if (basic_lp_objective(inst, sol.local) != sol.value) return "recorded objective differs from the recomputed value";
  return std::nullopt;
}

inline void require_local_solution(const Instance& inst, const LocalDistributionSolution& sol) {
  if (auto err = check_local_solution(inst, sol)) throw InternalError("invalid basic LP solution: " + *err);
}

/// Reads Y_C and X_i back out of a primal vector of build_basic_lp(inst).
inline LocalDistributionSolution decode_basic_lp(const Instance& inst, const std::vector<Rational>& primal) {
  const BasicLpLayout lay(inst);
  if (primal.size() != lay.num_vars()) throw ValidationError("primal vector does not match the basic LP layout");
  LocalDistributionSolution sol;
  sol.marginals.assign(lay.n, std::vector<Rational>(lay.q));
  for (std::size_t i = 0; i < lay.n; ++i)
    for (std::size_t b = 0; b < lay.q; ++b) sol.marginals[i][b] = primal[lay.x(i, b)];
  sol.local.assign(lay.m, std::vector<Rational>(lay.tuples));
  for (std::size_t c = 0; c < lay.m; ++c)
    for (std::size_t a = 0; a < lay.tuples; ++a) sol.local[c][a] = primal[lay.y(c, a)];
  sol.value = basic_lp_objective(inst, sol.local);
  return sol;
}

/// Inverse of decode_basic_lp.
inline std::vector<Rational> encode_basic_lp(const Instance& inst, const LocalDistributionSolution& sol) {
  const BasicLpLayout lay(inst);
  std::vector<Rational> primal(lay.num_vars());
  for (std::size_t i = 0; i < lay.n; ++i)
    for (std::size_t b = 0; b < lay.q; ++b) primal[lay.x(i, b)] = sol.marginals[i][b];
  for (std::size_t c = 0; c < lay.m; ++c)
    for (std::size_t a = 0; a < lay.tuples; ++a) primal[lay.y(c, a)] = sol.local[c][a];
  return primal;
}

/// opt^LP with an optimal solution in distributional form.
inline LocalDistributionSolution solve_basic_lp(const Instance& inst, const SolveOptions& opt = {}) {
  const LpProblem lp = build_basic_lp(inst);
  const LpSolution s = solve(lp, opt);
  if (!s.optimal()) throw InternalError(std::string("basic LP reported ") + to_string(s.status));
  auto sol = decode_basic_lp(inst, s.primal);
  if (sol.value != s.value) throw InternalError("decoded basic LP objective differs from the solver value");
  require_local_solution(inst, sol);
  return sol;
}

/// Integral embedding of an assignment: every Y_C and X_i is a point mass.
inline LocalDistributionSolution point_mass_solution(const Instance& inst, const Assignment& a) {
  check_assignment(inst, a);
  const BasicLpLayout lay(inst);
  LocalDistributionSolution sol;
  sol.marginals.assign(lay.n, std::vector<Rational>(lay.q));
  for (std::size_t i = 0; i < lay.n; ++i) sol.marginals[i][static_cast<std::size_t>(a.values[i])] = 1;
  sol.local.assign(lay.m, std::vector<Rational>(lay.tuples));
  for (std::size_t c = 0; c < lay.m; ++c) sol.local[c][inst.local_tuple(c, a.values)] = 1;
  sol.value = basic_lp_objective(inst, sol.local);
  require_local_solution(inst, sol);
  return sol;
}

struct GapReport {
  Rational lp_value;   // opt^LP
  Rational csp_value;  // opt^CSP
  Assignment csp_witness;
  LocalDistributionSolution lp_witness;

  /// Completeness opt^LP >= gamma and soundness opt^CSP <= beta.
  bool is_gap(const Rational& gamma, const Rational& beta) const { return lp_value >= gamma && csp_value <= beta; }
};

inline GapReport gap_report(const Instance& inst, std::uint64_t brute_force_budget = kDefaultBruteForceBudget) {
  auto csp = brute_force_opt(inst, brute_force_budget);
  auto lp = solve_basic_lp(inst);
  if (lp.value < csp.value) throw InternalError("basic LP value below the CSP optimum");
  return {lp.value, csp.value, std::move(csp.witness), std::move(lp)};
}

/// Solution built from one-wise witnesses: Y_C = D_{f_C}, X_i uniform.
/// witnesses maps predicate names to distributions over [q]^k.
inline LocalDistributionSolution lp_from_onewise(const Instance& inst,
                                                 const std::map<std::string, std::vector<Rational>>& witnesses) {
  const auto& fam = inst.family();
  LocalDistributionSolution sol;
  sol.marginals.assign(static_cast<std::size_t>(inst.n()),
                       std::vector<Rational>(static_cast<std::size_t>(fam.q()), Rational(1, fam.q())));
  for (const auto& c : inst.constraints()) {
    const auto& name = fam[c.predicate].name;
    auto it = witnesses.find(name);
    if (it == witnesses.end()) throw ValidationError("no one-wise witness for predicate '" + name + "'");
    if (it->second.size() != fam.tuple_count()) throw ValidationError("witness for '" + name + "' has wrong length");
    sol.local.push_back(it->second);
  }
  sol.value = basic_lp_objective(inst, sol.local);
  require_local_solution(inst, sol);
  if (sol.value != 1) throw InternalError("one-wise solution has value " + to_string(sol.value) + ", expected 1");
  return sol;
}

/// Solution built from widths: Y_C uniform over the shifts b_f + a^k, X_i uniform.
inline LocalDistributionSolution lp_from_width(const Instance& inst) {
  const auto& fam = inst.family();
  const int q = fam.q();
  const auto widths = width(fam);
  std::vector<std::vector<Rational>> per_predicate;
  for (const auto& pw : widths.per_predicate) {
    std::vector<Rational> d(fam.tuple_count());
    for (int a = 0; a < q; ++a) d[encode_tuple(shift(pw.base, a, q), q)] += Rational(1, q);
    per_predicate.push_back(std::move(d));
  }
  LocalDistributionSolution sol;
  sol.marginals.assign(static_cast<std::size_t>(inst.n()),
                       std::vector<Rational>(static_cast<std::size_t>(q), Rational(1, q)));
  for (const auto& c : inst.constraints()) sol.local.push_back(per_predicate[c.predicate]);
  sol.value = basic_lp_objective(inst, sol.local);
  require_local_solution(inst, sol);
  if (sol.value < widths.value) throw InternalError("width solution falls below omega(F)");
  return sol;
}

}  // namespace cspgap
