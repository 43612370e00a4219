#pragma once
// Exact rational LP in equality standard form:
//
//   maximize c.x  subject to  A x = b,  x >= 0.
//
// Two-phase dense tableau simplex with Bland's rule. Every answer carries an
// exact certificate (dual solution, Farkas vector or improving ray) that is
// re-checked before it is returned.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cspgap/error.hpp"
#include "cspgap/rational.hpp"

namespace cspgap {

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpProblem {
  std::vector<Rational> objective;            // c (maximized)
  std::vector<std::vector<Rational>> matrix;  // A, one dense row per equality
  std::vector<Rational> rhs;                  // b
  std::vector<std::string> labels;            // one per variable, unique

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rhs.size(); }

  /// Appends a variable; existing rows get a zero coefficient.
  std::size_t add_variable(std::string label, Rational cost = 0) {
    objective.push_back(std::move(cost));
    labels.push_back(std::move(label));
    for (auto& row : matrix) row.emplace_back(0);
    return objective.size() - 1;
  }

  /// Appends the row sum(coef * x_var) = value.
  std::size_t add_row(const std::vector<std::pair<std::size_t, Rational>>& terms, Rational value) {
    std::vector<Rational> row(num_vars());
    for (const auto& [var, coef] : terms) {
      if (var >= num_vars()) throw ValidationError("row references variable " + std::to_string(var));
      row[var] += coef;
    }
    matrix.push_back(std::move(row));
    rhs.push_back(std::move(value));
    return rhs.size() - 1;
  }

  void validate() const {
    if (matrix.size() != rhs.size()) throw ValidationError("LP has mismatched row and rhs counts");
    if (labels.size() != objective.size()) throw ValidationError("LP has one label per variable requirement violated");
    for (const auto& row : matrix)
      if (row.size() != objective.size()) throw ValidationError("LP row width differs from variable count");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second) throw ValidationError("duplicate LP variable label '" + l + "'");
  }

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (labels[j] == label) return j;
    return std::nullopt;
  }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Rational value;                  // optimal only
  std::vector<Rational> primal;    // optimal: x
  std::vector<Rational> dual;      // optimal: A^T y >= c, b.y = value; infeasible: A^T y >= 0, b.y < 0
  std::vector<Rational> ray;       // unbounded: d >= 0, A d = 0, c.d > 0
  std::size_t pivots = 0;

  bool optimal() const { return status == LpStatus::optimal; }

  std::unordered_map<std::string, Rational> labeled(const LpProblem& p) const {
    std::unordered_map<std::string, Rational> out;
    for (std::size_t j = 0; j < primal.size(); ++j) out.emplace(p.labels[j], primal[j]);
    return out;
  }
};

struct SolveOptions {
  std::size_t max_pivots = 5'000'000;
  bool check_canonical = false;  // assert reduced form of every tableau entry after each pivot
};

// ---------------------------------------------------------------------------
// Certificate checks (exact, independent of the solver's internal state)

namespace detail {
inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
  return s;
}
inline Rational column_dot(const LpProblem& p, std::size_t j, const std::vector<Rational>& y) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.num_rows(); ++i)
    if (!p.matrix[i][j].is_zero() && !y[i].is_zero()) s += p.matrix[i][j] * y[i];
  return s;
}
}  // namespace detail

/// A x = b and x >= 0.
inline bool is_primal_feasible(const LpProblem& p, const std::vector<Rational>& x) {
  if (x.size() != p.num_vars()) return false;
  for (const auto& v : x)
    if (v.sign() < 0) return false;
  for (std::size_t i = 0; i < p.num_rows(); ++i)
    if (detail::dot(p.matrix[i], x) != p.rhs[i]) return false;
  return true;
}

/// A^T y >= c (dual feasibility for the maximization).
inline bool is_dual_feasible(const LpProblem& p, const std::vector<Rational>& y) {
  if (y.size() != p.num_rows()) return false;
  for (std::size_t j = 0; j < p.num_vars(); ++j)
    if (detail::column_dot(p, j, y) < p.objective[j]) return false;
  return true;
}

/// A^T y >= 0 and b.y < 0: no x >= 0 solves A x = b.
inline bool is_farkas_certificate(const LpProblem& p, const std::vector<Rational>& y) {
  if (y.size() != p.num_rows()) return false;
  for (std::size_t j = 0; j < p.num_vars(); ++j)
    if (detail::column_dot(p, j, y).sign() < 0) return false;
  return detail::dot(p.rhs, y).sign() < 0;
}

/// d >= 0, A d = 0, c.d > 0.
inline bool is_improving_ray(const LpProblem& p, const std::vector<Rational>& d) {
  if (d.size() != p.num_vars()) return false;
  for (const auto& v : d)
    if (v.sign() < 0) return false;
  for (std::size_t i = 0; i < p.num_rows(); ++i)
    if (!detail::dot(p.matrix[i], d).is_zero()) return false;
  return detail::dot(p.objective, d).sign() > 0;
}

/// Checks every claim an LpSolution makes about p.
inline bool certifies(const LpProblem& p, const LpSolution& s) {
  switch (s.status) {
    case LpStatus::optimal:
      return is_primal_feasible(p, s.primal) && detail::dot(p.objective, s.primal) == s.value &&
             is_dual_feasible(p, s.dual) && detail::dot(p.rhs, s.dual) == s.value;
    case LpStatus::infeasible: return is_farkas_certificate(p, s.dual);
    case LpStatus::unbounded: return is_improving_ray(p, s.ray);
  }
  return false;
}

// ---------------------------------------------------------------------------

namespace detail {

class Tableau {
 public:
  Tableau(const LpProblem& p, const SolveOptions& opt) : problem_(p), opt_(opt), n_(p.num_vars()), m_(p.num_rows()) {
    width_ = n_ + m_ + 1;
    rows_.assign(m_, std::vector<Rational>(width_));
    sign_.assign(m_, 1);
    basis_.resize(m_);
    origin_.resize(m_);
    cost_.assign(n_ + m_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      sign_[i] = p.rhs[i].sign() < 0 ? -1 : 1;
      auto& row = rows_[i];
      for (std::size_t j = 0; j < n_; ++j)
        if (!p.matrix[i][j].is_zero()) row[j] = sign_[i] < 0 ? Rational(-p.matrix[i][j]) : p.matrix[i][j];
      row[n_ + i] = 1;
      row[width_ - 1] = sign_[i] < 0 ? Rational(-p.rhs[i]) : p.rhs[i];
      basis_[i] = n_ + i;
      origin_[i] = i;
    }
  }

  LpSolution solve(bool phase_one_only) {
    zero_objective_ = phase_one_only;
    LpSolution out;
    // Phase one: maximize -sum(artificials).
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j)
        if (!rows_[i][j].is_zero()) cost_[j] += rows_[i][j];
      z_ -= rows_[i][width_ - 1];
    }
    std::size_t stuck = 0;
    if (!iterate(stuck)) throw InternalError("phase one reported unbounded");
    out.pivots = pivots_;
    if (z_.sign() < 0) {
      out.status = LpStatus::infeasible;
      out.dual.assign(m_, Rational(0));
      for (std::size_t i = 0; i < m_; ++i) {
        Rational y = -1 - cost_[n_ + i];
        out.dual[i] = sign_[i] < 0 ? Rational(-y) : y;
      }
      return finish(std::move(out));
    }
    drive_out_artificials();

    // Phase two on the original objective (all zeros for a pure feasibility check).
    for (std::size_t j = 0; j < n_ + m_; ++j) cost_[j] = (j < n_ && !phase_one_only) ? problem_.objective[j] : Rational(0);
    z_ = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rational& cb = cost_of(basis_[r], phase_one_only);
      if (cb.is_zero()) continue;
      const auto& row = rows_[r];
      for (std::size_t j = 0; j < n_ + m_; ++j)
        if (!row[j].is_zero()) cost_[j] -= cb * row[j];
      z_ += cb * row[width_ - 1];
    }
    std::size_t entering = 0;
    const bool bounded = iterate(entering);
    out.pivots = pivots_;
    if (!bounded) {
      out.status = LpStatus::unbounded;
      out.ray.assign(n_, Rational(0));
      out.ray[entering] = 1;
      for (std::size_t r = 0; r < rows_.size(); ++r) out.ray[basis_[r]] = -rows_[r][entering];
      return finish(std::move(out));
    }
    out.status = LpStatus::optimal;
    out.value = z_;
    out.primal.assign(n_, Rational(0));
    for (std::size_t r = 0; r < rows_.size(); ++r) out.primal[basis_[r]] = rows_[r][width_ - 1];
    out.dual.assign(m_, Rational(0));
    for (std::size_t i = 0; i < m_; ++i) {
      Rational y = -cost_[n_ + i];
      out.dual[i] = sign_[i] < 0 ? Rational(-y) : y;
    }
    return finish(std::move(out));
  }

 private:
  const Rational& cost_of(std::size_t var, bool zero_objective) const {
    static const Rational zero = 0;
    return (var < n_ && !zero_objective) ? problem_.objective[var] : zero;
  }

  LpSolution finish(LpSolution s) const {
    const bool ok = (zero_objective_ && s.status == LpStatus::optimal) ? is_primal_feasible(problem_, s.primal)
                                                                        : certifies(problem_, s);
    if (!ok) throw InternalError(std::string("simplex result failed exact re-verification (") + to_string(s.status) + ")");
    return s;
  }

  // Runs Bland pivots until no structural column has positive reduced cost.
  // Returns false (with the entering column) when that column is unbounded.
  bool iterate(std::size_t& unbounded_col) {
    for (;;) {
      std::size_t e = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (cost_[j].sign() > 0) {
          e = j;
          break;
        }
      if (e == n_) return true;
      std::size_t leave = rows_.size();
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Rational& a = rows_[r][e];
        if (a.sign() <= 0) continue;
        if (leave == rows_.size()) {
          leave = r;
          continue;
        }
        // Compare rhs_r / a against rhs_leave / a_leave without dividing.
        Rational lhs = rows_[r][width_ - 1] * rows_[leave][e];
        Rational rhs = rows_[leave][width_ - 1] * a;
        if (lhs < rhs || (lhs == rhs && basis_[r] < basis_[leave])) leave = r;
      }
      if (leave == rows_.size()) {
        unbounded_col = e;
        return false;
      }
      pivot(leave, e);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    if (++pivots_ > opt_.max_pivots) throw BudgetExceeded("simplex exceeded " + std::to_string(opt_.max_pivots) + " pivots");
    auto& prow = rows_[r];
    const Rational inv = 1 / prow[e];
    nonzero_.clear();
    for (std::size_t j = 0; j < width_; ++j)
      if (!prow[j].is_zero()) {
        if (j != e) prow[j] *= inv;
        nonzero_.push_back(j);
      }
    prow[e] = 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][e].is_zero()) continue;
      auto& row = rows_[i];
      const Rational f = row[e];
      for (std::size_t j : nonzero_) row[j] -= f * prow[j];
    }
    if (!cost_[e].is_zero()) {
      const Rational f = cost_[e];
      for (std::size_t j : nonzero_)
        if (j + 1 < width_) cost_[j] -= f * prow[j];
      z_ += f * prow[width_ - 1];
    }
    basis_[r] = e;
    if (opt_.check_canonical) {
      for (const auto& row : rows_)
        for (const auto& v : row)
          if (!is_canonical(v)) throw InternalError("non-canonical tableau entry after pivot");
      for (const auto& v : cost_)
        if (!is_canonical(v)) throw InternalError("non-canonical reduced cost after pivot");
    }
  }

  // Artificials still basic after phase one sit at zero. Pivot each onto any
  // structural column with a nonzero entry; rows with none are redundant.
  void drive_out_artificials() {
    std::vector<bool> keep(rows_.size(), true);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (basis_[r] < n_) continue;
      std::size_t col = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (!rows_[r][j].is_zero()) {
          col = j;
          break;
        }
      if (col == n_) keep[r] = false;
      else pivot(r, col);
    }
    std::size_t w = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!keep[r]) continue;
      if (w != r) {
        rows_[w] = std::move(rows_[r]);
        basis_[w] = basis_[r];
        origin_[w] = origin_[r];
      }
      ++w;
    }
    rows_.resize(w);
    basis_.resize(w);
    origin_.resize(w);
  }

  const LpProblem& problem_;
  SolveOptions opt_;
  std::size_t n_, m_, width_ = 0;
  std::vector<std::vector<Rational>> rows_;
  std::vector<Rational> cost_;  // reduced costs; columns n_.. are the artificials
  Rational z_ = 0;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> origin_;
  std::vector<int> sign_;
  std::vector<std::size_t> nonzero_;
  std::size_t pivots_ = 0;
  bool zero_objective_ = false;
};

}  // namespace detail

/// Exact optimum of p, or an exact infeasibility / unboundedness certificate.
inline LpSolution solve(const LpProblem& p, const SolveOptions& opt = {}) {
  p.validate();
  return detail::Tableau(p, opt).solve(false);
}

struct Feasibility {
  bool feasible = false;
  std::vector<Rational> point;   // feasible: A x = b, x >= 0
  std::vector<Rational> farkas;  // infeasible: A^T y >= 0, b.y < 0
};

/// Phase one only: a feasible point or a Farkas certificate.
inline Feasibility check_feasible(const LpProblem& p, const SolveOptions& opt = {}) {
  p.validate();
  LpSolution s = detail::Tableau(p, opt).solve(true);
  if (s.status == LpStatus::infeasible) return {false, {}, std::move(s.dual)};
  return {true, std::move(s.primal), {}};
}

/// Human-readable dump: objective, then one equality per line, rationals as p/q.
inline void write_lp_text(std::ostream& os, const LpProblem& p) {
  auto terms = [&](const std::vector<Rational>& coef) {
    bool first = true;
    for (std::size_t j = 0; j < coef.size(); ++j) {
      if (coef[j].is_zero()) continue;
      os << (first ? "" : " + ") << to_string(coef[j]) << " " << p.labels[j];
      first = false;
    }
    if (first) os << "0";
  };
  os << "maximize: ";
  terms(p.objective);
  os << "\n";
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    os << "r" << (i + 1) << ": ";
    terms(p.matrix[i]);
    os << " = " << to_string(p.rhs[i]) << "\n";
  }
  os << "bounds: all variables >= 0\n";
}

}  // namespace cspgap
