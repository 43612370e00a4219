#pragma once
// Brute-force LP oracle: enumerates every basic solution of A x = b and keeps
// the best feasible one. It shares no code with the simplex tableau and exists
// to cross-check solve() on small problems.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cspgap/lp.hpp"

namespace cspgap {

struct OracleResult {
  LpStatus status = LpStatus::infeasible;
  Rational value;  // optimal only
};

namespace detail {

struct ReducedSystem {
  std::vector<std::vector<Rational>> rows;  // linearly independent
  std::vector<Rational> rhs;
  bool consistent = true;
};

// Gauss-Jordan on [A | b]; drops dependent rows and flags inconsistency.
inline ReducedSystem reduce_rows(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b,
                                 std::size_t cols) {
  std::vector<std::vector<Rational>> m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto row = a[i];
    row.push_back(b[i]);
    m.push_back(std::move(row));
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c].is_zero()) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[rank], m[piv]);
    Rational inv = 1 / m[rank][c];
    for (auto& v : m[rank]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == rank || m[i][c].is_zero()) continue;
      Rational f = m[i][c];
      for (std::size_t j = 0; j <= cols; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  ReducedSystem out;
  for (std::size_t i = rank; i < m.size(); ++i)
    if (!m[i][cols].is_zero()) out.consistent = false;
  for (std::size_t i = 0; i < rank; ++i) {
    out.rhs.push_back(m[i][cols]);
    m[i].pop_back();
    out.rows.push_back(std::move(m[i]));
  }
  return out;
}

// Solves the square system rows[:, cols] x = rhs; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_square(const ReducedSystem& sys, const std::vector<std::size_t>& cols) {
  const std::size_t r = cols.size();
  std::vector<std::vector<Rational>> m(r, std::vector<Rational>(r + 1));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) m[i][j] = sys.rows[i][cols[j]];
    m[i][r] = sys.rhs[i];
  }
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t piv = c;
    while (piv < r && m[piv][c].is_zero()) ++piv;
    if (piv == r) return std::nullopt;
    std::swap(m[c], m[piv]);
    Rational inv = 1 / m[c][c];
    for (auto& v : m[c]) v *= inv;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == c || m[i][c].is_zero()) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j <= r; ++j) m[i][j] -= f * m[c][j];
    }
  }
  std::vector<Rational> x(r);
  for (std::size_t i = 0; i < r; ++i) x[i] = m[i][r];
  return x;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    if (r > UINT64_MAX / (n - k + i)) return UINT64_MAX;
    r = r * (n - k + i) / i;
  }
  return r;
}

// Calls visit(x) for every basic feasible solution of {rows x = rhs, x >= 0}.
inline void for_each_bfs(const ReducedSystem& sys, std::size_t cols, std::uint64_t budget,
                         const std::function<void(const std::vector<Rational>&)>& visit) {
  const std::size_t r = sys.rows.size();
  if (binomial(cols, r) > budget)
    throw BudgetExceeded("vertex enumeration needs C(" + std::to_string(cols) + ", " + std::to_string(r) +
                         ") bases, budget is " + std::to_string(budget));
  if (r > cols) return;
  std::vector<std::size_t> pick(r);
  for (std::size_t i = 0; i < r; ++i) pick[i] = i;
  for (;;) {
    if (auto xs = solve_square(sys, pick)) {
      bool nonneg = true;
      for (const auto& v : *xs)
        if (v.sign() < 0) nonneg = false;
      if (nonneg) {
        std::vector<Rational> x(cols);
        for (std::size_t i = 0; i < r; ++i) x[pick[i]] = (*xs)[i];
        visit(x);
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = r;
    while (i > 0 && pick[i - 1] == cols - r + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace detail

/// Optimum by exhaustive basis enumeration. Unboundedness is detected by
/// enumerating the vertices of the normalized recession cone
/// {A d = 0, sum d = 1, d >= 0} and looking for one with c.d > 0.
inline OracleResult vertex_enum_oracle(const LpProblem& p, std::uint64_t budget = 5'000'000) {
  p.validate();
  const std::size_t n = p.num_vars();
  auto sys = detail::reduce_rows(p.matrix, p.rhs, n);
  if (!sys.consistent) return {LpStatus::infeasible, 0};

  std::optional<Rational> best;
  detail::for_each_bfs(sys, n, budget, [&](const std::vector<Rational>& x) {
    Rational v = detail::dot(p.objective, x);
    if (!best || v > *best) best = v;
  });
  if (!best) return {LpStatus::infeasible, 0};

  auto cone_rows = p.matrix;
  auto cone_rhs = std::vector<Rational>(p.num_rows(), Rational(0));
  cone_rows.emplace_back(n, Rational(1));
  cone_rhs.emplace_back(1);
  auto cone = detail::reduce_rows(cone_rows, cone_rhs, n);
  bool unbounded = false;
  if (cone.consistent)
    detail::for_each_bfs(cone, n, budget, [&](const std::vector<Rational>& d) {
      if (detail::dot(p.objective, d).sign() > 0) unbounded = true;
    });
  if (unbounded) return {LpStatus::unbounded, 0};
  return {LpStatus::optimal, *best};
}

}  // namespace cspgap
