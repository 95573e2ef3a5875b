#ifndef SIEVELAB_LINPROG_HPP
#define SIEVELAB_LINPROG_HPP

#include <vector>

#include "sievelab/numeric.hpp"

namespace sievelab {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Rational objective;
  std::vector<Rational> solution;
};

// Dense two-phase simplex over exact rationals with Bland's rule.
class Simplex {
 public:
  // maximize c.z subject to A z <= b, z >= 0
  static LpResult maximize(const std::vector<std::vector<Rational>>& a,
                           const std::vector<Rational>& b,
                           const std::vector<Rational>& c) {
    return run(a, b, c, /*equalities=*/false);
  }

  // basic feasible point of { A z = b, z >= 0 }; zero objective
  static LpResult feasible_point(const std::vector<std::vector<Rational>>& a,
                                 const std::vector<Rational>& b) {
    std::vector<Rational> c(a.empty() ? 0 : a[0].size(), Rational(0));
    return run(a, b, c, /*equalities=*/true);
  }

 private:
  static LpResult run(const std::vector<std::vector<Rational>>& a,
                      const std::vector<Rational>& b,
                      const std::vector<Rational>& c, bool equalities) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    const std::size_t n_slack = equalities ? 0 : m;
    const std::size_t n_art = m;
    const std::size_t cols = n + n_slack + n_art;

    // rows: m constraint rows and one objective row; last column is rhs
    std::vector<std::vector<Rational>> t(m + 1,
                                         std::vector<Rational>(cols + 1));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
      bool neg = b[i] < 0;
      for (std::size_t j = 0; j < n; ++j) t[i][j] = neg ? -a[i][j] : a[i][j];
      t[i][cols] = neg ? -b[i] : b[i];
      if (!equalities) t[i][n + i] = neg ? Rational(-1) : Rational(1);
      t[i][n + n_slack + i] = 1;
      basis[i] = n + n_slack + i;
    }

    // phase 1: maximize -(sum of artificials); reduced costs of the basic
    // artificial columns stay zero
    auto art_begin = n + n_slack;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= cols; ++j)
        if (j < art_begin || j == cols) t[m][j] += t[i][j];
    if (!pivot_loop(t, basis, cols, art_begin)) {
      // phase-1 objective is bounded by construction
      return {LpResult::Status::infeasible, Rational(0), {}};
    }
    if (t[m][cols] != 0) return {LpResult::Status::infeasible, Rational(0), {}};

    // drive leftover artificials out of the basis
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < art_begin) continue;
      std::size_t enter = cols;
      for (std::size_t j = 0; j < art_begin; ++j)
        if (t[i][j] != 0) {
          enter = j;
          break;
        }
      if (enter == cols) continue;  // redundant row
      pivot(t, basis, i, enter, cols);
    }

    // phase 2
    for (std::size_t j = 0; j <= cols; ++j) t[m][j] = 0;
    for (std::size_t j = 0; j < n; ++j) t[m][j] = c[j];
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] >= art_begin || t[m][basis[i]] == 0) continue;
      Rational f = t[m][basis[i]];
      for (std::size_t j = 0; j <= cols; ++j) t[m][j] -= f * t[i][j];
    }
    if (!pivot_loop(t, basis, cols, art_begin))
      return {LpResult::Status::unbounded, Rational(0), {}};

    LpResult out;
    out.status = LpResult::Status::optimal;
    out.solution.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) out.solution[basis[i]] = t[i][cols];
    out.objective = Rational(0);
    for (std::size_t j = 0; j < n; ++j)
      out.objective += c[j] * out.solution[j];
    return out;
  }

  // Bland's rule; entering columns restricted to [0, col_limit).
  // Returns false on unboundedness.
  static bool pivot_loop(std::vector<std::vector<Rational>>& t,
                         std::vector<std::size_t>& basis, std::size_t cols,
                         std::size_t col_limit) {
    const std::size_t m = basis.size();
    for (;;) {
      std::size_t enter = col_limit;
      for (std::size_t j = 0; j < col_limit; ++j)
        if (t[m][j] > 0) {
          enter = j;
          break;
        }
      if (enter == col_limit) return true;
      std::size_t leave = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        if (leave == m) {
          leave = i;
          continue;
        }
        Rational cur = t[i][cols] / t[i][enter];
        Rational best = t[leave][cols] / t[leave][enter];
        if (cur < best || (cur == best && basis[i] < basis[leave])) leave = i;
      }
      if (leave == m) return false;
      pivot(t, basis, leave, enter, cols);
    }
  }

  static void pivot(std::vector<std::vector<Rational>>& t,
                    std::vector<std::size_t>& basis, std::size_t row,
                    std::size_t col, std::size_t cols) {
    const std::size_t m = basis.size();
    Rational inv = t[row][col];
    for (std::size_t j = 0; j <= cols; ++j) t[row][j] /= inv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == row || t[i][col] == 0) continue;
      Rational f = t[i][col];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  }
};

}  // namespace sievelab

#endif  // SIEVELAB_LINPROG_HPP
