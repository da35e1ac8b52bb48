#include "fairshare/lp.h"

#include <cmath>
#include <cstddef>
#include <limits>

namespace fairshare {

LpSolution maximize_packing(const std::vector<std::vector<double>>& a,
                            const std::vector<double>& b, const std::vector<double>& c) {
  constexpr double kEps = 1e-12;
  const std::size_t m = b.size();
  const std::size_t n = c.size();
  if (a.size() != m) throw LpError("constraint matrix row count differs from rhs size");
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw LpError("constraint matrix column count differs from objective");
    if (!(b[i] >= 0.0)) throw LpError("rhs must be nonnegative");
  }

  // Columns: n structural, m slacks, rhs last. Row m holds the objective
  // row (reduced costs negated).
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  LpSolution sol;
  for (;;) {
    // Bland: lowest-index improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        const double ratio = t[i][width - 1] / t[i][enter];
        if (ratio < best - kEps || (ratio <= best + kEps && leave < m && basis[i] < basis[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
    }
    if (leave == m) throw LpError("objective is unbounded");

    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    ++sol.pivots;
  }

  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = std::max(t[i][width - 1], 0.0);
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.value += c[j] * sol.x[j];
  return sol;
}

}  // namespace fairshare
