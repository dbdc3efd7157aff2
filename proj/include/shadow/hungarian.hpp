#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace shadow {

/// Dense row-major cost matrix.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(int r, int c, double fill = 0.0) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("CostMatrix: ragged rows");
      values.insert(values.end(), row.begin(), row.end());
    }
  }

  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Minimum-cost one-to-one assignment (Kuhn-Munkres with row potentials).
/// Returns, for every row, its assigned column or -1; min(rows, cols) rows
/// are assigned.
inline std::vector<int> hungarian(const CostMatrix& cost) {
  if (cost.rows == 0 || cost.cols == 0) return std::vector<int>(static_cast<std::size_t>(cost.rows), -1);
  for (double v : cost.values) {
    if (!(v >= 0.0)) throw std::invalid_argument("hungarian: costs must be non-negative");
  }
  const bool transposed = cost.rows > cost.cols;
  const int n = transposed ? cost.cols : cost.rows;  // n <= m
  const int m = transposed ? cost.rows : cost.cols;
  const auto a = [&](int i, int j) { return transposed ? cost(j - 1, i - 1) : cost(i - 1, j - 1); };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(cost.rows), -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      assignment[static_cast<std::size_t>(j - 1)] = p[j] - 1;
    } else {
      assignment[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    }
  }
  return assignment;
}

inline double assignment_cost(const CostMatrix& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (int r = 0; r < cost.rows; ++r) {
    if (assignment[static_cast<std::size_t>(r)] >= 0) total += cost(r, assignment[static_cast<std::size_t>(r)]);
  }
  return total;
}

}  // namespace shadow
