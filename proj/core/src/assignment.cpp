#include "apimig/assignment.hpp"

#include <algorithm>
#include <limits>

namespace apimig {

// Potentials-based Hungarian method on a square matrix padded with zeros.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  size_t rows = cost.size();
  size_t cols = rows ? cost[0].size() : 0;
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  size_t n = std::max(rows, cols);
  const double INF = std::numeric_limits<double>::infinity();
  auto at = [&](size_t i, size_t j) -> double {
    return (i < rows && j < cols) ? cost[i][j] : 0.0;
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      size_t i0 = p[j0], j1 = 0;
      double delta = INF;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
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
      size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> result(rows, -1);
  for (size_t j = 1; j <= n; ++j) {
    if (p[j] == 0) continue;
    size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols) result[i] = static_cast<int>(j - 1);
  }
  return result;
}

}  // namespace apimig
