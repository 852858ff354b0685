#pragma once

#include <cstddef>
#include <vector>

namespace apimig {

/// Minimum-cost assignment (Hungarian algorithm, O(n^3)). `cost[i][j]` is
/// the cost of assigning row i to column j; the matrix may be rectangular.
/// Returns for each row the assigned column, or -1 when unassigned (more
/// rows than columns).
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace apimig
