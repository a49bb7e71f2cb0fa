#pragma once

#include <utility>
#include <vector>

#include "aspecteval/error.hpp"

namespace aspecteval {

// Dense rectangular cost matrix, row-major.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;

  static CostMatrix zeros(int rows, int cols) {
    return CostMatrix{rows, cols, std::vector<double>(static_cast<size_t>(rows) * cols, 0.0)};
  }

  double& at(int r, int c) { return entries[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return entries[static_cast<size_t>(r) * cols + c]; }
};

// One-to-one pairing of rows to columns; |pairs| = min(rows, cols).
struct Pairing {
  std::vector<std::pair<int, int>> pairs;  // sorted by row index
  double total_cost = 0.0;                 // sum of chosen entries in row order
};

// Exact minimum-cost rectangular assignment via shortest augmenting paths.
// Among equal-cost optima the lexicographically smallest pairing is returned
// (ties detected at 1e-12 relative tolerance; totals closer than that are
// treated as equal). Throws Error{non_finite_cost} on NaN/inf entries and
// Error{invalid_config} on empty dimensions.
Pairing solve_assignment(const CostMatrix& cost);

}  // namespace aspecteval
