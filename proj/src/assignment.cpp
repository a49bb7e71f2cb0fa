#include "aspecteval/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aspecteval {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path core. Requires nr <= nc and finite costs.
// Returns col4row: the assigned column for every row.
std::vector<int> sap_core(int nr, int nc, const std::vector<double>& cost) {
  std::vector<double> u(nr, 0.0);
  std::vector<double> v(nc, 0.0);
  std::vector<double> shortest(nc);
  std::vector<int> path(nc, -1);
  std::vector<int> col4row(nr, -1);
  std::vector<int> row4col(nc, -1);
  std::vector<char> seen_row(nr);
  std::vector<char> seen_col(nc);
  std::vector<int> remaining(nc);

  for (int cur_row = 0; cur_row < nr; ++cur_row) {
    std::fill(seen_row.begin(), seen_row.end(), 0);
    std::fill(seen_col.begin(), seen_col.end(), 0);
    std::fill(shortest.begin(), shortest.end(), kInf);
    for (int j = 0; j < nc; ++j) remaining[j] = j;
    int num_remaining = nc;

    double min_val = 0.0;
    int i = cur_row;
    int sink = -1;
    while (sink == -1) {
      seen_row[i] = 1;
      int index = -1;
      double lowest = kInf;
      for (int it = 0; it < num_remaining; ++it) {
        int j = remaining[it];
        double reduced = min_val + cost[static_cast<size_t>(i) * nc + j] - u[i] - v[j];
        if (reduced < shortest[j]) {
          path[j] = i;
          shortest[j] = reduced;
        }
        // Prefer unassigned columns on ties so augmenting paths stay short.
        if (shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == -1)) {
          lowest = shortest[j];
          index = it;
        }
      }
      min_val = lowest;
      int j = remaining[index];
      if (row4col[j] == -1) {
        sink = j;
      } else {
        i = row4col[j];
      }
      seen_col[j] = 1;
      remaining[index] = remaining[--num_remaining];
    }

    u[cur_row] += min_val;
    for (int ip = 0; ip < nr; ++ip) {
      if (seen_row[ip] && ip != cur_row) u[ip] += min_val - shortest[col4row[ip]];
    }
    for (int jp = 0; jp < nc; ++jp) {
      if (seen_col[jp]) v[jp] -= min_val - shortest[jp];
    }

    int j = sink;
    while (true) {
      int ip = path[j];
      row4col[j] = ip;
      std::swap(col4row[ip], j);
      if (ip == cur_row) break;
    }
  }
  return col4row;
}

// Minimal total over maximum-cardinality assignments of the submatrix formed
// by rows [row_begin, rows) and the given column subset. Total is the sum of
// chosen entries in row order.
double sub_min_total(const CostMatrix& cost, int row_begin, const std::vector<int>& cols) {
  const int nr = cost.rows - row_begin;
  const int nc = static_cast<int>(cols.size());
  if (nr == 0 || nc == 0) return 0.0;

  std::vector<double> sub;
  std::vector<int> assignment;
  if (nr <= nc) {
    sub.resize(static_cast<size_t>(nr) * nc);
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c) sub[static_cast<size_t>(r) * nc + c] = cost.at(row_begin + r, cols[c]);
    std::vector<int> col4row = sap_core(nr, nc, sub);
    double total = 0.0;
    for (int r = 0; r < nr; ++r) total += cost.at(row_begin + r, cols[col4row[r]]);
    return total;
  }
  // Transposed: columns become rows.
  sub.resize(static_cast<size_t>(nc) * nr);
  for (int c = 0; c < nc; ++c)
    for (int r = 0; r < nr; ++r) sub[static_cast<size_t>(c) * nr + r] = cost.at(row_begin + r, cols[c]);
  std::vector<int> row4colsub = sap_core(nc, nr, sub);
  // Re-sum in row order so totals compare consistently everywhere.
  std::vector<std::pair<int, int>> picked;
  picked.reserve(nc);
  for (int c = 0; c < nc; ++c) picked.emplace_back(row_begin + row4colsub[c], cols[c]);
  std::sort(picked.begin(), picked.end());
  double total = 0.0;
  for (const auto& [r, c] : picked) total += cost.at(r, c);
  return total;
}

Pairing initial_solution(const CostMatrix& cost) {
  Pairing result;
  if (cost.rows <= cost.cols) {
    std::vector<int> col4row = sap_core(cost.rows, cost.cols, cost.entries);
    for (int r = 0; r < cost.rows; ++r) result.pairs.emplace_back(r, col4row[r]);
  } else {
    std::vector<double> t(static_cast<size_t>(cost.cols) * cost.rows);
    for (int c = 0; c < cost.cols; ++c)
      for (int r = 0; r < cost.rows; ++r) t[static_cast<size_t>(c) * cost.rows + r] = cost.at(r, c);
    std::vector<int> row4col = sap_core(cost.cols, cost.rows, t);
    for (int c = 0; c < cost.cols; ++c) result.pairs.emplace_back(row4col[c], c);
    std::sort(result.pairs.begin(), result.pairs.end());
  }
  for (const auto& [r, c] : result.pairs) result.total_cost += cost.at(r, c);
  return result;
}

}  // namespace

Pairing solve_assignment(const CostMatrix& cost) {
  if (cost.rows < 1 || cost.cols < 1) {
    throw Error(Error::Kind::invalid_config, "cost matrix must have at least one row and one column");
  }
  for (double e : cost.entries) {
    if (!std::isfinite(e)) {
      throw Error(Error::Kind::non_finite_cost, "cost matrix contains a non-finite entry");
    }
  }

  Pairing initial = initial_solution(cost);
  const double optimum = initial.total_cost;
  const double eps = 1e-12 * std::max(1.0, std::fabs(optimum));
  const int cardinality = std::min(cost.rows, cost.cols);

  // Rebuild the pairing greedily, taking at each position the smallest
  // (row, col) whose best completion still reaches the optimal total.
  Pairing refined;
  std::vector<char> col_used(cost.cols, 0);
  double prefix = 0.0;
  int row_start = 0;
  for (int remaining = cardinality; remaining > 0; --remaining) {
    bool placed = false;
    for (int r = row_start; r <= cost.rows - remaining && !placed; ++r) {
      for (int c = 0; c < cost.cols && !placed; ++c) {
        if (col_used[c]) continue;
        double t = prefix + cost.at(r, c);
        if (remaining > 1) {
          std::vector<int> free_cols;
          free_cols.reserve(cost.cols);
          for (int j = 0; j < cost.cols; ++j)
            if (!col_used[j] && j != c) free_cols.push_back(j);
          t += sub_min_total(cost, r + 1, free_cols);
        }
        if (t <= optimum + eps) {
          refined.pairs.emplace_back(r, c);
          col_used[c] = 1;
          prefix += cost.at(r, c);
          row_start = r + 1;
          placed = true;
        }
      }
    }
    if (!placed) return initial;  // numerical dead end; keep the direct solution
  }
  refined.total_cost = prefix;
  return refined;
}

}  // namespace aspecteval
