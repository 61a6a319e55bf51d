#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "graphtune/error.hpp"

namespace graphtune {

/// Dense rectangular cost table. Infinite cells are forbidden pairings.
class CostTable {
 public:
  static constexpr double forbidden = std::numeric_limits<double>::infinity();

  CostTable() = default;
  CostTable(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostTable(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols_) throw Error(ErrorCode::InvalidArgument, "ragged cost table");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  bool allowed(std::size_t r, std::size_t c) const { return std::isfinite((*this)(r, c)); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  /// (row, col) pairs in increasing row order.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
};

enum class Coverage {
  /// Every row (or every column, whichever is fewer) must be assigned.
  Full,
  /// As many feasible pairs as possible, then minimum cost among those.
  Maximal,
};

namespace detail {

// Kuhn-Munkres on a square matrix with potentials, O(n^3). Returns the
// column assigned to each row. Among equal reductions the lowest column
// index wins, which makes the result deterministic.
inline std::vector<std::size_t> solve_square(const std::vector<double>& a, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

/// Minimum-cost injective assignment over a rectangular table. Forbidden
/// cells are replaced by a penalty larger than any finite cost spread, so the
/// solver maximizes the number of feasible pairs before minimizing cost.
inline Assignment hungarian_assign(const CostTable& costs, Coverage coverage = Coverage::Full) {
  const auto rows = costs.rows();
  const auto cols = costs.cols();
  Assignment result;
  if (rows == 0 || cols == 0) return result;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = costs(r, c);
      if (std::isnan(x) || x == -std::numeric_limits<double>::infinity()) {
        throw Error(ErrorCode::InvalidArgument, "cost table holds NaN or -inf");
      }
      if (std::isfinite(x)) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
  }
  const auto n = std::max(rows, cols);
  const bool any_finite = std::isfinite(lo);
  const double spread = any_finite ? hi - lo : 0.0;
  const double penalty = static_cast<double>(n) * spread + 1.0;

  std::vector<double> square(n * n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      square[r * n + c] = costs.allowed(r, c) ? costs(r, c) - lo : penalty;
    }
  }
  const auto row_to_col = detail::solve_square(square, n);

  const auto needed = std::min(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto c = row_to_col[r];
    if (c >= cols || !costs.allowed(r, c)) continue;
    result.pairs.emplace_back(r, c);
    result.cost += costs(r, c);
  }
  if (coverage == Coverage::Full && result.pairs.size() < needed) {
    throw Error(ErrorCode::Infeasible, "no assignment covers every row/column with allowed cells");
  }
  return result;
}

}  // namespace graphtune
