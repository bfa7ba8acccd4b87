#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "access_sudoku/grid.hpp"

namespace access_sudoku::detail {

/// Knuth's Algorithm X over a toroidal doubly linked sparse matrix.
///
/// Nodes live in one vector and link by index. Column headers occupy indices
/// 0..columns, with 0 as the root.
class DancingLinks {
 public:
  explicit DancingLinks(int columns) : columns_(columns) {
    nodes_.resize(static_cast<std::size_t>(columns + 1));
    size_.assign(static_cast<std::size_t>(columns + 1), 0);
    for (int i = 0; i <= columns; ++i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      n.left = i == 0 ? columns : i - 1;
      n.right = i == columns ? 0 : i + 1;
      n.up = n.down = n.column = i;
    }
  }

  /// Appends a matrix row with 1s in the given (1-based) columns.
  void add_row(const std::vector<int>& cols) {
    int first = -1;
    for (int c : cols) {
      const int idx = static_cast<int>(nodes_.size());
      Node n;
      n.column = c;
      n.up = node(c).up;
      n.down = c;
      nodes_.push_back(n);
      node(node(c).up).down = idx;
      node(c).up = idx;
      ++size_[static_cast<std::size_t>(c)];
      if (first < 0) {
        first = idx;
        node(idx).left = node(idx).right = idx;
      } else {
        node(idx).right = first;
        node(idx).left = node(first).left;
        node(node(first).left).right = idx;
        node(first).left = idx;
      }
    }
  }

  /// Removes a column (and every row through it) from the active matrix.
  void cover(int c) {
    node(node(c).right).left = node(c).left;
    node(node(c).left).right = node(c).right;
    for (int i = node(c).down; i != c; i = node(i).down) {
      for (int j = node(i).right; j != i; j = node(j).right) {
        node(node(j).down).up = node(j).up;
        node(node(j).up).down = node(j).down;
        --size_[static_cast<std::size_t>(node(j).column)];
      }
    }
  }

  void uncover(int c) {
    for (int i = node(c).up; i != c; i = node(i).up) {
      for (int j = node(i).left; j != i; j = node(j).left) {
        ++size_[static_cast<std::size_t>(node(j).column)];
        node(node(j).down).up = j;
        node(node(j).up).down = j;
      }
    }
    node(node(c).right).left = c;
    node(node(c).left).right = c;
  }

  /// Number of exact covers, stopping once `cap` have been seen. Returns
  /// std::nullopt if the search visits more than `node_budget` nodes.
  std::optional<std::uint64_t> count(std::uint64_t cap, std::uint64_t node_budget = UINT64_MAX) {
    std::uint64_t found = 0;
    budget_ = node_budget;
    search(cap, found);
    if (budget_exhausted_) return std::nullopt;
    return found;
  }

 private:
  struct Node {
    int left = 0, right = 0, up = 0, down = 0, column = 0;
  };

  Node& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }

  void search(std::uint64_t cap, std::uint64_t& found) {
    if (budget_ == 0) {
      budget_exhausted_ = true;
      return;
    }
    --budget_;
    if (node(0).right == 0) {
      ++found;
      return;
    }
    // Smallest column first.
    int best = node(0).right;
    for (int c = node(best).right; c != 0; c = node(c).right)
      if (size_[static_cast<std::size_t>(c)] < size_[static_cast<std::size_t>(best)]) best = c;
    if (size_[static_cast<std::size_t>(best)] == 0) return;

    cover(best);
    for (int r = node(best).down; r != best && found < cap && !budget_exhausted_; r = node(r).down) {
      for (int j = node(r).right; j != r; j = node(j).right) cover(node(j).column);
      search(cap, found);
      for (int j = node(r).left; j != r; j = node(j).left) uncover(node(j).column);
    }
    uncover(best);
  }

  int columns_;
  std::uint64_t budget_ = 0;
  bool budget_exhausted_ = false;
  std::vector<Node> nodes_;
  std::vector<int> size_;
};

/// Counts completions of `g` as exact covers of the cell / row-value /
/// column-value / box-value constraints. Filled cells cover their
/// constraints up front.
inline std::optional<std::uint64_t> count_exact_covers(const Grid& g, std::uint64_t cap,
                                                       std::uint64_t node_budget = UINT64_MAX) {
  const int n = g.side();
  const int nn = n * n;
  // Column ids (1-based): cell, row-value, col-value, box-value blocks of n*n each.
  auto cell_col = [&](int r, int c) { return 1 + r * n + c; };
  auto row_col = [&](int r, int v) { return 1 + nn + r * n + v; };
  auto colv_col = [&](int c, int v) { return 1 + 2 * nn + c * n + v; };
  auto box_col = [&](int b, int v) { return 1 + 3 * nn + b * n + v; };

  DancingLinks dlx(4 * nn);
  std::vector<char> taken(static_cast<std::size_t>(4 * nn + 1), 0);
  for (std::size_t i = 0; i < g.cells().size(); ++i) {
    const Entry& e = g.cells()[i];
    if (e.is_empty()) continue;
    const Position p = g.position_of(i);
    const int r = p.row - 1, c = p.col - 1, b = g.box_of(p), v = e.value - 1;
    for (int col : {cell_col(r, c), row_col(r, v), colv_col(c, v), box_col(b, v)}) {
      if (taken[static_cast<std::size_t>(col)]) return 0;
      taken[static_cast<std::size_t>(col)] = 1;
    }
  }
  for (std::size_t i = 0; i < g.cells().size(); ++i) {
    if (!g.cells()[i].is_empty()) continue;
    const Position p = g.position_of(i);
    const int r = p.row - 1, c = p.col - 1, b = g.box_of(p);
    for (int v = 0; v < n; ++v) {
      const std::vector<int> cols{cell_col(r, c), row_col(r, v), colv_col(c, v), box_col(b, v)};
      bool free = true;
      for (int col : cols) free = free && !taken[static_cast<std::size_t>(col)];
      if (free) dlx.add_row(cols);
    }
  }
  // Constraints already met by the givens drop out of the matrix.
  for (int col = 1; col <= 4 * nn; ++col)
    if (taken[static_cast<std::size_t>(col)]) dlx.cover(col);
  return dlx.count(cap, node_budget);
}

}  // namespace access_sudoku::detail
