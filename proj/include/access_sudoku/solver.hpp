#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "access_sudoku/dlx.hpp"
#include "access_sudoku/grid.hpp"

namespace access_sudoku {

namespace detail {

/// Bitmask backtracking search shared by solve() and count_solutions().
///
/// Cell choice is minimum-remaining-values with a row-major tie-break and
/// candidates are tried in ascending order, so the first completion found is
/// fully determined by the input grid.
class BitSearch {
 public:
  using Mask = std::uint32_t;  // bit v-1 set => value v used; 25 bits cover order 5

  explicit BitSearch(const Grid& g) : order_(g.order()), side_(g.side()) {
    rows_.assign(static_cast<std::size_t>(side_), 0);
    cols_.assign(static_cast<std::size_t>(side_), 0);
    boxes_.assign(static_cast<std::size_t>(side_), 0);
    values_.assign(static_cast<std::size_t>(side_ * side_), 0);
    for (std::size_t i = 0; i < g.cells().size(); ++i) {
      const Entry& e = g.cells()[i];
      if (e.is_empty()) {
        empties_.push_back(static_cast<int>(i));
        continue;
      }
      const Mask bit = Mask{1} << (e.value - 1);
      const int r = static_cast<int>(i) / side_, c = static_cast<int>(i) % side_, b = box(r, c);
      if ((rows_[r] | cols_[c] | boxes_[b]) & bit) consistent_ = false;
      rows_[r] |= bit;
      cols_[c] |= bit;
      boxes_[b] |= bit;
      values_[i] = e.value;
    }
    full_ = (Mask{1} << side_) - 1;
  }

  bool consistent() const { return consistent_; }

  /// Visits completions in search order; visitor returns false to stop.
  template <typename Visitor>
  void enumerate(Visitor&& visit) {
    if (!consistent_) return;
    bool stop = false;
    search(0, visit, stop);
  }

  const std::vector<int>& values() const { return values_; }

 private:
  int box(int r, int c) const { return (r / order_) * order_ + c / order_; }

  template <typename Visitor>
  void search(std::size_t depth, Visitor& visit, bool& stop) {
    if (depth == empties_.size()) {
      if (!visit(values_)) stop = true;
      return;
    }
    // MRV among the unfilled tail of empties_; ties resolved by lowest cell index (row-major).
    std::size_t best = depth;
    int best_count = std::numeric_limits<int>::max();
    int best_cell = std::numeric_limits<int>::max();
    Mask best_cand = 0;
    for (std::size_t k = depth; k < empties_.size(); ++k) {
      const int cell = empties_[k];
      const Mask cand = candidates(cell);
      const int cnt = std::popcount(cand);
      if (cnt < best_count || (cnt == best_count && cell < best_cell)) {
        best = k;
        best_count = cnt;
        best_cell = cell;
        best_cand = cand;
        if (cnt == 0) return;
      }
    }
    std::swap(empties_[depth], empties_[best]);
    const int cell = empties_[depth];
    const int r = cell / side_, c = cell % side_, b = box(r, c);
    for (Mask cand = best_cand; cand && !stop; cand &= cand - 1) {
      const Mask bit = cand & (~cand + 1);
      rows_[r] |= bit;
      cols_[c] |= bit;
      boxes_[b] |= bit;
      values_[static_cast<std::size_t>(cell)] = std::countr_zero(bit) + 1;
      search(depth + 1, visit, stop);
      rows_[r] &= ~bit;
      cols_[c] &= ~bit;
      boxes_[b] &= ~bit;
      values_[static_cast<std::size_t>(cell)] = 0;
    }
    std::swap(empties_[depth], empties_[best]);
  }

  Mask candidates(int cell) const {
    const int r = cell / side_, c = cell % side_;
    return full_ & ~(rows_[r] | cols_[c] | boxes_[box(r, c)]);
  }

  int order_;
  int side_;
  Mask full_ = 0;
  bool consistent_ = true;
  std::vector<Mask> rows_, cols_, boxes_;
  std::vector<int> values_;
  std::vector<int> empties_;
};

}  // namespace detail

/// Completes `g` treating every filled cell (clue or user) as a given.
/// Returns std::nullopt when the givens already clash or no completion exists.
/// Filled-in cells are written as User entries; existing entries keep their kind.
inline std::optional<Grid> solve(const Grid& g) {
  detail::BitSearch search(g);
  std::optional<Grid> out;
  search.enumerate([&](const std::vector<int>& values) {
    Grid solved = g;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (g.cells()[i].is_empty()) solved.set(g.position_of(i), Entry::user(values[i]));
    }
    out = std::move(solved);
    return false;
  });
  return out;
}

inline constexpr std::uint64_t kUnboundedCap = std::numeric_limits<std::uint64_t>::max();

/// min(cap, number of completions of `g`), by exact cover (see dlx.hpp).
inline std::uint64_t count_solutions(const Grid& g, std::uint64_t cap) {
  if (cap == 0) throw std::invalid_argument("count_solutions: cap must be >= 1");
  return *detail::count_exact_covers(g, cap);
}

}  // namespace access_sudoku
