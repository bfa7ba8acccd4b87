#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "access_sudoku/grid.hpp"
#include "access_sudoku/random.hpp"
#include "access_sudoku/solver.hpp"

namespace access_sudoku {

enum class Difficulty { easy, medium, hard };

inline std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::medium: return "medium";
    case Difficulty::hard: return "hard";
  }
  return "easy";
}

inline std::optional<Difficulty> parse_difficulty(std::string_view s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "medium") return Difficulty::medium;
  if (s == "hard") return Difficulty::hard;
  return std::nullopt;
}

/// Clue-count bands, scaled from the 9x9 bands (easy >= 36, medium 30-35, hard 25-29)
/// by a^4 / 81. A band with min > max is empty for that order.
struct ClueBand {
  int min;
  int max;
  bool contains(int n) const { return n >= min && n <= max; }
};

inline ClueBand clue_band(int order, Difficulty d) {
  const double scale = std::pow(static_cast<double>(order), 4) / 81.0;
  const int cells = order * order * order * order;
  const int easy_min = static_cast<int>(std::lround(36 * scale));
  const int medium_min = static_cast<int>(std::lround(30 * scale));
  const int hard_min = static_cast<int>(std::lround(25 * scale));
  switch (d) {
    case Difficulty::easy: return {easy_min, cells};
    case Difficulty::medium: return {medium_min, easy_min - 1};
    case Difficulty::hard: return {hard_min, medium_min - 1};
  }
  return {0, cells};
}

/// True when repeated naked and hidden singles alone complete the grid.
inline bool solvable_by_singles(const Grid& start) {
  const int n = start.side();
  const int a = start.order();
  const std::uint32_t full = (1u << n) - 1;
  std::vector<int> v(start.cells().size());
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(n)),
      boxes(static_cast<std::size_t>(n));
  auto box = [a](int cell, int side) { return ((cell / side) / a) * a + (cell % side) / a; };
  auto put = [&](int cell, int value) {
    const std::uint32_t bit = 1u << (value - 1);
    v[static_cast<std::size_t>(cell)] = value;
    rows[static_cast<std::size_t>(cell / n)] |= bit;
    cols[static_cast<std::size_t>(cell % n)] |= bit;
    boxes[static_cast<std::size_t>(box(cell, n))] |= bit;
  };
  if (!conflicts(start).empty()) return false;
  int empties = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (start.cells()[i].is_empty()) {
      ++empties;
    } else {
      put(static_cast<int>(i), start.cells()[i].value);
    }
  }
  auto candidates = [&](int cell) {
    return full & ~(rows[static_cast<std::size_t>(cell / n)] | cols[static_cast<std::size_t>(cell % n)] |
                    boxes[static_cast<std::size_t>(box(cell, n))]);
  };

  std::vector<std::vector<int>> units;
  for (int u = 0; u < n; ++u) {
    std::vector<int> row, col, bx;
    for (int k = 0; k < n; ++k) {
      row.push_back(u * n + k);
      col.push_back(k * n + u);
      bx.push_back(((u / a) * a + k / a) * n + (u % a) * a + k % a);
    }
    units.push_back(std::move(row));
    units.push_back(std::move(col));
    units.push_back(std::move(bx));
  }

  while (empties > 0) {
    bool progress = false;
    for (int i = 0; i < n * n; ++i) {
      if (v[static_cast<std::size_t>(i)]) continue;
      const std::uint32_t cand = candidates(i);
      if (cand == 0) return false;
      if (std::popcount(cand) == 1) {
        put(i, std::countr_zero(cand) + 1);
        --empties;
        progress = true;
      }
    }
    for (const auto& unit : units) {
      // once: values seen as a candidate in one cell; twice: in two or more.
      std::uint32_t once = 0, twice = 0, placed = 0;
      for (int cell : unit) {
        if (v[static_cast<std::size_t>(cell)]) {
          placed |= 1u << (v[static_cast<std::size_t>(cell)] - 1);
          continue;
        }
        const std::uint32_t cand = candidates(cell);
        twice |= once & cand;
        once |= cand;
      }
      if ((once | placed) != full) return false;
      std::uint32_t single = once & ~twice & ~placed;
      if (!single) continue;
      for (int cell : unit) {
        if (v[static_cast<std::size_t>(cell)]) continue;
        const std::uint32_t hit = candidates(cell) & single;
        if (!hit) continue;
        put(cell, std::countr_zero(hit) + 1);
        single &= ~hit;
        --empties;
        progress = true;
      }
    }
    if (!progress) return false;
  }
  return true;
}

/// Band label a clue grid actually meets. Counts above the medium band that are
/// not singles-solvable report medium; counts below the hard band report hard.
inline Difficulty classify(const Grid& clues) {
  const int order = clues.order();
  const int n = clues.count(EntryKind::clue) + clues.count(EntryKind::user);
  const ClueBand easy = clue_band(order, Difficulty::easy);
  const ClueBand medium = clue_band(order, Difficulty::medium);
  if (n >= easy.min) return solvable_by_singles(clues) ? Difficulty::easy : Difficulty::medium;
  if (n >= medium.min) return Difficulty::medium;
  return Difficulty::hard;
}

struct Puzzle {
  Grid clues;
  Grid solution;  // the completion the clues were carved from, stored as clue entries
  int order = 3;
  Difficulty difficulty = Difficulty::easy;
  std::uint64_t seed = 0;
  int clue_count = 0;

  friend bool operator==(const Puzzle&, const Puzzle&) = default;
};

inline GridFile to_grid_file(const Puzzle& p) {
  return {p.clues, p.seed, std::string(to_string(p.difficulty))};
}

namespace detail {

class RandomFill {
 public:
  RandomFill(int order, Rng& rng) : order_(order), side_(order * order), rng_(rng) {}

  /// Randomized MRV backtracking with a node budget; a run that exceeds the
  /// budget restarts from scratch with the generator's next draws.
  Grid run() {
    for (;;) {
      const auto n = static_cast<std::size_t>(side_);
      rows_.assign(n, 0);
      cols_.assign(n, 0);
      boxes_.assign(n, 0);
      values_.assign(n * n, 0);
      nodes_ = 0;
      if (fill(0)) break;
    }
    Grid g(order_);
    for (std::size_t i = 0; i < values_.size(); ++i) g.set(g.position_of(i), Entry::clue(values_[i]));
    return g;
  }

 private:
  static constexpr long kNodeBudget = 200000;

  int box(int r, int c) const { return (r / order_) * order_ + c / order_; }

  std::uint32_t candidates(int cell) const {
    const int r = cell / side_, c = cell % side_;
    return ((1u << side_) - 1) & ~(rows_[r] | cols_[c] | boxes_[box(r, c)]);
  }

  bool fill(int filled) {
    if (filled == side_ * side_) return true;
    if (++nodes_ > kNodeBudget) return false;
    int best = -1, best_count = 64;
    for (int i = 0; i < side_ * side_; ++i) {
      if (values_[static_cast<std::size_t>(i)]) continue;
      const int cnt = std::popcount(candidates(i));
      if (cnt < best_count) {
        best = i;
        best_count = cnt;
        if (cnt <= 1) break;
      }
    }
    if (best_count == 0) return false;
    std::vector<int> order;
    for (std::uint32_t cand = candidates(best); cand; cand &= cand - 1) order.push_back(std::countr_zero(cand) + 1);
    rng_.shuffle(order);
    const int r = best / side_, c = best % side_, b = box(r, c);
    for (int x : order) {
      const std::uint32_t bit = 1u << (x - 1);
      rows_[r] |= bit;
      cols_[c] |= bit;
      boxes_[b] |= bit;
      values_[static_cast<std::size_t>(best)] = x;
      if (fill(filled + 1)) return true;
      rows_[r] &= ~bit;
      cols_[c] &= ~bit;
      boxes_[b] &= ~bit;
      values_[static_cast<std::size_t>(best)] = 0;
      if (nodes_ > kNodeBudget) return false;
    }
    return false;
  }

  int order_;
  int side_;
  Rng& rng_;
  long nodes_ = 0;
  std::vector<std::uint32_t> rows_, cols_, boxes_;
  std::vector<int> values_;
};

inline Grid random_full_grid(int order, Rng& rng) { return RandomFill(order, rng).run(); }

inline int band_distance(int clues, ClueBand band) {
  if (clues < band.min) return band.min - clues;
  if (clues > band.max) return clues - band.max;
  return 0;
}

}  // namespace detail

/// Fresh solution grids tried before settling for the closest puzzle.
inline int generation_attempts(int order) { return order <= 3 ? 16 : 4; }

/// Search nodes allowed per uniqueness check while carving clues. A check that
/// runs out keeps the clue, so puzzles stay unique; it only matters on 16x16
/// and 25x25 boards near the medium and hard bands.
inline std::uint64_t uniqueness_node_budget(int order) { return order <= 4 ? 20000 : 2000; }

/// Unique-solution puzzle for (order, difficulty, seed); same inputs give the same puzzle.
inline Puzzle generate(int order, Difficulty difficulty, std::uint64_t seed) {
  if (order < kMinOrder || order > kMaxOrder) {
    throw std::out_of_range("generate: order " + std::to_string(order) + " unsupported");
  }
  const ClueBand band = clue_band(order, difficulty);
  const bool need_singles = difficulty == Difficulty::easy;
  Rng rng(seed);

  std::optional<Puzzle> best;
  int best_distance = 0;
  const std::uint64_t budget = uniqueness_node_budget(order);
  for (int attempt = 0; attempt < generation_attempts(order); ++attempt) {
    const Grid solution = detail::random_full_grid(order, rng);
    Grid clues = solution;
    std::vector<std::size_t> cells(static_cast<std::size_t>(clues.cell_count()));
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
    rng.shuffle(cells);

    // Stop at a seeded clue count inside the band; easy draws from its lowest
    // few counts rather than all the way up to a full board.
    const int lo = std::max(band.min, 0);
    const int hi = difficulty == Difficulty::easy ? std::min(band.max, lo + (lo - clue_band(order, Difficulty::medium).min))
                                                  : band.max;
    const int target = hi >= lo ? lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))) : lo;
    int count = clues.cell_count();
    for (std::size_t idx : cells) {
      if (count <= target) break;
      const Position p = clues.position_of(idx);
      const Entry saved = clues.at(p);
      clues.set(p, Entry::make_empty());
      // Singles-solvable implies a unique completion, which spares the exact-cover count.
      bool keep = solvable_by_singles(clues);
      if (!keep && !need_singles) keep = detail::count_exact_covers(clues, 2, budget) == 1u;
      if (keep) {
        --count;
      } else {
        clues.set(p, saved);
      }
    }

    Puzzle candidate{clues, solution, order, classify(clues), seed, count};
    const int distance = detail::band_distance(count, band) + (candidate.difficulty == difficulty ? 0 : 1);
    if (!best || distance < best_distance) {
      best = candidate;
      best_distance = distance;
    }
    if (distance == 0) break;
  }
  return *best;
}

}  // namespace access_sudoku
