#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "access_sudoku/generator.hpp"
#include "access_sudoku/grid.hpp"

namespace access_sudoku {

enum class GameErrorCode { immutable_cell, empty_cell, value_out_of_range, position_out_of_range, nothing_to_undo };

inline std::string_view to_string(GameErrorCode c) {
  switch (c) {
    case GameErrorCode::immutable_cell: return "immutable-cell";
    case GameErrorCode::empty_cell: return "empty-cell";
    case GameErrorCode::value_out_of_range: return "value-out-of-range";
    case GameErrorCode::position_out_of_range: return "position-out-of-range";
    case GameErrorCode::nothing_to_undo: return "nothing-to-undo";
  }
  return "unknown";
}

class GameError : public std::runtime_error {
 public:
  GameError(GameErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  GameErrorCode code() const { return code_; }

 private:
  GameErrorCode code_;
};

struct Move {
  Position pos;
  Entry before;
  Entry after;

  friend bool operator==(const Move&, const Move&) = default;
};

/// One game in progress. Operations below take the state by value and return
/// the successor, leaving the caller's copy untouched on error.
struct GameState {
  Puzzle puzzle;
  Grid grid;
  std::vector<Move> history;
  ConflictSet conflict_set;
  bool completed = false;

  friend bool operator==(const GameState&, const GameState&) = default;
};

namespace detail {

inline void refresh(GameState& s) {
  s.conflict_set = conflicts(s.grid);
  s.completed = s.grid.full() && s.conflict_set.empty();
}

inline void check_position(const GameState& s, Position p) {
  if (!s.grid.contains(p)) throw GameError(GameErrorCode::position_out_of_range, "position " + to_string(p) + " outside the grid");
}

}  // namespace detail

inline GameState start_game(Puzzle puzzle) {
  GameState s;
  s.grid = puzzle.clues;
  s.puzzle = std::move(puzzle);
  detail::refresh(s);
  return s;
}

/// Writes User(v) at pos. Conflicting values are accepted and show up in conflict_set.
inline GameState place(GameState s, Position pos, int v) {
  detail::check_position(s, pos);
  if (v < 1 || v > s.grid.max_value()) {
    throw GameError(GameErrorCode::value_out_of_range, "value " + std::to_string(v) + " outside 1.." + std::to_string(s.grid.max_value()));
  }
  const Entry before = s.grid.at(pos);
  if (before.is_clue()) throw GameError(GameErrorCode::immutable_cell, "cell " + to_string(pos) + " holds a clue");
  const Entry after = Entry::user(v);
  s.grid.set(pos, after);
  s.history.push_back({pos, before, after});
  detail::refresh(s);
  return s;
}

inline GameState erase(GameState s, Position pos) {
  detail::check_position(s, pos);
  const Entry before = s.grid.at(pos);
  if (before.is_clue()) throw GameError(GameErrorCode::immutable_cell, "cell " + to_string(pos) + " holds a clue");
  if (before.is_empty()) throw GameError(GameErrorCode::empty_cell, "cell " + to_string(pos) + " is already empty");
  s.grid.set(pos, Entry::make_empty());
  s.history.push_back({pos, before, Entry::make_empty()});
  detail::refresh(s);
  return s;
}

inline GameState undo(GameState s) {
  if (s.history.empty()) throw GameError(GameErrorCode::nothing_to_undo, "nothing to undo");
  const Move last = s.history.back();
  s.history.pop_back();
  s.grid.set(last.pos, last.before);
  detail::refresh(s);
  return s;
}

/// Removes every User entry and forgets the history; clues stay.
inline GameState clear_user_entries(GameState s) {
  for (std::size_t i = 0; i < s.grid.cells().size(); ++i) {
    if (s.grid.cells()[i].is_user()) s.grid.set(s.grid.position_of(i), Entry::make_empty());
  }
  s.history.clear();
  detail::refresh(s);
  return s;
}

/// Rebuilds the grid from the puzzle clues by applying `history` in order.
inline Grid replay_history(const Puzzle& puzzle, const std::vector<Move>& history) {
  Grid g = puzzle.clues;
  for (const Move& m : history) g.set(m.pos, m.after);
  return g;
}

}  // namespace access_sudoku
