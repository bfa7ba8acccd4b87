#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace access_sudoku {

inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 5;

enum class EntryKind : std::uint8_t { empty, clue, user };

struct Entry {
  EntryKind kind = EntryKind::empty;
  int value = 0;

  static constexpr Entry make_empty() { return {}; }
  static constexpr Entry clue(int v) { return {EntryKind::clue, v}; }
  static constexpr Entry user(int v) { return {EntryKind::user, v}; }

  constexpr bool is_empty() const { return kind == EntryKind::empty; }
  constexpr bool is_clue() const { return kind == EntryKind::clue; }
  constexpr bool is_user() const { return kind == EntryKind::user; }

  friend constexpr bool operator==(const Entry&, const Entry&) = default;
};

/// 1-based cell coordinate, matching the spoken row/column indices.
struct Position {
  int row = 1;
  int col = 1;

  friend constexpr bool operator==(const Position&, const Position&) = default;
  friend constexpr auto operator<=>(const Position&, const Position&) = default;
};

inline std::string to_string(Position p) {
  return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
}

class Grid {
 public:
  Grid() : Grid(3) {}

  explicit Grid(int order) : order_(order) {
    if (order < kMinOrder || order > kMaxOrder) {
      throw std::out_of_range("grid order " + std::to_string(order) + " outside supported range [" +
                              std::to_string(kMinOrder) + ", " + std::to_string(kMaxOrder) + "]");
    }
    cells_.resize(static_cast<std::size_t>(side() * side()));
  }

  int order() const { return order_; }
  int side() const { return order_ * order_; }
  int cell_count() const { return side() * side(); }
  int max_value() const { return side(); }

  bool contains(Position p) const { return p.row >= 1 && p.row <= side() && p.col >= 1 && p.col <= side(); }

  const Entry& at(Position p) const { return cells_[index(p)]; }

  /// Raw write; only validates the coordinate and value domain. Game rules live in game.hpp.
  void set(Position p, Entry e) {
    if (!e.is_empty() && (e.value < 1 || e.value > max_value())) {
      throw std::out_of_range("value " + std::to_string(e.value) + " outside 1.." + std::to_string(max_value()));
    }
    if (e.is_empty()) e.value = 0;
    cells_[index(p)] = e;
  }

  const std::vector<Entry>& cells() const { return cells_; }

  Position position_of(std::size_t idx) const {
    return {static_cast<int>(idx) / side() + 1, static_cast<int>(idx) % side() + 1};
  }

  std::size_t index(Position p) const {
    if (!contains(p)) throw std::out_of_range("position " + to_string(p) + " outside the grid");
    return static_cast<std::size_t>((p.row - 1) * side() + (p.col - 1));
  }

  int box_of(Position p) const { return ((p.row - 1) / order_) * order_ + (p.col - 1) / order_; }

  int count(EntryKind kind) const {
    return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [kind](const Entry& e) { return e.kind == kind; }));
  }

  bool full() const { return count(EntryKind::empty) == 0; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int order_;
  std::vector<Entry> cells_;
};

inline Grid new_grid(int order) { return Grid(order); }

/// Unordered pairs of peers (same row, column or box) holding equal values.
class ConflictSet {
 public:
  using Pair = std::pair<Position, Position>;

  void add(Position a, Position b) {
    if (b < a) std::swap(a, b);
    pairs_.emplace(a, b);
  }
  bool contains(Position a, Position b) const {
    if (b < a) std::swap(a, b);
    return pairs_.count({a, b}) != 0;
  }
  bool involves(Position p) const {
    return std::any_of(pairs_.begin(), pairs_.end(), [p](const Pair& x) { return x.first == p || x.second == p; });
  }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  friend bool operator==(const ConflictSet&, const ConflictSet&) = default;

 private:
  std::set<Pair> pairs_;
};

inline bool are_peers(const Grid& g, Position a, Position b) {
  return a != b && (a.row == b.row || a.col == b.col || g.box_of(a) == g.box_of(b));
}

inline ConflictSet conflicts(const Grid& g) {
  ConflictSet out;
  const int n = g.side();
  // Bucket filled cells by (unit, value); every bucket with two or more members is a clash.
  auto scan_unit = [&](auto&& cell_of) {
    for (int unit = 0; unit < n; ++unit) {
      std::vector<std::vector<Position>> by_value(static_cast<std::size_t>(n + 1));
      for (int k = 0; k < n; ++k) {
        Position p = cell_of(unit, k);
        const Entry& e = g.at(p);
        if (!e.is_empty()) by_value[static_cast<std::size_t>(e.value)].push_back(p);
      }
      for (const auto& bucket : by_value) {
        for (std::size_t i = 0; i < bucket.size(); ++i)
          for (std::size_t j = i + 1; j < bucket.size(); ++j) out.add(bucket[i], bucket[j]);
      }
    }
  };
  const int a = g.order();
  scan_unit([](int r, int k) { return Position{r + 1, k + 1}; });
  scan_unit([](int c, int k) { return Position{k + 1, c + 1}; });
  scan_unit([a](int b, int k) { return Position{(b / a) * a + k / a + 1, (b % a) * a + k % a + 1}; });
  return out;
}

// ---------------------------------------------------------------------------
// Text format
//
//   <order>
//   a^2 lines of a^2 space-separated tokens, "." for empty
//   [# seed=<n> difficulty=<label>]

struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct GridFile {
  Grid grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> difficulty;
};

inline std::string format_grid(const Grid& g) {
  std::string out = std::to_string(g.order()) + "\n";
  for (int r = 1; r <= g.side(); ++r) {
    for (int c = 1; c <= g.side(); ++c) {
      if (c > 1) out += ' ';
      const Entry& e = g.at({r, c});
      out += e.is_empty() ? std::string(".") : std::to_string(e.value);
    }
    out += '\n';
  }
  return out;
}

inline std::string format_grid_file(const GridFile& f) {
  std::string out = format_grid(f.grid);
  if (f.seed || f.difficulty) {
    out += "#";
    if (f.seed) out += " seed=" + std::to_string(*f.seed);
    if (f.difficulty) out += " difficulty=" + *f.difficulty;
    out += '\n';
  }
  return out;
}

namespace detail {

struct Token {
  std::string text;
  int column;  // 1-based
};

inline std::vector<Token> split_tokens(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline std::optional<long long> parse_decimal(const std::string& s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  long long v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return std::nullopt;
    v = v * 10 + (ch - '0');
  }
  return v;
}

}  // namespace detail

inline GridFile parse_grid_file(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty()) throw ParseError(1, 1, "empty input");

  auto header = detail::split_tokens(lines[0]);
  if (header.size() != 1) throw ParseError(1, 1, "expected a single order value");
  auto order = detail::parse_decimal(header[0].text);
  if (!order) throw ParseError(1, header[0].column, "order is not a decimal integer");
  if (*order < kMinOrder || *order > kMaxOrder) throw ParseError(1, header[0].column, "order outside supported range");

  GridFile file{Grid(static_cast<int>(*order)), std::nullopt, std::nullopt};
  Grid& g = file.grid;
  const int n = g.side();
  if (static_cast<int>(lines.size()) < n + 1) {
    throw ParseError(static_cast<int>(lines.size()) + 1, 1, "expected " + std::to_string(n) + " grid rows");
  }
  for (int r = 1; r <= n; ++r) {
    const int line_no = r + 1;
    auto tokens = detail::split_tokens(lines[static_cast<std::size_t>(r)]);
    if (static_cast<int>(tokens.size()) != n) {
      int col = tokens.size() > static_cast<std::size_t>(n) ? tokens[static_cast<std::size_t>(n)].column
                                                             : static_cast<int>(lines[static_cast<std::size_t>(r)].size()) + 1;
      throw ParseError(line_no, col, "expected " + std::to_string(n) + " tokens, found " + std::to_string(tokens.size()));
    }
    for (int c = 1; c <= n; ++c) {
      const auto& tok = tokens[static_cast<std::size_t>(c - 1)];
      if (tok.text == ".") continue;
      auto v = detail::parse_decimal(tok.text);
      if (!v) throw ParseError(line_no, tok.column, "invalid token '" + tok.text + "'");
      if (*v < 1 || *v > n) throw ParseError(line_no, tok.column, "value " + tok.text + " outside 1.." + std::to_string(n));
      g.set({r, c}, Entry::clue(static_cast<int>(*v)));
    }
  }

  for (std::size_t i = static_cast<std::size_t>(n) + 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const int line_no = static_cast<int>(i) + 1;
    if (line.empty()) continue;
    if (line[0] != '#') throw ParseError(line_no, 1, "unexpected content after grid");
    for (const auto& tok : detail::split_tokens(line.substr(1))) {
      auto eq = tok.text.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.text.substr(0, eq);
      std::string value = tok.text.substr(eq + 1);
      if (key == "seed") {
        std::uint64_t seed = 0;
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
          throw ParseError(line_no, tok.column + 1, "seed is not a decimal integer");
        }
        try {
          seed = std::stoull(value);
        } catch (const std::exception&) {
          throw ParseError(line_no, tok.column + 1, "seed out of range");
        }
        file.seed = seed;
      } else if (key == "difficulty") {
        file.difficulty = value;
      }
    }
  }
  return file;
}

inline Grid parse_grid(const std::string& text) { return parse_grid_file(text).grid; }

}  // namespace access_sudoku
