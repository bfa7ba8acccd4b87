#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "access_sudoku/engine.hpp"
#include "access_sudoku/scanning.hpp"
#include "access_sudoku/settings.hpp"
#include "access_sudoku/voice.hpp"

namespace access_sudoku {

enum class Command { run_scan, new_game, clear, solve, undo, exit };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::run_scan: return "run_scan";
    case Command::new_game: return "new_game";
    case Command::clear: return "clear";
    case Command::solve: return "solve";
    case Command::undo: return "undo";
    case Command::exit: return "exit";
  }
  return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (Command c : {Command::run_scan, Command::new_game, Command::clear, Command::solve, Command::undo, Command::exit})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

enum class InputKind { switch_press, tick, voice_token, pointer_select, command, settings_update };

inline std::string_view to_string(InputKind k) {
  switch (k) {
    case InputKind::switch_press: return "switch_press";
    case InputKind::tick: return "tick";
    case InputKind::voice_token: return "voice_token";
    case InputKind::pointer_select: return "pointer_select";
    case InputKind::command: return "command";
    case InputKind::settings_update: return "settings_update";
  }
  return "?";
}

struct InputEvent {
  InputKind kind = InputKind::tick;
  std::string text;  // voice token or pointer node id
  Command command = Command::run_scan;
  Settings settings;

  static InputEvent switch_press() { return {InputKind::switch_press}; }
  static InputEvent tick() { return {InputKind::tick}; }
  static InputEvent voice(std::string token) { return {InputKind::voice_token, std::move(token)}; }
  static InputEvent pointer(std::string node_id) { return {InputKind::pointer_select, std::move(node_id)}; }
  static InputEvent cmd(Command c) { return {InputKind::command, {}, c}; }
  static InputEvent settings_update(Settings s) { return {InputKind::settings_update, {}, Command::run_scan, std::move(s)}; }

  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

inline nlohmann::ordered_json input_to_json(const InputEvent& e) {
  nlohmann::ordered_json j{{"type", to_string(e.kind)}};
  switch (e.kind) {
    case InputKind::voice_token: j["token"] = e.text; break;
    case InputKind::pointer_select: j["node_id"] = e.text; break;
    case InputKind::command: j["command"] = to_string(e.command); break;
    case InputKind::settings_update: j["settings"] = settings_to_json(e.settings); break;
    default: break;
  }
  return j;
}

inline InputEvent input_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "switch_press") return InputEvent::switch_press();
  if (type == "tick") return InputEvent::tick();
  if (type == "voice_token") return InputEvent::voice(j.at("token").get<std::string>());
  if (type == "pointer_select") return InputEvent::pointer(j.at("node_id").get<std::string>());
  if (type == "command") {
    auto c = parse_command(j.at("command").get<std::string>());
    if (!c) throw std::invalid_argument("unknown command");
    return InputEvent::cmd(*c);
  }
  if (type == "settings_update") return InputEvent::settings_update(settings_from_json(j.at("settings")));
  throw std::invalid_argument("unknown input type '" + type + "'");
}

enum class OutputKind { highlight, grid_changed, scan_stopped, game_completed, settings_changed, voice, error, session_closed };

inline std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::highlight: return "highlight";
    case OutputKind::grid_changed: return "grid_changed";
    case OutputKind::scan_stopped: return "scan_stopped";
    case OutputKind::game_completed: return "game_completed";
    case OutputKind::settings_changed: return "settings_changed";
    case OutputKind::voice: return "voice";
    case OutputKind::error: return "error";
    case OutputKind::session_closed: return "session_closed";
  }
  return "?";
}

struct CellChange {
  Position pos;
  Entry entry;

  friend bool operator==(const CellChange&, const CellChange&) = default;
};

/// Cells to overwrite on the previous board. With `reset` the board is replaced
/// by a fresh `order` board first and `cells` lists every cell.
struct GridDiff {
  int order = 3;
  bool reset = false;
  std::vector<CellChange> cells;
  std::vector<std::pair<Position, Position>> conflicts;
  bool completed = false;

  friend bool operator==(const GridDiff&, const GridDiff&) = default;
};

struct OutputEvent {
  OutputKind kind = OutputKind::error;
  std::string node_id;  // highlight
  bool sound = false;   // highlight
  GridDiff diff;        // grid_changed
  Settings settings;    // settings_changed
  VoiceState voice;     // voice
  std::string code;     // error code, voice prompt id
  std::string message;  // error

  friend bool operator==(const OutputEvent&, const OutputEvent&) = default;
};

namespace detail {

inline nlohmann::ordered_json entry_to_json(const Entry& e) {
  return {{"kind", e.is_clue() ? "clue" : e.is_user() ? "user" : "empty"}, {"value", e.value}};
}

inline Entry entry_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int v = j.at("value").get<int>();
  if (kind == "clue") return Entry::clue(v);
  if (kind == "user") return Entry::user(v);
  if (kind == "empty") return Entry::make_empty();
  throw std::invalid_argument("unknown entry kind '" + kind + "'");
}

inline nlohmann::ordered_json conflicts_to_json(const std::vector<std::pair<Position, Position>>& pairs) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& [a, b] : pairs) out.push_back({a.row, a.col, b.row, b.col});
  return out;
}

inline std::vector<std::pair<Position, Position>> conflict_pairs(const ConflictSet& set) {
  std::vector<std::pair<Position, Position>> out(set.begin(), set.end());
  return out;
}

inline nlohmann::ordered_json vocabulary_to_json(const VoiceState& s) {
  auto out = nlohmann::ordered_json::array();
  for (const VoiceToken& t : vocabulary(s)) out.push_back(to_string(t));
  return out;
}

}  // namespace detail

inline nlohmann::ordered_json output_to_json(const OutputEvent& e) {
  nlohmann::ordered_json j{{"type", to_string(e.kind)}};
  switch (e.kind) {
    case OutputKind::highlight:
      j["node_id"] = e.node_id;
      j["sound"] = e.sound;
      break;
    case OutputKind::grid_changed: {
      j["order"] = e.diff.order;
      j["reset"] = e.diff.reset;
      auto cells = nlohmann::ordered_json::array();
      for (const CellChange& c : e.diff.cells) {
        auto cj = detail::entry_to_json(c.entry);
        cells.push_back({{"row", c.pos.row}, {"col", c.pos.col}, {"kind", cj["kind"]}, {"value", cj["value"]}});
      }
      j["cells"] = std::move(cells);
      j["conflicts"] = detail::conflicts_to_json(e.diff.conflicts);
      j["completed"] = e.diff.completed;
      break;
    }
    case OutputKind::settings_changed: j["settings"] = settings_to_json(e.settings); break;
    case OutputKind::voice:
      j["state"] = voice_state_to_json(e.voice);
      j["prompt"] = e.code;
      j["vocabulary"] = detail::vocabulary_to_json(e.voice);
      break;
    case OutputKind::error:
      j["code"] = e.code;
      j["message"] = e.message;
      break;
    default: break;
  }
  return j;
}

inline OutputEvent output_from_json(const nlohmann::json& j) {
  OutputEvent e;
  const std::string type = j.at("type").get<std::string>();
  bool known = false;
  for (int k = 0; k <= static_cast<int>(OutputKind::session_closed); ++k) {
    if (to_string(static_cast<OutputKind>(k)) == type) {
      e.kind = static_cast<OutputKind>(k);
      known = true;
    }
  }
  if (!known) throw std::invalid_argument("unknown output type '" + type + "'");
  switch (e.kind) {
    case OutputKind::highlight:
      e.node_id = j.at("node_id").get<std::string>();
      e.sound = j.at("sound").get<bool>();
      break;
    case OutputKind::grid_changed:
      e.diff.order = j.at("order").get<int>();
      e.diff.reset = j.at("reset").get<bool>();
      for (const auto& c : j.at("cells"))
        e.diff.cells.push_back({{c.at("row").get<int>(), c.at("col").get<int>()}, detail::entry_from_json(c)});
      for (const auto& p : j.at("conflicts"))
        e.diff.conflicts.push_back({{p.at(0).get<int>(), p.at(1).get<int>()}, {p.at(2).get<int>(), p.at(3).get<int>()}});
      e.diff.completed = j.at("completed").get<bool>();
      break;
    case OutputKind::settings_changed: e.settings = settings_from_json(j.at("settings")); break;
    case OutputKind::voice:
      e.voice = voice_state_from_json(j.at("state"));
      e.code = j.at("prompt").get<std::string>();
      break;
    case OutputKind::error:
      e.code = j.at("code").get<std::string>();
      e.message = j.at("message").get<std::string>();
      break;
    default: break;
  }
  return e;
}

/// Applies a diff to a board; throws std::invalid_argument when it does not fit.
inline Grid apply_diff(Grid g, const GridDiff& d) {
  if (d.reset) g = Grid(d.order);
  if (g.order() != d.order) throw std::invalid_argument("diff order does not match the board");
  for (const CellChange& c : d.cells) {
    if (!g.contains(c.pos)) throw std::invalid_argument("diff cell outside the board");
    g.set(c.pos, c.entry);
  }
  return g;
}

struct LogEntry {
  InputEvent input;
  std::vector<OutputEvent> outputs;
};

using EventLog = std::vector<LogEntry>;

inline std::string format_outputs(const std::vector<OutputEvent>& events) {
  std::string out;
  for (const auto& e : events) out += output_to_json(e).dump() + "\n";
  return out;
}

/// One JSON line per entry: {"input":...,"outputs":[...]}.
inline std::string format_log(const EventLog& log) {
  std::string out;
  for (const LogEntry& entry : log) {
    nlohmann::ordered_json j{{"input", input_to_json(entry.input)}, {"outputs", nlohmann::ordered_json::array()}};
    for (const auto& o : entry.outputs) j["outputs"].push_back(output_to_json(o));
    out += j.dump() + "\n";
  }
  return out;
}

inline EventLog parse_log(const std::string& text) {
  EventLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    LogEntry entry{input_from_json(j.at("input")), {}};
    for (const auto& o : j.at("outputs")) entry.outputs.push_back(output_from_json(o));
    log.push_back(std::move(entry));
  }
  return log;
}

class SessionLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSessionFormatVersion = 1;

/// One player's game: the board, the settings, both input machines and the
/// log of everything handled so far. Events are processed one at a time.
class Session {
 public:
  /// Throws SettingsError for invalid settings.
  Session(Settings settings, std::uint64_t seed)
      : initial_settings_(settings), settings_(std::move(settings)), seed_(seed) {
    require_valid(settings_);
    game_ = start_game(generate(settings_.order, settings_.difficulty, seed_));
    rebuild_tree();
  }

  std::vector<OutputEvent> handle(const InputEvent& in) {
    std::vector<OutputEvent> out;
    dispatch(in, out);
    log_.push_back({in, out});
    return out;
  }

  std::vector<OutputEvent> update_settings(const Settings& s) { return handle(InputEvent::settings_update(s)); }

  const Settings& settings() const { return settings_; }
  /// Settings at creation; with seed() and log() this is enough to replay().
  const Settings& initial_settings() const { return initial_settings_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }
  const GameState& game() const { return game_; }
  const ScanTree& scan_tree() const { return tree_; }
  const ScanState& scan_state() const { return scan_; }
  const VoiceState& voice_state() const { return voice_; }
  std::optional<Position> pointer_cell() const { return pointer_cell_; }
  bool open() const { return open_; }
  bool scanning() const { return open_ && scan_.active && is_scanning_device(settings_.input_device); }
  const EventLog& log() const { return log_; }

  nlohmann::ordered_json snapshot() const {
    nlohmann::ordered_json j;
    j["open"] = open_;
    j["settings"] = settings_to_json(settings_);
    j["seed"] = seed_;
    j["counter"] = counter_;
    j["puzzle"] = {{"order", game_.puzzle.order},
                   {"difficulty", to_string(game_.puzzle.difficulty)},
                   {"seed", game_.puzzle.seed},
                   {"clue_count", game_.puzzle.clue_count}};
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < game_.grid.cells().size(); ++i) {
      const Position p = game_.grid.position_of(i);
      auto e = detail::entry_to_json(game_.grid.cells()[i]);
      cells.push_back({{"row", p.row}, {"col", p.col}, {"kind", e["kind"]}, {"value", e["value"]}});
    }
    j["cells"] = std::move(cells);
    j["conflicts"] = detail::conflicts_to_json(detail::conflict_pairs(game_.conflict_set));
    j["completed"] = game_.completed;
    j["history_size"] = game_.history.size();
    const int hl = scan_.highlighted(tree_);
    j["scan"] = scan_state_to_json(scan_, tree_);
    j["scan"]["highlighted"] = hl < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(tree_.node(hl).id);
    j["voice"] = voice_state_to_json(voice_);
    j["voice"]["vocabulary"] = detail::vocabulary_to_json(voice_);
    j["pointer_cell"] = pointer_cell_ ? nlohmann::ordered_json{{"row", pointer_cell_->row}, {"col", pointer_cell_->col}}
                                      : nlohmann::ordered_json(nullptr);
    return j;
  }

  /// Versioned JSON blob holding everything needed to resume, log included.
  std::string save() const {
    nlohmann::ordered_json j;
    j["format"] = "access-sudoku-session";
    j["version"] = kSessionFormatVersion;
    j["settings"] = settings_to_json(settings_);
    j["initial_settings"] = settings_to_json(initial_settings_);
    j["seed"] = seed_;
    j["counter"] = counter_;
    j["open"] = open_;
    const Puzzle& p = game_.puzzle;
    j["puzzle"] = {{"order", p.order},
                   {"difficulty", to_string(p.difficulty)},
                   {"seed", p.seed},
                   {"clue_count", p.clue_count},
                   {"clues", format_grid(p.clues)},
                   {"solution", format_grid(p.solution)}};
    auto history = nlohmann::ordered_json::array();
    for (const Move& m : game_.history)
      history.push_back({{"row", m.pos.row},
                         {"col", m.pos.col},
                         {"before", detail::entry_to_json(m.before)},
                         {"after", detail::entry_to_json(m.after)}});
    j["history"] = std::move(history);
    j["scan"] = scan_state_to_json(scan_, tree_);
    j["voice"] = voice_state_to_json(voice_);
    j["pointer_cell"] = pointer_cell_ ? nlohmann::ordered_json{{"row", pointer_cell_->row}, {"col", pointer_cell_->col}}
                                      : nlohmann::ordered_json(nullptr);
    j["log"] = format_log(log_);
    return j.dump();
  }

  /// Throws SessionLoadError on a version mismatch or a corrupt blob.
  static Session load(const std::string& blob) {
    try {
      const auto j = nlohmann::json::parse(blob);
      if (j.at("format").get<std::string>() != "access-sudoku-session") throw SessionLoadError("not a session blob");
      if (j.at("version").get<int>() != kSessionFormatVersion)
        throw SessionLoadError("unsupported session format version " + j.at("version").dump());
      Session s;
      s.settings_ = settings_from_json(j.at("settings"));
      s.initial_settings_ = settings_from_json(j.at("initial_settings"));
      s.seed_ = j.at("seed").get<std::uint64_t>();
      s.counter_ = j.at("counter").get<std::uint64_t>();
      s.open_ = j.at("open").get<bool>();
      const auto& pj = j.at("puzzle");
      Puzzle p;
      p.order = pj.at("order").get<int>();
      const auto d = parse_difficulty(pj.at("difficulty").get<std::string>());
      if (!d) throw SessionLoadError("unknown difficulty");
      p.difficulty = *d;
      p.seed = pj.at("seed").get<std::uint64_t>();
      p.clue_count = pj.at("clue_count").get<int>();
      p.clues = parse_grid(pj.at("clues").get<std::string>());
      p.solution = parse_grid(pj.at("solution").get<std::string>());
      if (p.clues.order() != p.order || p.solution.order() != p.order || p.order != s.settings_.order)
        throw SessionLoadError("puzzle order mismatch");
      GameState g = start_game(std::move(p));
      for (const auto& m : j.at("history")) {
        const Move move{{m.at("row").get<int>(), m.at("col").get<int>()},
                        detail::entry_from_json(m.at("before")),
                        detail::entry_from_json(m.at("after"))};
        if (!g.grid.contains(move.pos) || g.grid.at(move.pos) != move.before || move.after.is_clue())
          throw SessionLoadError("history does not apply to the puzzle");
        g.grid.set(move.pos, move.after);
        g.history.push_back(move);
      }
      detail::refresh(g);
      s.game_ = std::move(g);
      s.rebuild_tree();
      s.scan_ = scan_state_from_json(j.at("scan"), s.tree_);
      s.voice_ = voice_state_from_json(j.at("voice"));
      if (!j.at("pointer_cell").is_null())
        s.pointer_cell_ = Position{j["pointer_cell"].at("row").get<int>(), j["pointer_cell"].at("col").get<int>()};
      s.log_ = parse_log(j.at("log").get<std::string>());
      return s;
    } catch (const SessionLoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw SessionLoadError(std::string("corrupt session blob: ") + e.what());
    }
  }

 private:
  Session() = default;

  static OutputEvent error(std::string code, std::string message) {
    OutputEvent e{OutputKind::error};
    e.code = std::move(code);
    e.message = std::move(message);
    return e;
  }

  static std::vector<SettingChoice> scan_settings() { return settings_catalogue(); }

  void rebuild_tree() {
    MenuDescription menu;
    menu.settings = scan_settings();
    tree_ = build_scan_tree(game_.puzzle.clues, menu);
  }

  void dispatch(const InputEvent& in, std::vector<OutputEvent>& out) {
    if (!open_) {
      out.push_back(error("session-closed", "the session is closed"));
      return;
    }
    const InputDevice dev = settings_.input_device;
    auto wrong_device = [&] {
      out.push_back(error("wrong-input-device",
                          std::string(to_string(in.kind)) + " is not accepted with input device " +
                              std::string(to_string(dev))));
    };
    switch (in.kind) {
      case InputKind::switch_press:
      case InputKind::tick: {
        if (!is_scanning_device(dev)) return wrong_device();
        const ScanConfig cfg = settings_.scan_config();
        ScanStep step = in.kind == InputKind::tick ? tick(scan_, tree_, cfg) : press(scan_, tree_, cfg);
        scan_ = std::move(step.state);
        for (const ScanEvent& e : step.events) {
          if (e.kind == ScanEventKind::highlight) {
            OutputEvent h{OutputKind::highlight};
            h.node_id = e.node_id;
            h.sound = e.sound;
            out.push_back(std::move(h));
          } else if (e.kind == ScanEventKind::stopped) {
            out.push_back({OutputKind::scan_stopped});
          } else if (e.kind == ScanEventKind::action) {
            const std::uint64_t games = counter_;
            apply_action(e.action, out);
            if (counter_ != games || !open_) break;  // a new board restarted the scan
          }
        }
        return;
      }
      case InputKind::voice_token: {
        if (dev != InputDevice::voice) return wrong_device();
        const auto token = parse_voice_token(in.text);
        if (!token) {
          out.push_back(error("invalid-token", "'" + in.text + "' is not a voice token"));
          return;
        }
        VoiceStep step = interpret(voice_, *token);
        voice_ = step.state;
        std::string prompt;
        for (const VoiceEffect& e : step.effects) {
          if (e.kind == VoiceEffectKind::prompt) prompt = e.text;
          apply_voice_effect(e, out);
        }
        OutputEvent v{OutputKind::voice};
        v.voice = voice_;
        v.code = prompt;
        out.push_back(std::move(v));
        return;
      }
      case InputKind::pointer_select:
        if (dev != InputDevice::pointer) return wrong_device();
        return pointer_select(in.text, out);
      case InputKind::command:
        switch (in.command) {
          case Command::run_scan: {
            if (!is_scanning_device(dev)) return wrong_device();
            ScanStep step = activate(tree_, settings_.scan_config());
            scan_ = std::move(step.state);
            OutputEvent h{OutputKind::highlight};
            h.node_id = tree_.node(scan_.highlighted(tree_)).id;
            h.sound = settings_.scan_sound;
            out.push_back(std::move(h));
            return;
          }
          case Command::new_game: return apply_action({ActionKind::new_game}, out);
          case Command::clear: return apply_action({ActionKind::clear}, out);
          case Command::solve: return apply_action({ActionKind::solve}, out);
          case Command::undo: return apply_action({ActionKind::undo}, out);
          case Command::exit: return apply_action({ActionKind::exit}, out);
        }
        return;
      case InputKind::settings_update: return change_settings(in.settings, out);
    }
  }

  void pointer_select(const std::string& id, std::vector<OutputEvent>& out) {
    const int idx = tree_.find(id);
    if (idx < 0) {
      out.push_back(error("unknown-node", "no selectable item '" + id + "'"));
      return;
    }
    const ScanNode& node = tree_.node(idx);
    switch (node.kind) {
      case NodeKind::cell: {
        pointer_cell_ = node.cell;
        OutputEvent h{OutputKind::highlight};
        h.node_id = node.id;
        out.push_back(std::move(h));
        return;
      }
      case NodeKind::keypad_key: {
        if (!pointer_cell_) {
          out.push_back(error("no-cell-selected", "select a cell before a key"));
          return;
        }
        const Position at = *pointer_cell_;
        pointer_cell_.reset();
        if (node.key == KeyAction::digit) return apply_action({ActionKind::place, at, node.digit}, out);
        if (node.key == KeyAction::erase) return apply_action({ActionKind::erase, at}, out);
        return;
      }
      case NodeKind::menu_item:
        if (node.menu == MenuAction::settings || node.menu == MenuAction::close_settings) {
          OutputEvent s{OutputKind::settings_changed};
          s.settings = settings_;
          out.push_back(std::move(s));
          return;
        }
        return apply_action(menu_to_action(node.menu), out);
      case NodeKind::setting_value: return apply_action({ActionKind::set_setting, {}, 0, node.setting, node.value}, out);
      default: out.push_back(error("unknown-node", "'" + id + "' is a group, not a selectable item"));
    }
  }

  void apply_voice_effect(const VoiceEffect& e, std::vector<OutputEvent>& out) {
    switch (e.kind) {
      case VoiceEffectKind::place: return apply_action({ActionKind::place, {e.row, e.col}, e.value}, out);
      case VoiceEffectKind::new_game: return apply_action({ActionKind::new_game}, out);
      case VoiceEffectKind::clear_all: return apply_action({ActionKind::clear}, out);
      case VoiceEffectKind::solve: return apply_action({ActionKind::solve}, out);
      case VoiceEffectKind::undo: return apply_action({ActionKind::undo}, out);
      case VoiceEffectKind::exit: return apply_action({ActionKind::exit}, out);
      case VoiceEffectKind::set_option:
        try {
          change_settings(apply_voice_option(settings_, e.option, e.value), out);
        } catch (const SettingsError& err) {
          out.push_back(error("invalid-settings", err.what()));
        }
        return;
      case VoiceEffectKind::rejected: out.push_back(error("voice-rejected", e.text)); return;
      default: return;
    }
  }

  void apply_action(const Action& a, std::vector<OutputEvent>& out) {
    const Grid before = game_.grid;
    const bool was_completed = game_.completed;
    try {
      switch (a.kind) {
        case ActionKind::place: game_ = place(game_, a.pos, a.value); break;
        case ActionKind::erase: game_ = erase(game_, a.pos); break;
        case ActionKind::undo: game_ = undo(game_); break;
        case ActionKind::clear: game_ = clear_user_entries(game_); break;
        case ActionKind::solve: {
          const auto solved = solve(game_.grid);
          if (!solved) {
            out.push_back(error("unsolvable", "the current entries admit no solution"));
            return;
          }
          GameState next = game_;
          for (std::size_t i = 0; i < next.grid.cells().size(); ++i)
            if (next.grid.cells()[i].is_empty())
              next = place(std::move(next), next.grid.position_of(i), solved->cells()[i].value);
          game_ = std::move(next);
          break;
        }
        case ActionKind::new_game: return new_game(out);
        case ActionKind::exit:
          open_ = false;
          scan_ = ScanState{};
          voice_ = reset(voice_);
          out.push_back({OutputKind::session_closed});
          return;
        case ActionKind::set_setting:
          try {
            change_settings(apply_setting(settings_, a.setting, a.setting_value), out);
          } catch (const SettingsError& err) {
            out.push_back(error("invalid-settings", err.what()));
          }
          return;
        default: return;
      }
    } catch (const GameError& err) {
      out.push_back(error(std::string(to_string(err.code())), err.what()));
      return;
    }
    emit_diff(before, false, out);
    if (game_.completed && !was_completed) out.push_back({OutputKind::game_completed});
  }

  void emit_diff(const Grid& before, bool reset_board, std::vector<OutputEvent>& out) {
    OutputEvent e{OutputKind::grid_changed};
    e.diff.order = game_.grid.order();
    e.diff.reset = reset_board;
    for (std::size_t i = 0; i < game_.grid.cells().size(); ++i) {
      if (reset_board || before.cells()[i] != game_.grid.cells()[i])
        e.diff.cells.push_back({game_.grid.position_of(i), game_.grid.cells()[i]});
    }
    if (!reset_board && e.diff.cells.empty()) return;
    e.diff.conflicts = detail::conflict_pairs(game_.conflict_set);
    e.diff.completed = game_.completed;
    out.push_back(std::move(e));
  }

  void new_game(std::vector<OutputEvent>& out) {
    ++counter_;
    game_ = start_game(generate(settings_.order, settings_.difficulty, derive_seed(seed_, counter_)));
    rebuild_tree();
    voice_ = reset(voice_);
    pointer_cell_.reset();
    emit_diff(game_.grid, true, out);
    if (scan_.active) {
      scan_ = activate(tree_, settings_.scan_config()).state;
      OutputEvent h{OutputKind::highlight};
      h.node_id = tree_.node(scan_.highlighted(tree_)).id;
      h.sound = settings_.scan_sound;
      out.push_back(std::move(h));
    }
  }

  void change_settings(const Settings& next, std::vector<OutputEvent>& out) {
    auto errors = validate(next);
    if (!errors.empty()) {
      out.push_back(error("invalid-settings", SettingsError(std::move(errors)).what()));
      return;
    }
    const Settings prev = settings_;
    settings_ = next;
    OutputEvent changed{OutputKind::settings_changed};
    changed.settings = settings_;
    out.push_back(std::move(changed));
    if (prev.input_device != next.input_device) {
      voice_ = reset(voice_);
      pointer_cell_.reset();
      if (!is_scanning_device(next.input_device) && scan_.active) {
        scan_ = ScanState{};
        out.push_back({OutputKind::scan_stopped});
      }
    }
    if (prev.order != next.order) new_game(out);
  }

  Settings initial_settings_;
  Settings settings_;
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  GameState game_;
  ScanTree tree_;
  ScanState scan_;
  VoiceState voice_;
  std::optional<Position> pointer_cell_;
  bool open_ = true;
  EventLog log_;
};

inline Session create_session(const Settings& settings, std::uint64_t seed) { return Session(settings, seed); }

/// Re-runs the inputs of `log` against a fresh session.
inline Session replay(const Settings& settings, std::uint64_t seed, const EventLog& log) {
  Session s(settings, seed);
  for (const LogEntry& e : log) s.handle(e.input);
  return s;
}

}  // namespace access_sudoku
