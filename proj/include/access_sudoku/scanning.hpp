#pragma once

// Single-switch hierarchical scanning.
//
// The selection set is a tree: root -> {grid group, menu group}; the grid group
// nests bands of `order` rows, then rows, then the editable cells of each row.
// Two further subtrees hang off the ScanTree but not off the root: the keypad
// (entered after a cell is chosen) and the settings panel (entered from the
// SETTINGS menu item). Both are pushed onto the scan path like any other level.
//
// Time is external: callers feed tick() at the dwell interval and press() on
// switch activation. Every transition is a pure function of its inputs.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "access_sudoku/game.hpp"
#include "access_sudoku/grid.hpp"

namespace access_sudoku {

enum class NodeKind { group, subgroup, row, cell, keypad_key, menu_item, setting_item, setting_value };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::group: return "group";
    case NodeKind::subgroup: return "subgroup";
    case NodeKind::row: return "row";
    case NodeKind::cell: return "cell";
    case NodeKind::keypad_key: return "keypad-key";
    case NodeKind::menu_item: return "menu-item";
    case NodeKind::setting_item: return "setting-item";
    case NodeKind::setting_value: return "setting-value";
  }
  return "group";
}

enum class MenuAction { new_game, clear, solve, undo, settings, exit, close_settings };

enum class KeyAction { digit, erase, cancel };

struct ScanNode {
  std::string id;
  NodeKind kind = NodeKind::group;
  std::vector<int> children;
  // Payload; which fields are meaningful depends on kind.
  Position cell{};
  MenuAction menu = MenuAction::new_game;
  KeyAction key = KeyAction::digit;
  int digit = 0;
  std::string setting;
  std::string value;

  bool is_leaf() const {
    return kind == NodeKind::cell || kind == NodeKind::keypad_key || kind == NodeKind::menu_item ||
           kind == NodeKind::setting_value;
  }
};

/// One scannable setting and the values the value scan offers, in order.
struct SettingChoice {
  std::string id;
  std::vector<std::string> values;
};

struct MenuDescription {
  std::vector<MenuAction> items{MenuAction::new_game, MenuAction::clear, MenuAction::solve,
                                MenuAction::undo,     MenuAction::settings, MenuAction::exit};
  std::vector<SettingChoice> settings;
};

inline std::string menu_node_id(MenuAction a) {
  switch (a) {
    case MenuAction::new_game: return "menu-new";
    case MenuAction::clear: return "menu-clear";
    case MenuAction::solve: return "menu-solve";
    case MenuAction::undo: return "menu-undo";
    case MenuAction::settings: return "menu-settings";
    case MenuAction::exit: return "menu-exit";
    case MenuAction::close_settings: return "settings-close";
  }
  return "menu-new";
}

inline std::string cell_node_id(Position p) { return "cell-" + std::to_string(p.row) + "-" + std::to_string(p.col); }

class ScanTree {
 public:
  const ScanNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const std::vector<ScanNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  int keypad() const { return keypad_; }
  int settings() const { return settings_; }
  int order() const { return order_; }

  /// Node index for an id, or -1.
  int find(std::string_view id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].id == id) return static_cast<int>(i);
    return -1;
  }

  friend ScanTree build_scan_tree(const Grid& grid, const MenuDescription& menu);

 private:
  int add(ScanNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  void link(int parent, int child) { nodes_[static_cast<std::size_t>(parent)].children.push_back(child); }

  std::vector<ScanNode> nodes_;
  int root_ = -1;
  int keypad_ = -1;
  int settings_ = -1;
  int order_ = 3;
};

inline ScanTree build_scan_tree(const Grid& grid, const MenuDescription& menu) {
  ScanTree t;
  t.order_ = grid.order();
  t.root_ = t.add({.id = "root", .kind = NodeKind::group});
  const int grid_group = t.add({.id = "grid", .kind = NodeKind::group});
  const int menu_group = t.add({.id = "menu", .kind = NodeKind::group});
  t.link(t.root_, grid_group);
  t.link(t.root_, menu_group);

  const int a = grid.order();
  for (int band = 0; band < a; ++band) {
    int band_node = -1;
    for (int r = band * a + 1; r <= (band + 1) * a; ++r) {
      int row_node = -1;
      for (int c = 1; c <= grid.side(); ++c) {
        if (grid.at({r, c}).is_clue()) continue;
        if (band_node < 0) {
          band_node = t.add({.id = "band-" + std::to_string(band + 1), .kind = NodeKind::subgroup});
          t.link(grid_group, band_node);
        }
        if (row_node < 0) {
          row_node = t.add({.id = "row-" + std::to_string(r), .kind = NodeKind::row});
          t.link(band_node, row_node);
        }
        t.link(row_node, t.add({.id = cell_node_id({r, c}), .kind = NodeKind::cell, .cell = {r, c}}));
      }
    }
  }

  for (MenuAction m : menu.items) {
    t.link(menu_group, t.add({.id = menu_node_id(m), .kind = NodeKind::menu_item, .menu = m}));
  }

  t.keypad_ = t.add({.id = "keypad", .kind = NodeKind::group});
  for (int d = 1; d <= grid.max_value(); ++d) {
    t.link(t.keypad_, t.add({.id = "key-" + std::to_string(d), .kind = NodeKind::keypad_key, .key = KeyAction::digit, .digit = d}));
  }
  t.link(t.keypad_, t.add({.id = "key-erase", .kind = NodeKind::keypad_key, .key = KeyAction::erase}));
  t.link(t.keypad_, t.add({.id = "key-cancel", .kind = NodeKind::keypad_key, .key = KeyAction::cancel}));

  t.settings_ = t.add({.id = "settings", .kind = NodeKind::group});
  for (const SettingChoice& s : menu.settings) {
    const int item = t.add({.id = "setting-" + s.id, .kind = NodeKind::setting_item, .setting = s.id});
    t.link(t.settings_, item);
    for (const std::string& v : s.values) {
      t.link(item, t.add({.id = "setting-" + s.id + "=" + v, .kind = NodeKind::setting_value, .setting = s.id, .value = v}));
    }
  }
  t.link(t.settings_, t.add({.id = menu_node_id(MenuAction::close_settings), .kind = NodeKind::menu_item,
                             .menu = MenuAction::close_settings}));
  return t;
}

inline ScanTree build_scan_tree(const GameState& game, const MenuDescription& menu) {
  return build_scan_tree(game.grid, menu);
}

struct ScanConfig {
  int dwell_ms = 800;
  int repeat_cycles = 2;
  bool sound_enabled = true;
  std::string highlight_color = "#ffd700";

  void validate() const {
    if (dwell_ms < 200 || dwell_ms > 5000) throw std::invalid_argument("dwell_ms must be within [200, 5000]");
    if (repeat_cycles < 1 || repeat_cycles > 10) throw std::invalid_argument("repeat_cycles must be within [1, 10]");
  }

  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct ScanFrame {
  int node = 0;
  int child = 0;

  friend bool operator==(const ScanFrame&, const ScanFrame&) = default;
};

struct ScanState {
  bool active = false;
  std::vector<ScanFrame> path;
  int cycles_at_level = 0;
  std::optional<Position> pending;

  /// Index of the highlighted node, or -1 when inactive.
  int highlighted(const ScanTree& tree) const {
    if (!active || path.empty()) return -1;
    const ScanFrame& f = path.back();
    return tree.node(f.node).children.at(static_cast<std::size_t>(f.child));
  }

  friend bool operator==(const ScanState&, const ScanState&) = default;
};

enum class ActionKind {
  none,
  start_scan,
  place,
  erase,
  cancel,
  new_game,
  clear,
  solve,
  undo,
  open_settings,
  close_settings,
  exit,
  set_setting,
};

inline std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::none: return "none";
    case ActionKind::start_scan: return "start_scan";
    case ActionKind::place: return "place";
    case ActionKind::erase: return "erase";
    case ActionKind::cancel: return "cancel";
    case ActionKind::new_game: return "new_game";
    case ActionKind::clear: return "clear";
    case ActionKind::solve: return "solve";
    case ActionKind::undo: return "undo";
    case ActionKind::open_settings: return "open_settings";
    case ActionKind::close_settings: return "close_settings";
    case ActionKind::exit: return "exit";
    case ActionKind::set_setting: return "set_setting";
  }
  return "none";
}

inline std::optional<ActionKind> parse_action_kind(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(ActionKind::set_setting); ++i) {
    if (to_string(static_cast<ActionKind>(i)) == s) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

struct Action {
  ActionKind kind = ActionKind::none;
  Position pos{};
  int value = 0;
  std::string setting;
  std::string setting_value;

  friend bool operator==(const Action&, const Action&) = default;
};

inline Action menu_to_action(MenuAction m) {
  switch (m) {
    case MenuAction::new_game: return {ActionKind::new_game};
    case MenuAction::clear: return {ActionKind::clear};
    case MenuAction::solve: return {ActionKind::solve};
    case MenuAction::undo: return {ActionKind::undo};
    case MenuAction::settings: return {ActionKind::open_settings};
    case MenuAction::exit: return {ActionKind::exit};
    case MenuAction::close_settings: return {ActionKind::close_settings};
  }
  return {};
}

enum class ScanEventKind { highlight, ascend, stopped, action, noop };

struct ScanEvent {
  ScanEventKind kind = ScanEventKind::noop;
  std::string node_id;
  bool sound = false;
  Action action;

  friend bool operator==(const ScanEvent&, const ScanEvent&) = default;
};

struct ScanStep {
  ScanState state;
  std::vector<ScanEvent> events;
  Action action;
};

namespace detail {

inline void emit_highlight(const ScanState& s, const ScanTree& tree, const ScanConfig& config,
                           std::vector<ScanEvent>& out) {
  out.push_back({ScanEventKind::highlight, tree.node(s.highlighted(tree)).id, config.sound_enabled, {}});
}

inline void enter(ScanState& s, int node, const ScanTree& tree, const ScanConfig& config, std::vector<ScanEvent>& out) {
  s.path.push_back({node, 0});
  s.cycles_at_level = 0;
  emit_highlight(s, tree, config, out);
}

/// Restarts at the root level with the grid group highlighted.
inline void reset_to_root(ScanState& s, const ScanTree& tree, const ScanConfig& config, std::vector<ScanEvent>& out) {
  s.active = true;
  s.path.clear();
  s.pending.reset();
  enter(s, tree.root(), tree, config, out);
}

}  // namespace detail

/// RUN SCAN: activates scanning at the root level.
inline ScanStep activate(const ScanTree& tree, const ScanConfig& config) {
  ScanStep step;
  detail::reset_to_root(step.state, tree, config, step.events);
  step.action = {ActionKind::start_scan};
  return step;
}

inline ScanStep tick(ScanState s, const ScanTree& tree, const ScanConfig& config) {
  ScanStep step;
  if (!s.active) {
    step.state = std::move(s);
    step.events.push_back({ScanEventKind::noop});
    return step;
  }
  ScanFrame& top = s.path.back();
  const int siblings = static_cast<int>(tree.node(top.node).children.size());
  int next = top.child + 1;
  if (next < siblings) {
    top.child = next;
    detail::emit_highlight(s, tree, config, step.events);
  } else if (++s.cycles_at_level < config.repeat_cycles) {
    top.child = 0;
    detail::emit_highlight(s, tree, config, step.events);
  } else {
    // Timed out at this level.
    const int left = top.node;
    s.path.pop_back();
    if (left == tree.keypad()) s.pending.reset();
    step.events.push_back({ScanEventKind::ascend, tree.node(left).id});
    s.cycles_at_level = 0;
    if (s.path.empty()) {
      s.active = false;
      step.events.push_back({ScanEventKind::stopped});
    } else {
      detail::emit_highlight(s, tree, config, step.events);
    }
  }
  step.state = std::move(s);
  return step;
}

inline ScanStep press(ScanState s, const ScanTree& tree, const ScanConfig& config) {
  if (!s.active) return activate(tree, config);

  ScanStep step;
  auto& out = step.events;
  const int chosen = s.highlighted(tree);
  const ScanNode& node = tree.node(chosen);
  auto record = [&](Action a) {
    step.action = a;
    out.push_back({ScanEventKind::action, node.id, false, a});
  };

  switch (node.kind) {
    case NodeKind::group:
    case NodeKind::subgroup:
    case NodeKind::row:
    case NodeKind::setting_item:
      if (!node.children.empty()) {
        detail::enter(s, chosen, tree, config, out);
      } else {
        s.cycles_at_level = 0;
      }
      break;
    case NodeKind::cell:
      s.pending = node.cell;
      detail::enter(s, tree.keypad(), tree, config, out);
      break;
    case NodeKind::keypad_key: {
      const Position at = s.pending.value_or(Position{});
      switch (node.key) {
        case KeyAction::digit: record({ActionKind::place, at, node.digit}); break;
        case KeyAction::erase: record({ActionKind::erase, at}); break;
        case KeyAction::cancel: record({ActionKind::cancel, at}); break;
      }
      detail::reset_to_root(s, tree, config, out);
      break;
    }
    case NodeKind::menu_item:
      record(menu_to_action(node.menu));
      if (node.menu == MenuAction::settings) {
        detail::enter(s, tree.settings(), tree, config, out);
      } else if (node.menu == MenuAction::close_settings) {
        s.path.pop_back();
        s.cycles_at_level = 0;
        detail::emit_highlight(s, tree, config, out);
      } else if (node.menu == MenuAction::exit) {
        s.active = false;
        s.path.clear();
        s.pending.reset();
        s.cycles_at_level = 0;
      } else {
        s.cycles_at_level = 0;
      }
      break;
    case NodeKind::setting_value:
      record({ActionKind::set_setting, {}, 0, node.setting, node.value});
      s.path.pop_back();
      s.cycles_at_level = 0;
      detail::emit_highlight(s, tree, config, out);
      break;
  }
  step.state = std::move(s);
  return step;
}

/// Carries a scan position over to a rebuilt tree by node id. Falls back to
/// the root level when some level no longer exists.
inline ScanState rebase(const ScanState& s, const ScanTree& from, const ScanTree& to) {
  if (!s.active) return ScanState{};
  ScanState out = s;
  out.path.clear();
  for (const ScanFrame& f : s.path) {
    const int node = to.find(from.node(f.node).id);
    const int child = to.find(from.node(from.node(f.node).children.at(static_cast<std::size_t>(f.child))).id);
    if (node < 0 || child < 0) {
      ScanState root;
      root.active = true;
      root.path.push_back({to.root(), 0});
      return root;
    }
    const auto& kids = to.node(node).children;
    auto it = std::find(kids.begin(), kids.end(), child);
    if (it == kids.end()) {
      ScanState root;
      root.active = true;
      root.path.push_back({to.root(), 0});
      return root;
    }
    out.path.push_back({node, static_cast<int>(it - kids.begin())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scripts and transcripts (JSON Lines)
//
//   script:     {"event":"tick"} | {"event":"press"}
//   transcript: {"event":"highlight","node_id":"band-1","sound":true}
//               {"event":"ascend","node_id":"row-1"}
//               {"event":"stopped"}
//               {"event":"noop"}
//               {"event":"action","node_id":"key-5","action":{"type":"place","row":1,"col":1,"value":5}}

enum class ScriptEvent { tick, press };

using Transcript = std::vector<ScanEvent>;

/// Runs `script` from a freshly activated scan.
inline Transcript simulate(const ScanConfig& config, const ScanTree& tree, const std::vector<ScriptEvent>& script) {
  ScanStep step = activate(tree, config);
  Transcript out = step.events;
  ScanState state = step.state;
  for (ScriptEvent e : script) {
    step = e == ScriptEvent::tick ? tick(std::move(state), tree, config) : press(std::move(state), tree, config);
    state = std::move(step.state);
    out.insert(out.end(), step.events.begin(), step.events.end());
  }
  return out;
}

inline nlohmann::ordered_json action_to_json(const Action& a) {
  nlohmann::ordered_json j;
  j["type"] = std::string(to_string(a.kind));
  switch (a.kind) {
    case ActionKind::place:
      j["row"] = a.pos.row;
      j["col"] = a.pos.col;
      j["value"] = a.value;
      break;
    case ActionKind::erase:
    case ActionKind::cancel:
      j["row"] = a.pos.row;
      j["col"] = a.pos.col;
      break;
    case ActionKind::set_setting:
      j["setting"] = a.setting;
      j["value"] = a.setting_value;
      break;
    default: break;
  }
  return j;
}

inline Action action_from_json(const nlohmann::json& j) {
  Action a;
  auto kind = parse_action_kind(j.at("type").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown action type");
  a.kind = *kind;
  if (j.contains("row")) a.pos.row = j.at("row").get<int>();
  if (j.contains("col")) a.pos.col = j.at("col").get<int>();
  if (a.kind == ActionKind::set_setting) {
    a.setting = j.at("setting").get<std::string>();
    a.setting_value = j.at("value").get<std::string>();
  } else if (j.contains("value")) {
    a.value = j.at("value").get<int>();
  }
  return a;
}

inline std::string_view to_string(ScanEventKind k) {
  switch (k) {
    case ScanEventKind::highlight: return "highlight";
    case ScanEventKind::ascend: return "ascend";
    case ScanEventKind::stopped: return "stopped";
    case ScanEventKind::action: return "action";
    case ScanEventKind::noop: return "noop";
  }
  return "noop";
}

inline std::string format_event(const ScanEvent& e) {
  nlohmann::ordered_json j;
  j["event"] = std::string(to_string(e.kind));
  switch (e.kind) {
    case ScanEventKind::highlight:
      j["node_id"] = e.node_id;
      j["sound"] = e.sound;
      break;
    case ScanEventKind::ascend: j["node_id"] = e.node_id; break;
    case ScanEventKind::action:
      j["node_id"] = e.node_id;
      j["action"] = action_to_json(e.action);
      break;
    default: break;
  }
  return j.dump();
}

inline ScanEvent parse_event(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  const std::string kind = j.at("event").get<std::string>();
  ScanEvent e;
  if (kind == "highlight") {
    e.kind = ScanEventKind::highlight;
    e.node_id = j.at("node_id").get<std::string>();
    e.sound = j.at("sound").get<bool>();
  } else if (kind == "ascend") {
    e.kind = ScanEventKind::ascend;
    e.node_id = j.at("node_id").get<std::string>();
  } else if (kind == "stopped") {
    e.kind = ScanEventKind::stopped;
  } else if (kind == "noop") {
    e.kind = ScanEventKind::noop;
  } else if (kind == "action") {
    e.kind = ScanEventKind::action;
    e.node_id = j.at("node_id").get<std::string>();
    e.action = action_from_json(j.at("action"));
  } else {
    throw std::invalid_argument("unknown transcript event '" + kind + "'");
  }
  return e;
}

inline std::string format_transcript(const Transcript& t) {
  std::string out;
  for (const ScanEvent& e : t) out += format_event(e) + "\n";
  return out;
}

inline std::vector<ScriptEvent> parse_script(const std::string& text) {
  std::vector<ScriptEvent> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(static_cast<int>(line_no), 1, e.what());
    }
    if (!j.is_object() || !j.contains("event") || !j["event"].is_string()) {
      throw ParseError(static_cast<int>(line_no), 1, "expected {\"event\": \"tick\"|\"press\"}");
    }
    const std::string ev = j["event"].get<std::string>();
    if (ev == "tick") {
      out.push_back(ScriptEvent::tick);
    } else if (ev == "press") {
      out.push_back(ScriptEvent::press);
    } else {
      throw ParseError(static_cast<int>(line_no), 1, "unknown script event '" + ev + "'");
    }
  }
  return out;
}

inline std::string format_script(const std::vector<ScriptEvent>& script) {
  std::string out;
  for (ScriptEvent e : script) out += e == ScriptEvent::tick ? "{\"event\":\"tick\"}\n" : "{\"event\":\"press\"}\n";
  return out;
}

// Machine state <-> JSON, with nodes addressed by id so a saved state can be
// restored against a rebuilt tree.

inline nlohmann::ordered_json scan_state_to_json(const ScanState& s, const ScanTree& tree) {
  nlohmann::ordered_json j;
  j["active"] = s.active;
  j["path"] = nlohmann::ordered_json::array();
  for (const ScanFrame& f : s.path) j["path"].push_back({{"node", tree.node(f.node).id}, {"child", f.child}});
  j["cycles_at_level"] = s.cycles_at_level;
  if (s.pending) {
    j["pending"] = {{"row", s.pending->row}, {"col", s.pending->col}};
  } else {
    j["pending"] = nullptr;
  }
  return j;
}

inline ScanState scan_state_from_json(const nlohmann::json& j, const ScanTree& tree) {
  ScanState s;
  s.active = j.at("active").get<bool>();
  for (const auto& f : j.at("path")) {
    const int node = tree.find(f.at("node").get<std::string>());
    const int child = f.at("child").get<int>();
    if (node < 0 || child < 0 || child >= static_cast<int>(tree.node(node).children.size())) {
      throw std::invalid_argument("scan path does not match the scan tree");
    }
    s.path.push_back({node, child});
  }
  s.cycles_at_level = j.at("cycles_at_level").get<int>();
  if (!j.at("pending").is_null()) s.pending = Position{j["pending"].at("row").get<int>(), j["pending"].at("col").get<int>()};
  return s;
}

}  // namespace access_sudoku
