#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace access_sudoku {

// Spoken indices are restricted to 1..9, so voice entry only covers 9x9 games.
inline constexpr int kVoiceOrder = 3;
inline constexpr int kVoiceMaxDigit = 9;
inline constexpr int kVoiceMaxNumber = 15;

enum class VoiceOption { difficulty = 1, row_col_color = 2, size = 3, training = 4, close = 5 };

/// Number of spoken values accepted after choosing a settings option.
inline int voice_option_value_count(VoiceOption o) {
  switch (o) {
    case VoiceOption::difficulty: return 3;
    case VoiceOption::row_col_color: return 6;
    case VoiceOption::size: return 5;
    default: return 0;
  }
}

struct VoiceToken {
  enum class Kind { number, yes, no };
  Kind kind = Kind::number;
  int number = 0;

  static VoiceToken num(int n) { return {Kind::number, n}; }
  static VoiceToken yes() { return {Kind::yes, 0}; }
  static VoiceToken no() { return {Kind::no, 0}; }

  friend bool operator==(const VoiceToken&, const VoiceToken&) = default;
};

inline std::string to_string(const VoiceToken& t) {
  switch (t.kind) {
    case VoiceToken::Kind::yes: return "yes";
    case VoiceToken::Kind::no: return "no";
    case VoiceToken::Kind::number: return std::to_string(t.number);
  }
  return {};
}

/// Wire form only: "1".."15", "yes", "no". Anything else is not a token.
inline std::optional<VoiceToken> parse_voice_token(std::string_view s) {
  if (s == "yes") return VoiceToken::yes();
  if (s == "no") return VoiceToken::no();
  if (s.empty() || s.size() > 2 || s[0] == '0') return std::nullopt;
  int n = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return std::nullopt;
    n = n * 10 + (ch - '0');
  }
  if (n < 1 || n > kVoiceMaxNumber) return std::nullopt;
  return VoiceToken::num(n);
}

/// The whole finite alphabet in canonical order: 1..15, yes, no.
inline std::vector<VoiceToken> voice_alphabet() {
  std::vector<VoiceToken> out;
  for (int n = 1; n <= kVoiceMaxNumber; ++n) out.push_back(VoiceToken::num(n));
  out.push_back(VoiceToken::yes());
  out.push_back(VoiceToken::no());
  return out;
}

enum class VoiceMode { idle, await_row_confirm, await_col, await_col_confirm, await_value, settings_menu, settings_value };

inline std::string_view to_string(VoiceMode m) {
  switch (m) {
    case VoiceMode::idle: return "idle";
    case VoiceMode::await_row_confirm: return "await_row_confirm";
    case VoiceMode::await_col: return "await_col";
    case VoiceMode::await_col_confirm: return "await_col_confirm";
    case VoiceMode::await_value: return "await_value";
    case VoiceMode::settings_menu: return "settings_menu";
    case VoiceMode::settings_value: return "settings_value";
  }
  return "?";
}

inline std::optional<VoiceMode> parse_voice_mode(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(VoiceMode::settings_value); ++i)
    if (to_string(static_cast<VoiceMode>(i)) == s) return static_cast<VoiceMode>(i);
  return std::nullopt;
}

struct VoiceState {
  VoiceMode mode = VoiceMode::idle;
  int row = 0;
  int col = 0;
  int option = 0;

  static VoiceState idle() { return {}; }
  static VoiceState await_row_confirm(int r) { return {VoiceMode::await_row_confirm, r, 0, 0}; }
  static VoiceState await_col(int r) { return {VoiceMode::await_col, r, 0, 0}; }
  static VoiceState await_col_confirm(int r, int c) { return {VoiceMode::await_col_confirm, r, c, 0}; }
  static VoiceState await_value(int r, int c) { return {VoiceMode::await_value, r, c, 0}; }
  static VoiceState settings_menu() { return {VoiceMode::settings_menu, 0, 0, 0}; }
  static VoiceState settings_value(int option) { return {VoiceMode::settings_value, 0, 0, option}; }

  /// Fields not used by the mode are zero; used ones are in range.
  bool well_formed() const {
    auto digit = [](int v) { return v >= 1 && v <= kVoiceMaxDigit; };
    switch (mode) {
      case VoiceMode::idle:
      case VoiceMode::settings_menu: return row == 0 && col == 0 && option == 0;
      case VoiceMode::await_row_confirm:
      case VoiceMode::await_col: return digit(row) && col == 0 && option == 0;
      case VoiceMode::await_col_confirm:
      case VoiceMode::await_value: return digit(row) && digit(col) && option == 0;
      case VoiceMode::settings_value:
        return row == 0 && col == 0 && voice_option_value_count(static_cast<VoiceOption>(option)) > 0;
    }
    return false;
  }

  friend bool operator==(const VoiceState&, const VoiceState&) = default;
};

enum class VoiceEffectKind { place, new_game, clear_all, solve, undo, exit, open_settings, set_option, prompt, rejected };

inline std::string_view to_string(VoiceEffectKind k) {
  switch (k) {
    case VoiceEffectKind::place: return "place";
    case VoiceEffectKind::new_game: return "new_game";
    case VoiceEffectKind::clear_all: return "clear_all";
    case VoiceEffectKind::solve: return "solve";
    case VoiceEffectKind::undo: return "undo";
    case VoiceEffectKind::exit: return "exit";
    case VoiceEffectKind::open_settings: return "open_settings";
    case VoiceEffectKind::set_option: return "set_option";
    case VoiceEffectKind::prompt: return "prompt";
    case VoiceEffectKind::rejected: return "rejected";
  }
  return "?";
}

struct VoiceEffect {
  VoiceEffectKind kind = VoiceEffectKind::prompt;
  int row = 0;
  int col = 0;
  int value = 0;   // digit for place, chosen value for set_option
  int option = 0;  // set_option only
  std::string text;  // prompt id or rejection reason

  static VoiceEffect place(int r, int c, int v) { return {VoiceEffectKind::place, r, c, v, 0, {}}; }
  static VoiceEffect set_option(int option, int value) { return {VoiceEffectKind::set_option, 0, 0, value, option, {}}; }
  static VoiceEffect prompt(std::string id) { return {VoiceEffectKind::prompt, 0, 0, 0, 0, std::move(id)}; }
  static VoiceEffect rejected(std::string reason) { return {VoiceEffectKind::rejected, 0, 0, 0, 0, std::move(reason)}; }
  static VoiceEffect command(VoiceEffectKind k) { return {k, 0, 0, 0, 0, {}}; }

  friend bool operator==(const VoiceEffect&, const VoiceEffect&) = default;
};

struct VoiceStep {
  VoiceState state;
  std::vector<VoiceEffect> effects;
};

namespace detail {

inline bool is_digit_token(const VoiceToken& t, int max = kVoiceMaxDigit) {
  return t.kind == VoiceToken::Kind::number && t.number >= 1 && t.number <= max;
}

inline VoiceStep reject(const VoiceState& s, const VoiceToken& t) {
  return {s, {VoiceEffect::rejected("unexpected token '" + to_string(t) + "' in " + std::string(to_string(s.mode)))}};
}

inline VoiceStep confirm(const VoiceToken& t, const VoiceState& s, VoiceState on_yes, std::string yes_prompt,
                         VoiceState on_no, std::string no_prompt) {
  if (t.kind == VoiceToken::Kind::yes) return {on_yes, {VoiceEffect::prompt(std::move(yes_prompt))}};
  if (t.kind == VoiceToken::Kind::no) return {on_no, {VoiceEffect::prompt(std::move(no_prompt))}};
  return reject(s, t);
}

}  // namespace detail

/// Total over every (state, token). Unexpected tokens leave the state as is
/// and produce a single rejected effect.
inline VoiceStep interpret(const VoiceState& s, const VoiceToken& t) {
  using detail::is_digit_token;
  switch (s.mode) {
    case VoiceMode::idle:
      if (is_digit_token(t)) return {VoiceState::await_row_confirm(t.number), {VoiceEffect::prompt("confirm_row")}};
      if (t.kind == VoiceToken::Kind::number && t.number >= 10 && t.number <= 15) {
        switch (t.number) {
          case 10: return {s, {VoiceEffect::command(VoiceEffectKind::new_game)}};
          case 11: return {s, {VoiceEffect::command(VoiceEffectKind::clear_all)}};
          case 12: return {s, {VoiceEffect::command(VoiceEffectKind::solve)}};
          case 13: return {s, {VoiceEffect::command(VoiceEffectKind::undo)}};
          case 14: return {VoiceState::settings_menu(), {VoiceEffect::command(VoiceEffectKind::open_settings)}};
          default: return {s, {VoiceEffect::command(VoiceEffectKind::exit)}};
        }
      }
      return detail::reject(s, t);
    case VoiceMode::await_row_confirm:
      return detail::confirm(t, s, VoiceState::await_col(s.row), "choose_column", VoiceState::idle(), "choose_row");
    case VoiceMode::await_col:
      if (is_digit_token(t)) return {VoiceState::await_col_confirm(s.row, t.number), {VoiceEffect::prompt("confirm_column")}};
      return detail::reject(s, t);
    case VoiceMode::await_col_confirm:
      return detail::confirm(t, s, VoiceState::await_value(s.row, s.col), "choose_value", VoiceState::await_col(s.row),
                             "choose_column");
    case VoiceMode::await_value:
      if (is_digit_token(t)) return {VoiceState::idle(), {VoiceEffect::place(s.row, s.col, t.number)}};
      return detail::reject(s, t);
    case VoiceMode::settings_menu:
      if (!is_digit_token(t, 5)) return detail::reject(s, t);
      switch (static_cast<VoiceOption>(t.number)) {
        case VoiceOption::training: return {s, {VoiceEffect::prompt("recognizer_training")}};
        case VoiceOption::close: return {VoiceState::idle(), {VoiceEffect::prompt("settings_closed")}};
        default: return {VoiceState::settings_value(t.number), {VoiceEffect::prompt("choose_setting_value")}};
      }
    case VoiceMode::settings_value:
      if (is_digit_token(t, voice_option_value_count(static_cast<VoiceOption>(s.option))))
        return {VoiceState::settings_menu(), {VoiceEffect::set_option(s.option, t.number)}};
      return detail::reject(s, t);
  }
  return detail::reject(s, t);
}

/// Exactly the tokens interpret() accepts in `s`, in alphabet order.
inline std::vector<VoiceToken> vocabulary(const VoiceState& s) {
  auto numbers = [](int lo, int hi) {
    std::vector<VoiceToken> out;
    for (int n = lo; n <= hi; ++n) out.push_back(VoiceToken::num(n));
    return out;
  };
  switch (s.mode) {
    case VoiceMode::idle: return numbers(1, 15);
    case VoiceMode::await_row_confirm:
    case VoiceMode::await_col_confirm: return {VoiceToken::yes(), VoiceToken::no()};
    case VoiceMode::await_col:
    case VoiceMode::await_value: return numbers(1, kVoiceMaxDigit);
    case VoiceMode::settings_menu: return numbers(1, 5);
    case VoiceMode::settings_value: return numbers(1, voice_option_value_count(static_cast<VoiceOption>(s.option)));
  }
  return {};
}

inline VoiceState reset(const VoiceState&) { return VoiceState::idle(); }

inline nlohmann::ordered_json voice_state_to_json(const VoiceState& s) {
  return {{"mode", to_string(s.mode)}, {"row", s.row}, {"col", s.col}, {"option", s.option}};
}

inline VoiceState voice_state_from_json(const nlohmann::json& j) {
  const auto mode = parse_voice_mode(j.at("mode").get<std::string>());
  if (!mode) throw std::invalid_argument("unknown voice mode");
  VoiceState s{*mode, j.at("row").get<int>(), j.at("col").get<int>(), j.at("option").get<int>()};
  if (!s.well_formed()) throw std::invalid_argument("malformed voice state");
  return s;
}

inline nlohmann::ordered_json voice_effect_to_json(const VoiceEffect& e) {
  nlohmann::ordered_json j{{"kind", to_string(e.kind)}};
  switch (e.kind) {
    case VoiceEffectKind::place: j["row"] = e.row, j["col"] = e.col, j["value"] = e.value; break;
    case VoiceEffectKind::set_option: j["option"] = e.option, j["value"] = e.value; break;
    case VoiceEffectKind::prompt:
    case VoiceEffectKind::rejected: j["text"] = e.text; break;
    default: break;
  }
  return j;
}

}  // namespace access_sudoku
