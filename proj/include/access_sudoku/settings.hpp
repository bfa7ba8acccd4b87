#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "access_sudoku/generator.hpp"
#include "access_sudoku/grid.hpp"
#include "access_sudoku/scanning.hpp"
#include "access_sudoku/voice.hpp"

namespace access_sudoku {

enum class InputDevice { pointer, switch_access, space_key, voice };

inline std::string_view to_string(InputDevice d) {
  switch (d) {
    case InputDevice::pointer: return "pointer";
    case InputDevice::switch_access: return "switch";
    case InputDevice::space_key: return "space-key";
    case InputDevice::voice: return "voice";
  }
  return "?";
}

inline std::optional<InputDevice> parse_input_device(std::string_view s) {
  for (InputDevice d : {InputDevice::pointer, InputDevice::switch_access, InputDevice::space_key, InputDevice::voice})
    if (to_string(d) == s) return d;
  return std::nullopt;
}

inline bool is_scanning_device(InputDevice d) { return d == InputDevice::switch_access || d == InputDevice::space_key; }

/// Colors offered by the settings panels; voice option 2 picks by 1-based index.
inline constexpr std::array<std::string_view, 6> kHighlightPalette{"#add8e6", "#90ee90", "#ffd700",
                                                                   "#ffb6c1", "#d8bfd8", "#f5deb3"};
static_assert(kHighlightPalette.size() == 6);

inline constexpr std::array<int, 7> kDwellChoices{300, 400, 600, 800, 1000, 1500, 2000};

struct Settings {
  int order = 3;
  Difficulty difficulty = Difficulty::easy;
  int scan_dwell_ms = 800;
  int scan_repeat_cycles = 2;
  bool scan_sound = true;
  std::string scan_highlight_color = "#ffd700";
  std::string row_col_highlight_color = "#add8e6";
  InputDevice input_device = InputDevice::switch_access;

  ScanConfig scan_config() const { return {scan_dwell_ms, scan_repeat_cycles, scan_sound, scan_highlight_color}; }

  friend bool operator==(const Settings&, const Settings&) = default;
};

struct FieldError {
  std::string field;
  std::string message;

  friend bool operator==(const FieldError&, const FieldError&) = default;
};

class SettingsError : public std::invalid_argument {
 public:
  explicit SettingsError(std::vector<FieldError> errors)
      : std::invalid_argument(describe(errors)), errors_(std::move(errors)) {}
  SettingsError(std::string field, std::string message)
      : SettingsError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  static std::string describe(const std::vector<FieldError>& errors) {
    std::string out = "invalid settings:";
    for (const auto& e : errors) out += " " + e.field + ": " + e.message + ";";
    return out;
  }
  std::vector<FieldError> errors_;
};

inline bool is_hex_color(std::string_view s) {
  if (s.size() != 7 || s[0] != '#') return false;
  for (char c : s.substr(1))
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

/// Empty when every field is in range.
inline std::vector<FieldError> validate(const Settings& s) {
  std::vector<FieldError> out;
  if (s.order < kMinOrder || s.order > kMaxOrder) out.push_back({"order", "must be within [1, 5]"});
  if (s.scan_dwell_ms < 200 || s.scan_dwell_ms > 5000) out.push_back({"scan_dwell_ms", "must be within [200, 5000]"});
  if (s.scan_repeat_cycles < 1 || s.scan_repeat_cycles > 10)
    out.push_back({"scan_repeat_cycles", "must be within [1, 10]"});
  if (!is_hex_color(s.scan_highlight_color)) out.push_back({"scan_highlight_color", "must be #rrggbb"});
  if (!is_hex_color(s.row_col_highlight_color)) out.push_back({"row_col_highlight_color", "must be #rrggbb"});
  if (s.input_device == InputDevice::voice && s.order != kVoiceOrder)
    out.push_back({"input_device", "voice input requires order 3"});
  return out;
}

inline void require_valid(const Settings& s) {
  auto errors = validate(s);
  if (!errors.empty()) throw SettingsError(std::move(errors));
}

inline nlohmann::ordered_json settings_to_json(const Settings& s) {
  return {{"order", s.order},
          {"difficulty", to_string(s.difficulty)},
          {"scan_dwell_ms", s.scan_dwell_ms},
          {"scan_repeat_cycles", s.scan_repeat_cycles},
          {"scan_sound", s.scan_sound},
          {"scan_highlight_color", s.scan_highlight_color},
          {"row_col_highlight_color", s.row_col_highlight_color},
          {"input_device", to_string(s.input_device)}};
}

/// Missing fields take their defaults; unknown fields and wrong types are
/// field errors. The result is validated.
inline Settings settings_from_json(const nlohmann::json& j, Settings base = {}) {
  if (!j.is_object()) throw SettingsError("", "settings must be an object");
  std::vector<FieldError> errors;
  Settings s = std::move(base);
  for (const auto& [key, v] : j.items()) {
    auto expect = [&](bool ok, const char* what) {
      if (!ok) errors.push_back({key, std::string("must be ") + what});
      return ok;
    };
    if (key == "order") {
      if (expect(v.is_number_integer(), "an integer")) s.order = v.get<int>();
    } else if (key == "difficulty") {
      const auto d = v.is_string() ? parse_difficulty(v.get<std::string>()) : std::nullopt;
      if (expect(d.has_value(), "easy, medium or hard")) s.difficulty = *d;
    } else if (key == "scan_dwell_ms") {
      if (expect(v.is_number_integer(), "an integer")) s.scan_dwell_ms = v.get<int>();
    } else if (key == "scan_repeat_cycles") {
      if (expect(v.is_number_integer(), "an integer")) s.scan_repeat_cycles = v.get<int>();
    } else if (key == "scan_sound") {
      if (expect(v.is_boolean(), "a boolean")) s.scan_sound = v.get<bool>();
    } else if (key == "scan_highlight_color") {
      if (expect(v.is_string(), "a string")) s.scan_highlight_color = v.get<std::string>();
    } else if (key == "row_col_highlight_color") {
      if (expect(v.is_string(), "a string")) s.row_col_highlight_color = v.get<std::string>();
    } else if (key == "input_device") {
      const auto d = v.is_string() ? parse_input_device(v.get<std::string>()) : std::nullopt;
      if (expect(d.has_value(), "pointer, switch, space-key or voice")) s.input_device = *d;
    } else {
      errors.push_back({key, "unknown field"});
    }
  }
  if (errors.empty()) errors = validate(s);
  if (!errors.empty()) throw SettingsError(std::move(errors));
  return s;
}

inline void save_settings_file(const std::string& path, const Settings& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << settings_to_json(s).dump(2) << "\n";
}

/// A missing file yields the defaults.
inline Settings load_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Settings{};
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SettingsError("", std::string("not valid JSON: ") + e.what());
  }
  return settings_from_json(j);
}

/// What the scanning settings panel offers, in scan order.
inline std::vector<SettingChoice> settings_catalogue() {
  std::vector<SettingChoice> out;
  out.push_back({"difficulty", {"easy", "medium", "hard"}});
  out.push_back({"order", {"2", "3", "4", "5"}});
  SettingChoice dwell{"scan_dwell_ms", {}};
  for (int d : kDwellChoices) dwell.values.push_back(std::to_string(d));
  out.push_back(dwell);
  out.push_back({"scan_repeat_cycles", {"1", "2", "3", "4", "5"}});
  out.push_back({"scan_sound", {"on", "off"}});
  SettingChoice scan_color{"scan_highlight_color", {}}, row_col{"row_col_highlight_color", {}};
  for (auto c : kHighlightPalette) {
    scan_color.values.emplace_back(c);
    row_col.values.emplace_back(c);
  }
  out.push_back(scan_color);
  out.push_back(row_col);
  out.push_back({"input_device", {"pointer", "switch", "space-key", "voice"}});
  return out;
}

/// Applies one textual setting value (as produced by a settings panel). Throws SettingsError.
inline Settings apply_setting(Settings s, std::string_view id, std::string_view value) {
  nlohmann::json patch;
  const std::string key(id), v(value);
  if (id == "order" || id == "scan_dwell_ms" || id == "scan_repeat_cycles") {
    try {
      std::size_t used = 0;
      const int n = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      patch[key] = n;
    } catch (const std::exception&) {
      throw SettingsError(key, "must be an integer");
    }
  } else if (id == "scan_sound") {
    if (value != "on" && value != "off") throw SettingsError(key, "must be on or off");
    patch[key] = value == "on";
  } else {
    patch[key] = v;
  }
  return settings_from_json(patch, std::move(s));
}

/// Voice settings submenu: option 1 difficulty, 2 row/column color, 3 size.
inline Settings apply_voice_option(Settings s, int option, int value) {
  switch (static_cast<VoiceOption>(option)) {
    case VoiceOption::difficulty:
      if (value < 1 || value > 3) break;
      s.difficulty = static_cast<Difficulty>(value - 1);
      require_valid(s);
      return s;
    case VoiceOption::row_col_color:
      if (value < 1 || value > static_cast<int>(kHighlightPalette.size())) break;
      s.row_col_highlight_color = std::string(kHighlightPalette[static_cast<std::size_t>(value - 1)]);
      require_valid(s);
      return s;
    case VoiceOption::size:
      if (value < kMinOrder || value > kMaxOrder) break;
      s.order = value;
      require_valid(s);
      return s;
    default: break;
  }
  throw SettingsError("voice_option", "option " + std::to_string(option) + " value " + std::to_string(value));
}

}  // namespace access_sudoku
