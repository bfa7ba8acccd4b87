#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "access_sudoku/session.hpp"

namespace access_sudoku {

// Line-delimited JSON envelope shared by the socket server and clients:
//   {"type":"<type>","session":"<id>","payload":{...}}
// One message per line, no embedded newlines.

inline constexpr std::array<std::string_view, 10> kClientMessageTypes{
    "session.create", "input.switch", "input.voice", "input.pointer", "input.command",
    "settings.update", "state.get",   "session.close", "session.save", "session.load"};

inline constexpr std::array<std::string_view, 10> kServerMessageTypes{
    "state.snapshot",     "event.highlight", "event.grid",  "event.completed", "event.error",
    "session.closed", "event.scan_stopped", "event.settings", "event.voice",  "session.saved"};

struct Message {
  std::string type;
  std::string session;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  friend bool operator==(const Message& a, const Message& b) {
    return a.type == b.type && a.session == b.session && a.payload == b.payload;
  }
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string encode(const Message& m) {
  nlohmann::ordered_json j;
  j["type"] = m.type;
  j["session"] = m.session;
  j["payload"] = m.payload;
  return j.dump();
}

/// Parses one line. `session` and `payload` may be omitted.
inline Message decode(std::string_view line) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("message needs a string 'type'");
  Message m;
  m.type = j["type"].get<std::string>();
  if (j.contains("session")) {
    if (!j["session"].is_string()) throw ProtocolError("'session' must be a string");
    m.session = j["session"].get<std::string>();
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) throw ProtocolError("'payload' must be an object");
    m.payload = j["payload"];
  }
  for (const auto& [key, _] : j.items())
    if (key != "type" && key != "session" && key != "payload") throw ProtocolError("unexpected field '" + key + "'");
  return m;
}

inline Message error_message(std::string session, std::string code, std::string text) {
  return {"event.error", std::move(session), {{"code", std::move(code)}, {"message", std::move(text)}}};
}

/// Server message for one session output event.
inline Message event_message(const std::string& session, const OutputEvent& e) {
  nlohmann::ordered_json payload = output_to_json(e);
  payload.erase("type");
  switch (e.kind) {
    case OutputKind::highlight: return {"event.highlight", session, payload};
    case OutputKind::grid_changed: return {"event.grid", session, payload};
    case OutputKind::scan_stopped: return {"event.scan_stopped", session, payload};
    case OutputKind::game_completed: return {"event.completed", session, payload};
    case OutputKind::settings_changed: return {"event.settings", session, payload};
    case OutputKind::voice: return {"event.voice", session, payload};
    case OutputKind::error: return {"event.error", session, payload};
    case OutputKind::session_closed: return {"session.closed", session, payload};
  }
  return error_message(session, "internal", "unmapped output event");
}

/// Inverse of event_message for the event.* and session.closed types.
inline OutputEvent output_from_message(const Message& m) {
  static const std::array<std::pair<std::string_view, std::string_view>, 8> names{{
      {"event.highlight", "highlight"},
      {"event.grid", "grid_changed"},
      {"event.scan_stopped", "scan_stopped"},
      {"event.completed", "game_completed"},
      {"event.settings", "settings_changed"},
      {"event.voice", "voice"},
      {"event.error", "error"},
      {"session.closed", "session_closed"},
  }};
  for (auto [type, kind] : names) {
    if (m.type != type) continue;
    nlohmann::ordered_json j{{"type", kind}};
    for (const auto& [k, v] : m.payload.items()) j[k] = v;
    return output_from_json(j);
  }
  throw ProtocolError("'" + m.type + "' is not an output event");
}

/// Maps a client input message to a session input. Throws ProtocolError.
inline InputEvent input_from_message(const Message& m) {
  try {
    if (m.type == "input.switch") {
      const std::string action = m.payload.value("action", std::string("press"));
      if (action == "press") return InputEvent::switch_press();
      if (action == "tick") return InputEvent::tick();
      throw ProtocolError("input.switch action must be press or tick");
    }
    if (m.type == "input.voice") return InputEvent::voice(m.payload.at("token").get<std::string>());
    if (m.type == "input.pointer") return InputEvent::pointer(m.payload.at("node_id").get<std::string>());
    if (m.type == "input.command") {
      const auto c = parse_command(m.payload.at("command").get<std::string>());
      if (!c) throw ProtocolError("unknown command");
      return InputEvent::cmd(*c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("bad payload: ") + e.what());
  }
  throw ProtocolError("'" + m.type + "' is not an input message");
}

}  // namespace access_sudoku
