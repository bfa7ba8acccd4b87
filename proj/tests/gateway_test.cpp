#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "access_sudoku/gateway.hpp"

using namespace access_sudoku;
using namespace std::chrono_literals;

namespace {

std::vector<std::string> golden_lines(const std::string& name) {
  std::ifstream in(std::string(ACCESS_SUDOKU_GOLDEN_DIR) + "/protocol/" + name);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

Message msg(std::string type, std::string session, nlohmann::ordered_json payload = nlohmann::ordered_json::object()) {
  return {std::move(type), std::move(session), std::move(payload)};
}

nlohmann::ordered_json create_payload(std::uint64_t seed, nlohmann::ordered_json settings = nlohmann::ordered_json::object()) {
  return {{"settings", std::move(settings)}, {"seed", seed}};
}

DispatcherOptions manual() { return {false, 1.0}; }

std::vector<Message> of_type(const std::vector<Message>& ms, const std::string& type) {
  std::vector<Message> out;
  for (const auto& m : ms)
    if (m.type == type) out.push_back(m);
  return out;
}

}  // namespace

TEST(Protocol, GoldenClientMessagesRoundTrip) {
  const auto lines = golden_lines("client.jsonl");
  ASSERT_EQ(lines.size(), 11u);
  std::set<std::string> types;
  for (const auto& line : lines) {
    const Message m = decode(line);
    EXPECT_EQ(encode(m), line);
    types.insert(m.type);
  }
  EXPECT_EQ(types, std::set<std::string>(kClientMessageTypes.begin(), kClientMessageTypes.end()));
}

TEST(Protocol, GoldenServerMessagesRoundTrip) {
  std::set<std::string> types;
  for (const auto& line : golden_lines("server_events.jsonl")) {
    const Message m = decode(line);
    EXPECT_EQ(encode(m), line);
    EXPECT_EQ(encode(event_message(m.session, output_from_message(m))), line);
    types.insert(m.type);
  }
  for (const auto& line : golden_lines("server_other.jsonl")) {
    EXPECT_EQ(encode(decode(line)), line);
    types.insert(decode(line).type);
  }
  EXPECT_EQ(types, std::set<std::string>(kServerMessageTypes.begin(), kServerMessageTypes.end()));
}

TEST(Protocol, DecodeErrors) {
  EXPECT_THROW(decode("{"), ProtocolError);
  EXPECT_THROW(decode("[1]"), ProtocolError);
  EXPECT_THROW(decode("{\"session\":\"s1\"}"), ProtocolError);
  EXPECT_THROW(decode("{\"type\":\"state.get\",\"payload\":3}"), ProtocolError);
  EXPECT_THROW(decode("{\"type\":\"state.get\",\"extra\":1}"), ProtocolError);
  const Message bare = decode("{\"type\":\"state.get\"}");
  EXPECT_EQ(bare.session, "");
  EXPECT_TRUE(bare.payload.empty());
}

TEST(Protocol, InputMapping) {
  EXPECT_EQ(input_from_message(msg("input.switch", "s", {{"action", "tick"}})), InputEvent::tick());
  EXPECT_EQ(input_from_message(msg("input.switch", "s")), InputEvent::switch_press());
  EXPECT_EQ(input_from_message(msg("input.voice", "s", {{"token", "yes"}})), InputEvent::voice("yes"));
  EXPECT_EQ(input_from_message(msg("input.command", "s", {{"command", "solve"}})), InputEvent::cmd(Command::solve));
  EXPECT_THROW(input_from_message(msg("input.voice", "s")), ProtocolError);
  EXPECT_THROW(input_from_message(msg("input.switch", "s", {{"action", "hold"}})), ProtocolError);
}

TEST(InProcess, CreateThenSnapshot) {
  Dispatcher d(manual());
  InProcessClient c(d);
  c.send(msg("session.create", "", create_payload(42)));
  const auto created = c.next();
  ASSERT_TRUE(created);
  EXPECT_EQ(created->type, "state.snapshot");
  EXPECT_FALSE(created->session.empty());
  c.send(msg("state.get", created->session));
  const auto snap = c.next();
  ASSERT_TRUE(snap);
  EXPECT_EQ(snap->type, "state.snapshot");
  EXPECT_EQ(snap->session, created->session);
  EXPECT_EQ(snap->payload["cells"].size(), 81u);
  EXPECT_EQ(snap->payload, create_session({}, 42).snapshot());
}

TEST(InProcess, FivePressEntrySwitchStream) {
  Dispatcher d(manual());
  InProcessClient c(d);
  c.send(msg("session.create", "", create_payload(7)));
  const std::string id = c.next()->session;
  const Session reference = create_session({}, 7);
  const int band = reference.scan_tree().node(reference.scan_tree().find("grid")).children[0];
  const int row = reference.scan_tree().node(band).children[0];
  const Position target = reference.scan_tree().node(reference.scan_tree().node(row).children[0]).cell;

  c.send(msg("input.command", id, {{"command", "run_scan"}}));
  for (int i = 0; i < 4; ++i) c.send(msg("input.switch", id, {{"action", "press"}}));
  for (int i = 0; i < 4; ++i) c.send(msg("input.switch", id, {{"action", "tick"}}));
  c.send(msg("input.switch", id, {{"action", "press"}}));
  const auto grids = of_type(c.drain(), "event.grid");
  ASSERT_EQ(grids.size(), 1u);
  const OutputEvent e = output_from_message(grids[0]);
  EXPECT_EQ(e.diff.cells, (std::vector<CellChange>{{target, Entry::user(5)}}));
  EXPECT_EQ(grids[0].session, id);
}

TEST(InProcess, ErrorsAndLifecycle) {
  Dispatcher d(manual());
  InProcessClient c(d);
  c.send(msg("teleport", "s1"));
  auto r = c.next();
  EXPECT_EQ(r->type, "event.error");
  EXPECT_EQ(r->payload["code"], "unknown-type");
  EXPECT_EQ(r->session, "s1");

  c.send(msg("state.get", "nope"));
  EXPECT_EQ(c.next()->payload["code"], "unknown-session");

  c.send(msg("session.create", "", create_payload(1, {{"input_device", "voice"}, {"order", 2}})));
  EXPECT_EQ(c.next()->payload["code"], "invalid-settings");

  c.send(msg("session.create", "", create_payload(1)));
  const std::string id = c.next()->session;
  c.send(msg("input.voice", id, {{"token", "3"}}));
  r = c.next();
  EXPECT_EQ(r->payload["code"], "wrong-input-device");
  c.send(msg("input.voice", id));
  EXPECT_EQ(c.next()->payload["code"], "bad-request");

  c.send(msg("settings.update", id, {{"settings", {{"scan_dwell_ms", 900}}}}));
  r = c.next();
  EXPECT_EQ(r->type, "event.settings");
  EXPECT_EQ(r->payload["settings"]["scan_dwell_ms"], 900);
  EXPECT_EQ(r->payload["settings"]["order"], 3);
  c.send(msg("settings.update", id, {{"settings", {{"scan_dwell_ms", 5}}}}));
  EXPECT_EQ(c.next()->payload["code"], "invalid-settings");

  c.send(msg("session.save", id));
  const auto saved = c.next();
  ASSERT_EQ(saved->type, "session.saved");
  c.send(msg("session.load", "", {{"blob", saved->payload["blob"]}}));
  const auto loaded = c.next();
  ASSERT_EQ(loaded->type, "state.snapshot");
  EXPECT_NE(loaded->session, id);
  c.send(msg("state.get", id));
  EXPECT_EQ(c.next()->payload, loaded->payload);
  c.send(msg("session.load", "", {{"blob", "garbage"}}));
  EXPECT_EQ(c.next()->payload["code"], "load-failed");

  c.send(msg("session.close", id));
  EXPECT_EQ(c.next()->type, "session.closed");
  c.send(msg("state.get", id));
  EXPECT_EQ(c.next()->payload["code"], "unknown-session");
  EXPECT_EQ(d.session_count(), 1u);
}

TEST(InProcess, VoiceSolveCompletes) {
  Dispatcher d(manual());
  InProcessClient c(d);
  c.send(msg("session.create", "", create_payload(3, {{"input_device", "voice"}})));
  const std::string id = c.next()->session;
  c.send(msg("input.voice", id, {{"token", "12"}}));
  const auto out = c.drain();
  EXPECT_EQ(of_type(out, "event.completed").size(), 1u);
  EXPECT_EQ(of_type(out, "event.voice").size(), 1u);
}

TEST(InProcess, ClientDropsItsSessions) {
  Dispatcher d(manual());
  {
    InProcessClient c(d);
    c.send(msg("session.create", "", create_payload(1)));
    c.send(msg("session.create", "", create_payload(2)));
    EXPECT_EQ(d.session_count(), 2u);
  }
  EXPECT_EQ(d.session_count(), 0u);
}

// Scheduler ticks arrive in the order the pure simulation predicts and stop with the scan.
TEST(TickScheduler, FollowsSimulationOrder) {
  Dispatcher d({true, 0.5});  // 200 ms dwell -> 100 ms
  InProcessClient c(d);
  const nlohmann::ordered_json settings{{"scan_dwell_ms", 200}, {"scan_repeat_cycles", 1}, {"order", 2}};
  c.send(msg("session.create", "", create_payload(5, settings)));
  const std::string id = c.next(1s)->session;

  const Settings st = settings_from_json(settings);
  const Session reference = create_session(st, 5);
  std::vector<std::string> expected;
  for (const ScanEvent& e : simulate(st.scan_config(), reference.scan_tree(), std::vector<ScriptEvent>(64, ScriptEvent::tick)))
    if (e.kind == ScanEventKind::highlight) expected.push_back(e.node_id);

  const auto start = std::chrono::steady_clock::now();
  c.send(msg("input.command", id, {{"command", "run_scan"}}));
  std::vector<std::string> got;
  std::vector<std::chrono::steady_clock::time_point> stamps;
  bool stopped = false;
  while (!stopped) {
    auto m = c.next(2s);
    ASSERT_TRUE(m) << "scheduler stalled";
    if (m->type == "event.highlight") {
      got.push_back(m->payload["node_id"]);
      stamps.push_back(std::chrono::steady_clock::now());
    }
    stopped = m->type == "event.scan_stopped";
  }
  EXPECT_EQ(got, expected);
  // No tick is early; one dwell after the first highlight at the least.
  const auto total = std::chrono::duration_cast<std::chrono::milliseconds>(stamps.back() - start);
  EXPECT_GE(total.count(), static_cast<long>(expected.size() - 1) * 100 - 20);
  std::this_thread::sleep_for(350ms);
  EXPECT_TRUE(c.drain().empty());
  d.with_session(id, [](Session& s) { EXPECT_FALSE(s.scanning()); });
}

TEST(TickScheduler, DwellUpdateAppliesToNextTick) {
  Dispatcher d({true, 0.25});
  InProcessClient c(d);
  c.send(msg("session.create", "", create_payload(5, {{"scan_dwell_ms", 200}, {"scan_repeat_cycles", 10}})));
  const std::string id = c.next(1s)->session;
  c.send(msg("input.command", id, {{"command", "run_scan"}}));
  ASSERT_TRUE(c.next(1s));  // first highlight
  ASSERT_TRUE(c.next(1s));  // one tick at 50 ms
  c.send(msg("settings.update", id, {{"settings", {{"scan_dwell_ms", 2000}}}}));  // 500 ms scaled
  const auto before = std::chrono::steady_clock::now();
  std::optional<Message> m;
  do {
    m = c.next(2s);
    ASSERT_TRUE(m);
  } while (m->type != "event.highlight");
  const auto waited = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - before);
  EXPECT_GE(waited.count(), 150);
}

TEST(Socket, ServeAndRoundTrip) {
  Dispatcher d(manual());
  Server server(d, "127.0.0.1", 0);
  Client c("127.0.0.1", server.port());
  c.send(msg("session.create", "", create_payload(42)));
  const auto created = c.next(2s);
  ASSERT_TRUE(created);
  c.send(msg("state.get", created->session));
  const auto snap = c.next(2s);
  ASSERT_TRUE(snap);
  EXPECT_EQ(snap->payload["cells"].size(), 81u);

  c.send_line("{this is not json");
  const auto err = c.next(2s);
  ASSERT_TRUE(err);
  EXPECT_EQ(err->type, "event.error");
  EXPECT_EQ(err->payload["code"], "malformed");
  c.send(msg("state.get", created->session));
  const auto again = c.next(2s);
  ASSERT_TRUE(again);
  EXPECT_EQ(again->type, "state.snapshot");
}

TEST(Socket, FivePressEntryOverTcp) {
  Dispatcher d(manual());
  Server server(d, "127.0.0.1", 0);
  Client c("127.0.0.1", server.port());
  c.send(msg("session.create", "", create_payload(7)));
  const std::string id = c.next(2s)->session;
  c.send(msg("input.command", id, {{"command", "run_scan"}}));
  for (int i = 0; i < 4; ++i) c.send(msg("input.switch", id, {{"action", "press"}}));
  for (int i = 0; i < 4; ++i) c.send(msg("input.switch", id, {{"action", "tick"}}));
  c.send(msg("input.switch", id, {{"action", "press"}}));
  const auto grid = c.wait_for("event.grid", 2s);
  ASSERT_TRUE(grid);
  EXPECT_EQ(grid->payload["cells"][0]["value"], 5);
  EXPECT_EQ(grid->payload["cells"][0]["kind"], "user");
}

TEST(Socket, ConcurrentSessionsStayIndependent) {
  Dispatcher d(manual());
  Server server(d, "127.0.0.1", 0);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&, k] {
      Client c("127.0.0.1", server.port());
      c.send(msg("session.create", "", create_payload(static_cast<std::uint64_t>(k), {{"input_device", "voice"}})));
      const std::string id = c.next(5s)->session;
      for (int i = 0; i < 20; ++i) c.send(msg("input.voice", id, {{"token", i % 2 ? "no" : "4"}}));
      c.send(msg("input.voice", id, {{"token", "12"}}));
      if (c.wait_for("event.completed", 5s)) ++ok;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 4);
}

TEST(Socket, ConnectionCloseDropsSessions) {
  Dispatcher d(manual());
  Server server(d, "127.0.0.1", 0);
  {
    Client c("127.0.0.1", server.port());
    c.send(msg("session.create", "", create_payload(1)));
    ASSERT_TRUE(c.next(2s));
    EXPECT_EQ(d.session_count(), 1u);
  }
  for (int i = 0; i < 100 && d.session_count() != 0; ++i) std::this_thread::sleep_for(10ms);
  EXPECT_EQ(d.session_count(), 0u);
}

TEST(Socket, BindFailure) {
  Dispatcher d(manual());
  Server first(d, "127.0.0.1", 0);
  EXPECT_THROW(Server(d, "127.0.0.1", first.port()), SocketError);
  EXPECT_THROW(Server(d, "not-an-ip", 0), SocketError);
}
