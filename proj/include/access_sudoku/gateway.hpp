#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "access_sudoku/protocol.hpp"
#include "access_sudoku/session.hpp"

namespace access_sudoku {

using Sink = std::function<void(const Message&)>;

struct DispatcherOptions {
  bool auto_tick = true;    // run the tick scheduler thread
  double time_scale = 1.0;  // real delay = dwell_ms * time_scale
};

/// Owns the sessions of one service. Messages for a session are handled one
/// at a time; distinct sessions proceed independently. Ticks for scanning
/// sessions come from a scheduler thread that follows each session's dwell.
class Dispatcher {
 public:
  explicit Dispatcher(DispatcherOptions options = {}) : options_(options) {
    if (options_.auto_tick) scheduler_ = std::thread([this] { run_scheduler(); });
  }

  ~Dispatcher() {
    {
      std::lock_guard lock(wake_mu_);
      stopping_ = true;
    }
    wake_.notify_all();
    if (scheduler_.joinable()) scheduler_.join();
  }

  Dispatcher(const Dispatcher&) = delete;
  Dispatcher& operator=(const Dispatcher&) = delete;

  /// Replies go to `reply`. Sessions created here push later events (ticks) to it too.
  void handle(const Message& m, const Sink& reply) {
    if (m.type == "session.create") return create(m, reply);
    if (m.type == "session.load") return load(m, reply);
    if (std::find(kClientMessageTypes.begin(), kClientMessageTypes.end(), m.type) == kClientMessageTypes.end()) {
      reply(error_message(m.session, "unknown-type", "unknown message type '" + m.type + "'"));
      return;
    }
    auto slot = find(m.session);
    if (!slot) {
      reply(error_message(m.session, "unknown-session", "no session '" + m.session + "'"));
      return;
    }
    {
      std::lock_guard lock(slot->mu);
      try {
        if (m.type == "state.get") {
          reply({"state.snapshot", m.session, slot->session.snapshot()});
        } else if (m.type == "session.save") {
          reply({"session.saved", m.session, {{"blob", slot->session.save()}}});
        } else if (m.type == "session.close") {
          erase(m.session);
          reply({"session.closed", m.session, nlohmann::ordered_json::object()});
          return;
        } else if (m.type == "settings.update") {
          const auto patch = m.payload.contains("settings") ? m.payload.at("settings") : nlohmann::ordered_json::object();
          Settings next;
          try {
            next = settings_from_json(patch, slot->session.settings());
          } catch (const SettingsError& e) {
            reply(error_message(m.session, "invalid-settings", e.what()));
            return;
          }
          deliver(*slot, m.session, slot->session.update_settings(next));
        } else {
          deliver(*slot, m.session, slot->session.handle(input_from_message(m)));
        }
        // A fresh highlight gets a full dwell before the next tick.
        if (!slot->session.scanning()) {
          slot->last_step.reset();
        } else if (m.type.starts_with("input.")) {
          slot->last_step = std::chrono::steady_clock::now();
        }
      } catch (const ProtocolError& e) {
        reply(error_message(m.session, "bad-request", e.what()));
      }
    }
    {
      std::lock_guard lock(wake_mu_);
      poked_ = true;
    }
    wake_.notify_all();
  }

  /// Drops every session whose events go to `owner`.
  void drop_owner(const void* owner) {
    std::lock_guard lock(map_mu_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->second->owner == owner) {
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::size_t session_count() const {
    std::lock_guard lock(map_mu_);
    return sessions_.size();
  }

  /// Runs `f` on a session under its lock; false when the id is unknown.
  bool with_session(const std::string& id, const std::function<void(Session&)>& f) {
    auto slot = find(id);
    if (!slot) return false;
    std::lock_guard lock(slot->mu);
    f(slot->session);
    return true;
  }

  /// Attaches an owner tag used by drop_owner; set by the socket server.
  void handle_as(const void* owner, const Message& m, const Sink& reply) {
    current_owner_ = owner;
    handle(m, reply);
    current_owner_ = nullptr;
  }

 private:
  struct Slot {
    explicit Slot(Session s) : session(std::move(s)) {}
    std::mutex mu;
    Session session;
    Sink sink;
    const void* owner = nullptr;
    std::optional<std::chrono::steady_clock::time_point> last_step;  // last tick or input while scanning
  };

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::lock_guard lock(map_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  void erase(const std::string& id) {
    std::lock_guard lock(map_mu_);
    sessions_.erase(id);
  }

  std::string add(Session s, const Sink& reply) {
    auto slot = std::make_shared<Slot>(std::move(s));
    slot->sink = reply;
    slot->owner = current_owner_;
    std::lock_guard lock(map_mu_);
    const std::string id = "s" + std::to_string(++next_id_);
    sessions_.emplace(id, std::move(slot));
    return id;
  }

  void create(const Message& m, const Sink& reply) {
    try {
      const Settings settings =
          m.payload.contains("settings") ? settings_from_json(m.payload.at("settings")) : Settings{};
      std::uint64_t seed;
      if (m.payload.contains("seed")) {
        seed = m.payload.at("seed").get<std::uint64_t>();
      } else {
        seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
      }
      Session s(settings, seed);
      const nlohmann::ordered_json snap = s.snapshot();
      const std::string id = add(std::move(s), reply);
      reply({"state.snapshot", id, snap});
    } catch (const SettingsError& e) {
      reply(error_message(m.session, "invalid-settings", e.what()));
    } catch (const nlohmann::json::exception& e) {
      reply(error_message(m.session, "bad-request", e.what()));
    }
  }

  void load(const Message& m, const Sink& reply) {
    try {
      Session s = Session::load(m.payload.at("blob").get<std::string>());
      const nlohmann::ordered_json snap = s.snapshot();
      const std::string id = add(std::move(s), reply);
      reply({"state.snapshot", id, snap});
    } catch (const SessionLoadError& e) {
      reply(error_message(m.session, "load-failed", e.what()));
    } catch (const nlohmann::json::exception& e) {
      reply(error_message(m.session, "bad-request", e.what()));
    }
  }

  static void deliver(Slot& slot, const std::string& id, const std::vector<OutputEvent>& events) {
    for (const OutputEvent& e : events) slot.sink(event_message(id, e));
  }

  std::chrono::steady_clock::duration dwell(const Session& s) const {
    const double ms = s.settings().scan_dwell_ms * options_.time_scale;
    return std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double, std::milli>(ms));
  }

  void run_scheduler() {
    using clock = std::chrono::steady_clock;
    while (true) {
      std::vector<std::pair<std::string, std::shared_ptr<Slot>>> slots;
      {
        std::lock_guard lock(map_mu_);
        slots.assign(sessions_.begin(), sessions_.end());
      }
      auto wake_at = clock::now() + std::chrono::milliseconds(50);
      for (auto& [id, slot] : slots) {
        std::lock_guard lock(slot->mu);
        if (!slot->session.scanning()) {
          slot->last_step.reset();
          continue;
        }
        const auto now = clock::now();
        if (!slot->last_step) slot->last_step = now;
        // Due time follows the current dwell, so a settings change applies to the pending tick.
        const auto due = *slot->last_step + dwell(slot->session);
        if (now >= due) {
          deliver(*slot, id, slot->session.handle(InputEvent::tick()));
          slot->last_step = due + dwell(slot->session) < now ? now : due;
        }
        if (slot->session.scanning()) {
          wake_at = std::min(wake_at, *slot->last_step + dwell(slot->session));
        } else {
          slot->last_step.reset();
        }
      }
      std::unique_lock lock(wake_mu_);
      wake_.wait_until(lock, wake_at, [&] { return stopping_ || poked_; });
      if (stopping_) return;
      poked_ = false;
    }
  }

  DispatcherOptions options_;
  mutable std::mutex map_mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 0;
  static inline thread_local const void* current_owner_ = nullptr;

  std::mutex wake_mu_;
  std::condition_variable wake_;
  bool stopping_ = false;
  bool poked_ = false;
  std::thread scheduler_;
};

/// Talks to a Dispatcher without a socket; messages pass through encode/decode
/// so the wire form is exercised.
class InProcessClient {
 public:
  explicit InProcessClient(Dispatcher& d) : dispatcher_(d) {}
  ~InProcessClient() { dispatcher_.drop_owner(this); }

  void send(const Message& m) {
    const Message wire = decode(encode(m));
    dispatcher_.handle_as(this, wire, [this](const Message& reply) { push(reply); });
  }

  std::optional<Message> next(std::chrono::milliseconds timeout = std::chrono::milliseconds(0)) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, timeout, [&] { return !inbox_.empty(); })) return std::nullopt;
    Message m = std::move(inbox_.front());
    inbox_.pop_front();
    return m;
  }

  /// Everything received so far.
  std::vector<Message> drain() {
    std::lock_guard lock(mu_);
    std::vector<Message> out(inbox_.begin(), inbox_.end());
    inbox_.clear();
    return out;
  }

 private:
  void push(const Message& m) {
    {
      std::lock_guard lock(mu_);
      inbox_.push_back(decode(encode(m)));
    }
    cv_.notify_all();
  }

  Dispatcher& dispatcher_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> inbox_;
};

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool write_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

/// Buffered line reader over a socket.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  /// nullopt on timeout; throws SocketError on EOF or error. timeout < 0 blocks.
  std::optional<std::string> next(int timeout_ms) {
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, timeout_ms);
      if (r == 0) return std::nullopt;
      if (r < 0) throw SocketError(std::strerror(errno));
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) throw SocketError("connection closed");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

}  // namespace detail

/// TCP front end: one thread per connection, one JSON message per line.
/// A connection may own several sessions; they end with the connection.
class Server {
 public:
  Server(Dispatcher& dispatcher, const std::string& host, int port) : dispatcher_(dispatcher) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw SocketError(std::string("socket: ") + std::strerror(errno));
    const int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
      ::close(listen_fd_);
      throw SocketError("bad bind address '" + host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
      const std::string why = std::strerror(errno);
      ::close(listen_fd_);
      throw SocketError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const { return port_; }

  void stop() {
    if (stopped_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::shared_ptr<Connection>> conns;
    {
      std::lock_guard lock(conn_mu_);
      conns = connections_;
    }
    for (auto& c : conns) ::shutdown(c->fd, SHUT_RDWR);
    for (auto& c : conns)
      if (c->thread.joinable()) c->thread.join();
  }

 private:
  struct Connection {
    int fd = -1;
    std::mutex write_mu;
    std::atomic<bool> open{true};
    std::thread thread;

    void send(const Message& m) {
      std::lock_guard lock(write_mu);
      if (open && !detail::write_all(fd, encode(m) + "\n")) open = false;
    }
  };

  void accept_loop() {
    while (!stopped_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (stopped_) return;
        continue;
      }
      auto conn = std::make_shared<Connection>();
      conn->fd = fd;
      std::lock_guard lock(conn_mu_);
      connections_.push_back(conn);
      conn->thread = std::thread([this, conn] { serve(conn); });
    }
  }

  void serve(const std::shared_ptr<Connection>& conn) {
    detail::LineReader reader(conn->fd);
    // Session events may outlive this call on the scheduler thread, so the sink holds the connection.
    const Sink sink = [conn](const Message& m) { conn->send(m); };
    try {
      while (true) {
        const auto line = reader.next(-1);
        if (!line || line->empty()) continue;
        Message m;
        try {
          m = decode(*line);
        } catch (const ProtocolError& e) {
          sink(error_message("", "malformed", e.what()));
          continue;
        }
        dispatcher_.handle_as(conn.get(), m, sink);
      }
    } catch (const SocketError&) {
    }
    dispatcher_.drop_owner(conn.get());
    {
      std::lock_guard lock(conn->write_mu);
      conn->open = false;
    }
    ::close(conn->fd);
  }

  Dispatcher& dispatcher_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopped_{false};
  std::thread acceptor_;
  std::mutex conn_mu_;
  std::vector<std::shared_ptr<Connection>> connections_;
};

/// Blocking line client for the socket protocol.
class Client {
 public:
  Client(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw SocketError(std::strerror(errno));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1 ||
        ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      const std::string why = std::strerror(errno);
      ::close(fd_);
      throw SocketError("cannot connect to " + host + ":" + std::to_string(port) + ": " + why);
    }
    reader_.emplace(fd_);
  }

  ~Client() {
    if (fd_ >= 0) ::close(fd_);
  }

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send(const Message& m) { send_line(encode(m)); }

  void send_line(const std::string& line) {
    if (!detail::write_all(fd_, line + "\n")) throw SocketError("send failed");
  }

  std::optional<Message> next(std::chrono::milliseconds timeout) {
    const auto line = reader_->next(static_cast<int>(timeout.count()));
    if (!line) return std::nullopt;
    return decode(*line);
  }

  /// Skips messages until one of `type` arrives; skipped ones are appended to `seen` when given.
  std::optional<Message> wait_for(const std::string& type, std::chrono::milliseconds timeout,
                                  std::vector<Message>* seen = nullptr) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      auto m = next(left);
      if (!m) return std::nullopt;
      if (m->type == type) return m;
      if (seen) seen->push_back(*m);
    }
  }

 private:
  int fd_ = -1;
  std::optional<detail::LineReader> reader_;
};

}  // namespace access_sudoku
