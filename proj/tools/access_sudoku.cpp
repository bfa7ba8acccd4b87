// access_sudoku: headless front end (serve | generate | solve | count | simulate).
//
// Exit codes: 0 ok, 1 unsolvable or ambiguous puzzle, 2 usage / IO / parse error.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "access_sudoku/engine.hpp"
#include "access_sudoku/gateway.hpp"
#include "access_sudoku/scanning.hpp"

namespace as = access_sudoku;

namespace {

constexpr int kOk = 0;
constexpr int kNoUniqueAnswer = 1;
constexpr int kUsage = 2;

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw Failure{kUsage, "cannot write " + path};
}

as::GridFile read_grid_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return as::parse_grid_file(text);
  } catch (const as::ParseError& e) {
    throw Failure{kUsage, path + ": " + e.what()};
  }
}

as::Difficulty difficulty_arg(const std::string& s) {
  const auto d = as::parse_difficulty(s);
  if (!d) throw Failure{kUsage, "unknown difficulty '" + s + "' (easy, medium, hard)"};
  return *d;
}

int cmd_generate(int order, const std::string& difficulty, std::uint64_t seed, const std::string& out) {
  const as::Difficulty d = difficulty_arg(difficulty);
  if (order < as::kMinOrder || order > as::kMaxOrder) throw Failure{kUsage, "order must be within [1, 5]"};
  write_output(out, as::format_grid_file(as::to_grid_file(as::generate(order, d, seed))));
  return kOk;
}

int cmd_solve(const std::string& in, const std::string& out) {
  as::GridFile file = read_grid_file(in);
  const auto solved = as::solve(file.grid);
  if (!solved) {
    std::cout << "UNSOLVABLE\n";
    return kNoUniqueAnswer;
  }
  const bool ambiguous = as::count_solutions(file.grid, 2) > 1;
  file.grid = *solved;
  write_output(out, as::format_grid_file(file));
  if (ambiguous) {
    std::cerr << "ambiguous: the puzzle has more than one solution\n";
    return kNoUniqueAnswer;
  }
  return kOk;
}

int cmd_count(const std::string& in, std::uint64_t cap) {
  if (cap == 0) throw Failure{kUsage, "--cap must be at least 1"};
  std::cout << as::count_solutions(read_grid_file(in).grid, cap) << "\n";
  return kOk;
}

// Config keys: dwell_ms, repeat_cycles, sound, highlight_color, order, and
// either puzzle (grid file path, relative to the config) or difficulty + seed
// for a generated board. With neither the board is empty.
int cmd_simulate(const std::string& config_path, const std::string& script_path, const std::string& out) {
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Failure{kUsage, config_path + ": " + e.what()};
  }
  as::ScanConfig scan;
  as::Grid board(3);
  try {
    scan.dwell_ms = cfg.value("dwell_ms", scan.dwell_ms);
    scan.repeat_cycles = cfg.value("repeat_cycles", scan.repeat_cycles);
    scan.sound_enabled = cfg.value("sound", scan.sound_enabled);
    scan.highlight_color = cfg.value("highlight_color", scan.highlight_color);
    scan.validate();
    const int order = cfg.value("order", 3);
    if (cfg.contains("puzzle")) {
      std::filesystem::path p = cfg.at("puzzle").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(config_path).parent_path() / p;
      board = read_grid_file(p.string()).grid;
    } else if (cfg.contains("seed")) {
      board = as::generate(order, difficulty_arg(cfg.value("difficulty", std::string("easy"))),
                           cfg.at("seed").get<std::uint64_t>())
                  .clues;
    } else {
      board = as::Grid(order);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kUsage, config_path + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw Failure{kUsage, config_path + ": " + e.what()};
  } catch (const std::out_of_range& e) {
    throw Failure{kUsage, config_path + ": " + e.what()};
  }
  std::vector<as::ScriptEvent> script;
  try {
    script = as::parse_script(read_file(script_path));
  } catch (const as::ParseError& e) {
    throw Failure{kUsage, script_path + ":" + std::to_string(e.line) + ": " + e.what()};
  }
  const as::ScanTree tree = as::build_scan_tree(board, as::MenuDescription{});
  write_output(out, as::format_transcript(as::simulate(scan, tree, script)));
  return kOk;
}

std::atomic<bool> g_stop{false};

int cmd_serve(const std::string& host, int port, double time_scale) {
  as::Dispatcher dispatcher({true, time_scale});
  std::unique_ptr<as::Server> server;
  try {
    server = std::make_unique<as::Server>(dispatcher, host, port);
  } catch (const as::SocketError& e) {
    throw Failure{kUsage, e.what()};
  }
  std::cout << "listening on " << host << ":" << server->port() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accessible Sudoku: puzzle engine, scanning simulator and session server"};
  app.require_subcommand(1);

  std::string host = "127.0.0.1";
  int port = 7341;
  double time_scale = 1.0;
  auto* serve = app.add_subcommand("serve", "Serve sessions over the line-delimited JSON protocol");
  serve->add_option("--host", host, "Bind address")->envname("ACCESS_SUDOKU_HOST");
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->envname("ACCESS_SUDOKU_PORT");
  serve->add_option("--time-scale", time_scale, "Multiply every dwell by this factor")->check(CLI::PositiveNumber);

  int order = 3;
  std::string difficulty = "easy";
  std::uint64_t seed = 0;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Generate a puzzle with a unique solution");
  gen->add_option("--order", order, "Box size (grid side is order^2)")->envname("ACCESS_SUDOKU_ORDER");
  gen->add_option("--difficulty", difficulty, "easy | medium | hard")->envname("ACCESS_SUDOKU_DIFFICULTY");
  gen->add_option("--seed", seed, "Generator seed")->envname("ACCESS_SUDOKU_SEED");
  gen->add_option("--out", out, "Output file (default stdout)");

  std::string in;
  auto* solve = app.add_subcommand("solve", "Print the solved grid or UNSOLVABLE");
  solve->add_option("puzzle", in, "Puzzle file")->required();
  solve->add_option("--out", out, "Output file (default stdout)");

  std::uint64_t cap = 1000;
  auto* count = app.add_subcommand("count", "Print min(cap, number of solutions)");
  count->add_option("puzzle", in, "Puzzle file")->required();
  count->add_option("--cap", cap, "Stop counting at this many")->envname("ACCESS_SUDOKU_CAP");

  std::string config, script;
  auto* sim = app.add_subcommand("simulate", "Run a scanning script and print the transcript");
  sim->add_option("config", config, "Scanning config (JSON)")->required();
  sim->add_option("script", script, "Script (JSON lines of tick/press)")->required();
  sim->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*serve) return cmd_serve(host, port, time_scale);
    if (*gen) return cmd_generate(order, difficulty, seed, out);
    if (*solve) return cmd_solve(in, out);
    if (*count) return cmd_count(in, cap);
    if (*sim) return cmd_simulate(config, script, out);
  } catch (const Failure& f) {
    std::cerr << "access_sudoku: " << f.message << "\n";
    return f.code;
  }
  return kUsage;
}
