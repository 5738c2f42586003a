// pennant: ingest corpora, build indexes, emit pennant diagrams, serve them.
//
// Exit codes: 0 success, 1 I/O or fatal error, 2 empty or degenerate input,
// 3 unknown seed.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pennant/corpus.hpp"
#include "pennant/errors.hpp"
#include "pennant/index.hpp"
#include "pennant/pennant.hpp"
#include "pennant/render.hpp"
#include "pennant/service.hpp"

namespace {

using namespace pennant;

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitUnknownSeed = 3;

// Flags shared by `pennant` and `serve`; environment overrides defaults.
struct ConfigFlags {
  std::size_t k = 100;
  std::size_t min_tf = 1;
  double log_base = 2.0;
  std::string idf_style = "n_over_df";
  std::string sectors = "terciles";

  void add_to(CLI::App& app) {
    app.add_option("--k", k, "Maximum number of points")->envname("PENNANT_K");
    app.add_option("--min-tf", min_tf, "Minimum co-mention count")
        ->envname("PENNANT_MIN_TF");
    app.add_option("--log-base", log_base, "Logarithm base (> 1)")
        ->envname("PENNANT_LOG_BASE");
    app.add_option("--idf-style", idf_style, "n_over_df or inverse_df")
        ->check(CLI::IsMember({"n_over_df", "inverse_df"}));
    app.add_option("--sectors", sectors, "'terciles' or absolute bounds 'b1,b2'");
  }

  PennantConfig to_config(Mode mode) const {
    PennantConfig config;
    config.mode = mode;
    config.k = k;
    config.min_tf = min_tf;
    config.log_base = log_base;
    config.idf_style = *parse_idf_style(idf_style);
    config.sectors = parse_sector_policy(sectors);
    config.validate();
    return config;
  }
};

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload << std::flush;
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file: " + path);
  out << payload;
  out.close();
  if (!out) throw IoError("failed writing output file: " + path);
}

void print_error_json(const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  std::cerr << j.dump() << std::endl;
}

int run_ingest(const std::string& corpus_path, const std::string& report_path) {
  const auto parsed = parse_corpus_file(corpus_path);
  const auto& report = parsed.report;
  spdlog::info("ingested {}: {} accepted, {} rejected", corpus_path,
               report.records_accepted, report.records_rejected);
  write_output(report_path, report_to_json(report));
  if (report.records_accepted == 0) {
    spdlog::warn("no records accepted from {}", corpus_path);
    return kExitEmpty;
  }
  return kExitOk;
}

int run_build_index(const std::string& corpus_path, Mode mode, const std::string& out) {
  const auto parsed = parse_corpus_file(corpus_path);
  if (parsed.report.records_rejected > 0) {
    spdlog::warn("{} corpus lines rejected; run `pennant ingest` for details",
                 parsed.report.records_rejected);
  }
  if (parsed.records.empty()) {
    spdlog::error("empty corpus: no records accepted from {}", corpus_path);
    return kExitEmpty;
  }
  const auto index = build_index(parsed.records, mode);
  save_index(index, out);
  std::cout << "n_docs=" << index.n_docs() << " n_keys=" << index.n_keys() << std::endl;
  if (index.n_keys() == 0) {
    spdlog::warn("index has no {} keys; every pennant query will fail", to_string(mode));
    return kExitEmpty;
  }
  return kExitOk;
}

int run_stats(const std::vector<std::string>& paths) {
  std::vector<CoMentionIndex> loaded;
  loaded.reserve(paths.size());
  for (const auto& path : paths) loaded.push_back(load_index(path));
  std::vector<const CoMentionIndex*> views;
  for (const auto& index : loaded) views.push_back(&index);
  std::cout << stats_json(views) << std::flush;
  return kExitOk;
}

struct PennantArgs {
  std::string index_path;
  std::string seed;
  std::string format = "json";
  std::string out;
  std::string labels = "top";
  std::size_t top_n = 25;
};

int run_pennant(const PennantArgs& args, const ConfigFlags& flags) {
  const auto index = load_index(args.index_path);
  const auto config = flags.to_config(index.mode());
  PennantDiagram diagram;
  try {
    diagram = build_pennant(index, args.seed, config);
  } catch (const SeedNotFoundError& e) {
    print_error_json(e.what());
    return kExitUnknownSeed;
  }
  if (args.format == "svg") {
    PlotSpec spec;
    spec.labels = args.labels == "all"    ? LabelPolicy::all
                  : args.labels == "none" ? LabelPolicy::none
                                          : LabelPolicy::top_n;
    spec.top_n_labels = args.top_n;
    if (diagram.n_docs < 2) {
      spdlog::error("degenerate axis: an SVG needs at least two documents");
      return kExitEmpty;
    }
    write_output(args.out, emit_svg(diagram, spec));
  } else {
    write_output(args.out, emit_json(diagram));
  }
  return kExitOk;
}

struct ServeArgs {
  std::string index_path;
  std::string index2_path;
  std::string bind = "127.0.0.1:8080";
  std::string static_dir;
  std::string cors_origin;
  std::size_t max_k = 1000;
};

int run_serve(const ServeArgs& args, const ConfigFlags& flags) {
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(load_index(args.index_path));
  if (!args.index2_path.empty()) indexes.push_back(load_index(args.index2_path));

  ServiceConfig config;
  const auto colon = args.bind.rfind(':');
  if (colon == std::string::npos) throw ConfigError("--bind must be addr:port");
  config.host = args.bind.substr(0, colon);
  try {
    config.port = std::stoi(args.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--bind must be addr:port");
  }
  config.defaults = flags.to_config(indexes.front().mode());
  config.static_dir = args.static_dir;
  config.cors_origin = args.cors_origin;
  config.max_k = args.max_k;

  const PennantService service(std::move(indexes), config);
  httplib::Server server;
  // httplib defaults to SO_REUSEPORT, which would let a second server share
  // a busy port silently.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  service.install(server);

  // Worker threads inherit this mask, so only the waiter below sees
  // SIGINT/SIGTERM.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int port = config.port;
  if (port == 0) {
    port = server.bind_to_any_port(config.host);
    if (port < 0) throw IoError("cannot bind " + args.bind);
  } else if (!server.bind_to_port(config.host, port)) {
    throw IoError("cannot bind " + args.bind);
  }
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;
  spdlog::info("serving modes: {}", [&] {
    std::string names;
    for (const Mode m : service.modes()) {
      names += names.empty() ? "" : ",";
      names += to_string(m);
    }
    return names;
  }());

  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("received signal {}, shutting down", sig);
    server.stop();
  });
  const bool ok = server.listen_after_bind();
  if (!ok || server.is_running()) {
    // listen ended on its own; release the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  return ok ? kExitOk : kExitFatal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pennant-diagram recommender: co-mention indexes and pennant queries"};
  app.require_subcommand(1);
  bool quiet = false;
  std::string log_level = "info";
  app.add_flag("--quiet", quiet, "Only log errors");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::string corpus_path;
  std::string report_path;
  auto* ingest = app.add_subcommand("ingest", "Validate a JSONL corpus and report rejects");
  ingest->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();
  ingest->add_option("--report", report_path, "Write the report here instead of stdout");

  std::string mode_name;
  std::string out_path;
  auto* build = app.add_subcommand("build-index", "Build a co-mention index file");
  build->add_option("--corpus", corpus_path, "Corpus file (JSONL)")->required();
  build->add_option("--mode", mode_name, "citation or descriptor")
      ->required()
      ->check(CLI::IsMember({"citation", "descriptor"}));
  build->add_option("--out", out_path, "Index file to write")->required();

  PennantArgs pennant_args;
  ConfigFlags pennant_flags;
  auto* pennant_cmd = app.add_subcommand("pennant", "Emit the pennant diagram for a seed");
  pennant_cmd->add_option("--index", pennant_args.index_path, "Index file")->required();
  pennant_cmd->add_option("--seed", pennant_args.seed, "Seed mention id")->required();
  pennant_flags.add_to(*pennant_cmd);
  pennant_cmd->add_option("--format", pennant_args.format, "json or svg")
      ->check(CLI::IsMember({"json", "svg"}));
  pennant_cmd->add_option("--out", pennant_args.out, "Output file (default stdout)");
  pennant_cmd->add_option("--labels", pennant_args.labels, "SVG labels: top, all or none")
      ->check(CLI::IsMember({"top", "all", "none"}));
  pennant_cmd->add_option("--top-n", pennant_args.top_n, "Labels drawn with --labels top");

  std::vector<std::string> stats_paths;
  auto* stats = app.add_subcommand("stats", "Print index metadata as JSON");
  stats->add_option("--index", stats_paths, "Index file(s)")->required();

  ServeArgs serve_args;
  ConfigFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API and explorer bundle");
  serve->add_option("--index", serve_args.index_path, "Index file")->required();
  serve->add_option("--index2", serve_args.index2_path, "Index file for the other mode");
  serve->add_option("--bind", serve_args.bind, "addr:port (port 0 picks a free port)");
  serve->add_option("--static", serve_args.static_dir, "Explorer bundle directory");
  serve->add_option("--cors-origin", serve_args.cors_origin, "Allowed CORS origin");
  serve->add_option("--max-k", serve_args.max_k, "Largest k accepted by /api/pennant");
  serve_flags.add_to(*serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  auto logger = spdlog::stderr_color_mt("pennant");
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet ? spdlog::level::err : spdlog::level::from_str(log_level));

  try {
    if (*ingest) return run_ingest(corpus_path, report_path);
    if (*build) return run_build_index(corpus_path, *parse_mode(mode_name), out_path);
    if (*pennant_cmd) return run_pennant(pennant_args, pennant_flags);
    if (*stats) return run_stats(stats_paths);
    if (*serve) return run_serve(serve_args, serve_flags);
  } catch (const EmptyCorpusError& e) {
    spdlog::error("{}", e.what());
    return kExitEmpty;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFatal;
  }
  return kExitFatal;
}
