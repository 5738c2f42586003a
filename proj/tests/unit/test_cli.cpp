#include <httplib.h>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "pennant/render.hpp"
#include "support/fixtures.hpp"
#include "support/process.hpp"

using namespace pennant;
using namespace pennant::testing;
using json = nlohmann::json;

namespace {

const std::string kCli = PENNANT_CLI_PATH;

RunResult cli(std::vector<std::string> args, const EnvOverrides& env = {}) {
  args.insert(args.begin(), kCli);
  return run_process(args, env);
}

struct Workspace {
  TempDir dir;
  std::string corpus = (dir / "corpus6.jsonl").string();
  std::string index = (dir / "corpus6.idx").string();

  Workspace() {
    write_file(corpus, corpus6_jsonl());
    const auto r = cli({"build-index", "--corpus", corpus, "--mode", "citation", "--out", index});
    REQUIRE(r.exit_code == 0);
  }
};

}  // namespace

TEST_CASE("ingest") {
  TempDir dir;
  write_file(dir / "c6.jsonl", corpus6_jsonl());
  const auto ok = cli({"ingest", "--corpus", (dir / "c6.jsonl").string()});
  CHECK(ok.exit_code == 0);
  const auto report = json::parse(ok.out);
  CHECK(report["records_accepted"] == 6);
  CHECK(report["records_rejected"] == 0);

  write_file(dir / "mixed.jsonl", "{\"id\":\"a\"}\nnot json\n{\"id\":\"b\"}\n");
  const auto mixed = cli({"ingest", "--corpus", (dir / "mixed.jsonl").string(), "--report",
                          (dir / "report.json").string()});
  CHECK(mixed.exit_code == 0);
  CHECK(mixed.out.empty());
  const auto written = json::parse(read_file(dir / "report.json"));
  CHECK(written["records_rejected"] == 1);
  CHECK(written["rejects"][0]["line"] == 2);

  write_file(dir / "empty.jsonl", "");
  CHECK(cli({"ingest", "--corpus", (dir / "empty.jsonl").string()}).exit_code == 2);
  CHECK(cli({"ingest", "--corpus", (dir / "nope.jsonl").string()}).exit_code == 1);
}

TEST_CASE("build-index") {
  TempDir dir;
  write_file(dir / "c6.jsonl", corpus6_jsonl());
  const auto corpus = (dir / "c6.jsonl").string();
  const auto first = cli({"build-index", "--corpus", corpus, "--mode", "citation", "--out",
                          (dir / "a.idx").string()});
  CHECK(first.exit_code == 0);
  CHECK(first.out == "n_docs=6 n_keys=4\n");
  CHECK(cli({"build-index", "--corpus", corpus, "--mode", "citation", "--out",
             (dir / "b.idx").string()})
            .exit_code == 0);
  CHECK(read_file(dir / "a.idx") == read_file(dir / "b.idx"));

  const auto desc = cli({"build-index", "--corpus", corpus, "--mode", "descriptor", "--out",
                         (dir / "d.idx").string()});
  CHECK(desc.exit_code == 2);
  CHECK(desc.out == "n_docs=6 n_keys=0\n");
  CHECK(desc.err.find("no descriptor keys") != std::string::npos);

  write_file(dir / "empty.jsonl", "\n\n");
  CHECK(cli({"build-index", "--corpus", (dir / "empty.jsonl").string(), "--mode", "citation",
             "--out", (dir / "e.idx").string()})
            .exit_code == 2);
  CHECK(cli({"build-index", "--corpus", (dir / "missing.jsonl").string(), "--mode", "citation",
             "--out", (dir / "e.idx").string()})
            .exit_code == 1);
  CHECK(cli({"build-index", "--corpus", corpus, "--mode", "citation", "--out",
             "/nonexistent-dir/x.idx"})
            .exit_code == 1);
}

TEST_CASE("pennant") {
  Workspace ws;
  const auto r = cli({"pennant", "--index", ws.index, "--seed", "S", "--format", "json"});
  CHECK(r.exit_code == 0);
  const auto index = build_index(corpus6(), Mode::citation);
  CHECK(r.out == emit_json(build_pennant(index, "S", {})));

  const auto unknown = cli({"pennant", "--index", ws.index, "--seed", "NOPE"});
  CHECK(unknown.exit_code == 3);
  CHECK(unknown.out.empty());
  CHECK(json::parse(unknown.err.substr(0, unknown.err.find('\n'))) ==
        json{{"error", "seed not found"}});

  const auto svg = cli({"pennant", "--index", ws.index, "--seed", "S", "--format", "svg"});
  CHECK(svg.exit_code == 0);
  CHECK(svg.out.rfind("<?xml", 0) == 0);
  CHECK(svg.out.find("</svg>") != std::string::npos);

  const auto out_path = (ws.dir / "s.svg").string();
  CHECK(cli({"pennant", "--index", ws.index, "--seed", "S", "--format", "svg", "--labels", "none",
             "--out", out_path})
            .exit_code == 0);
  CHECK(read_file(out_path).find("class=\"label\"") == std::string::npos);

  write_file(ws.dir / "corrupt.idx", read_file(ws.index).substr(0, 30));
  CHECK(cli({"pennant", "--index", (ws.dir / "corrupt.idx").string(), "--seed", "S"}).exit_code ==
        1);
  CHECK(cli({"pennant", "--index", ws.index, "--seed", "S", "--sectors", "2,1"}).exit_code == 1);
  CHECK(cli({"pennant", "--index", ws.index, "--seed", "S", "--format", "pdf"}).exit_code == 1);
}

TEST_CASE("configuration precedence: flag over environment over default") {
  Workspace ws;
  const auto index = build_index(corpus6(), Mode::citation);

  const auto env_only =
      cli({"pennant", "--index", ws.index, "--seed", "S"}, {{"PENNANT_K", "1"}});
  CHECK(env_only.exit_code == 0);
  CHECK(json::parse(env_only.out)["points"].size() == 1);

  const auto flag_wins =
      cli({"pennant", "--index", ws.index, "--seed", "S", "--k", "2"}, {{"PENNANT_K", "1"}});
  CHECK(json::parse(flag_wins.out)["points"].size() == 2);

  const auto env_tf =
      cli({"pennant", "--index", ws.index, "--seed", "S"}, {{"PENNANT_MIN_TF", "2"}});
  CHECK(json::parse(env_tf.out)["points"].size() == 2);

  const auto env_base =
      cli({"pennant", "--index", ws.index, "--seed", "S"}, {{"PENNANT_LOG_BASE", "10"}});
  PennantConfig base10;
  base10.log_base = 10;
  CHECK(env_base.out == emit_json(build_pennant(index, "S", base10)));
}

TEST_CASE("stats") {
  Workspace ws;
  const auto r = cli({"stats", "--index", ws.index});
  CHECK(r.exit_code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["citation"]["n_docs"] == 6);
  CHECK(j["citation"]["n_keys"] == 4);
  CHECK(cli({"stats", "--index", (ws.dir / "missing.idx").string()}).exit_code == 1);
}

TEST_CASE("serve answers queries and shuts down cleanly on SIGINT") {
  Workspace ws;
  std::string corpus = corpus6_jsonl();
  corpus.replace(corpus.find("\"d1\","), 5,
                 "\"d1\",\"descriptors\":[\"labour\",\"gender\"],");
  write_file(ws.dir / "desc.jsonl", corpus);
  const auto desc_index = (ws.dir / "desc.idx").string();
  REQUIRE(cli({"build-index", "--corpus", (ws.dir / "desc.jsonl").string(), "--mode",
               "descriptor", "--out", desc_index})
              .exit_code == 0);

  ServerProcess server({kCli, "serve", "--index", ws.index, "--index2", desc_index, "--bind",
                        "127.0.0.1:0"});
  REQUIRE(server.running());
  httplib::Client client("127.0.0.1", server.port());
  auto stats = client.Get("/api/stats");
  REQUIRE(stats);
  CHECK(stats->status == 200);
  CHECK(json::parse(stats->body)["modes"] == json::array({"citation", "descriptor"}));

  auto cit = client.Get("/api/pennant?seed=S&mode=citation");
  REQUIRE(cit);
  CHECK(cit->status == 200);
  const auto cli_out = cli({"pennant", "--index", ws.index, "--seed", "S", "--format", "json"});
  CHECK(cit->body == cli_out.out);

  auto desc = client.Get("/api/pennant?seed=labour&mode=descriptor");
  REQUIRE(desc);
  CHECK(desc->status == 200);
  CHECK(json::parse(desc->body)["points"][0]["id"] == "gender");

  CHECK(server.stop(SIGINT) == 0);
  CHECK(server.stderr_text().find("GET /api/stats 200") != std::string::npos);
}

TEST_CASE("serve exits 1 when the port is taken") {
  Workspace ws;
  httplib::Server blocker;
  const int port = blocker.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  ServerProcess server(
      {kCli, "serve", "--index", ws.index, "--bind", "127.0.0.1:" + std::to_string(port)});
  CHECK_FALSE(server.running());
  CHECK(server.early_exit_code() == std::optional<int>(1));
}
