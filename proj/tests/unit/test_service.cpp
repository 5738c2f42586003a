#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "doctest.h"
#include "pennant/errors.hpp"
#include "pennant/render.hpp"
#include "pennant/service.hpp"
#include "support/fixtures.hpp"
#include "support/process.hpp"

using namespace pennant;
using json = nlohmann::json;

namespace {

std::vector<DocumentRecord> corpus6_with_descriptors() {
  auto records = testing::corpus6();
  records[0].descriptors = {"labour", "gender"};
  records[1].descriptors = {"labour", "migration"};
  records[2].descriptors = {"gender"};
  return records;
}

PennantService citation_service(ServiceConfig config = {}) {
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(build_index(testing::corpus6(), Mode::citation));
  return PennantService(std::move(indexes), config);
}

PennantService::Params params(std::initializer_list<std::pair<const std::string, std::string>> kv) {
  return PennantService::Params(kv);
}

// Runs `service` on an ephemeral port for the lifetime of the object.
class LiveServer {
 public:
  explicit LiveServer(const PennantService& service) {
    service.install(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(5, 0);
    return c;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("stats") {
  const auto service = citation_service();
  const auto r = service.stats();
  CHECK(r.status == 200);
  const auto j = json::parse(r.body);
  CHECK(j["modes"] == json::array({"citation"}));
  CHECK(j["citation"]["n_docs"] == 6);
  CHECK(j["citation"]["n_keys"] == 4);
  CHECK(j["index_version"] == 1);
  CHECK(r.body.rfind(R"({"modes":["citation"],"citation":{"n_docs":6,"n_keys":4})", 0) == 0);
  CHECK(service.stats().body == r.body);

  std::vector<CoMentionIndex> both;
  both.push_back(build_index(corpus6_with_descriptors(), Mode::citation));
  both.push_back(build_index(corpus6_with_descriptors(), Mode::descriptor));
  const PennantService two(std::move(both), {});
  const auto j2 = json::parse(two.stats().body);
  CHECK(j2["modes"] == json::array({"citation", "descriptor"}));
  CHECK(j2["descriptor"]["n_keys"] == 3);
}

TEST_CASE("construction rejects empty or duplicate index sets") {
  CHECK_THROWS_AS(PennantService({}, {}), ConfigError);
  std::vector<CoMentionIndex> dup;
  dup.push_back(build_index(testing::corpus6(), Mode::citation));
  dup.push_back(build_index(testing::corpus6(), Mode::citation));
  CHECK_THROWS_AS(PennantService(std::move(dup), {}), ConfigError);
}

TEST_CASE("pennant endpoint") {
  const auto service = citation_service();
  const auto ok = service.pennant(params({{"seed", "S"}, {"mode", "citation"}}));
  CHECK(ok.status == 200);
  const auto index = build_index(testing::corpus6(), Mode::citation);
  CHECK(ok.body == emit_json(build_pennant(index, "S", {})));
  CHECK(json::parse(ok.body)["points"].size() == 3);

  // Mode defaults to the loaded one.
  CHECK(service.pennant(params({{"seed", "S"}})).body == ok.body);

  const auto custom = service.pennant(params(
      {{"seed", "S"}, {"k", "1"}, {"min_tf", "1"}, {"log_base", "10"},
       {"idf_style", "inverse_df"}, {"sectors", "0.1,0.2"}}));
  CHECK(custom.status == 200);
  PennantConfig config;
  config.k = 1;
  config.log_base = 10;
  config.idf_style = IdfStyle::inverse_df;
  config.sectors = parse_sector_policy("0.1,0.2");
  CHECK(custom.body == emit_json(build_pennant(index, "S", config)));

  const auto missing = service.pennant(params({{"seed", "NOPE"}, {"mode", "citation"}}));
  CHECK(missing.status == 404);
  CHECK(json::parse(missing.body) == json{{"error", "seed not found"}});
}

TEST_CASE("pennant endpoint rejects bad requests with 400") {
  ServiceConfig config;
  config.max_k = 50;
  const auto service = citation_service(config);
  for (const auto& p : {params({{"mode", "citation"}}), params({{"seed", ""}}),
                        params({{"seed", "S"}, {"k", "51"}}), params({{"seed", "S"}, {"k", "abc"}}),
                        params({{"seed", "S"}, {"k", "-1"}}), params({{"seed", "S"}, {"k", "0"}}),
                        params({{"seed", "S"}, {"min_tf", "1.5"}}),
                        params({{"seed", "S"}, {"log_base", "two"}}),
                        params({{"seed", "S"}, {"log_base", "1"}}),
                        params({{"seed", "S"}, {"idf_style", "bm25"}}),
                        params({{"seed", "S"}, {"sectors", "2,1"}}),
                        params({{"seed", "S"}, {"mode", "author"}}),
                        params({{"seed", "S"}, {"mode", "descriptor"}})}) {
    const auto r = service.pennant(p);
    CHECK(r.status == 400);
    CHECK(json::parse(r.body).contains("error"));
  }
  CHECK(service.pennant(params({{"seed", "S"}, {"k", "50"}})).status == 200);
}

TEST_CASE("mention endpoint") {
  auto records = testing::corpus6();
  records[4].title = "Fifth";
  records[4].year = 2001;
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(build_index(records, Mode::citation));
  const PennantService service(std::move(indexes), {});

  const auto r = service.mention("C", params({{"mode", "citation"}}));
  CHECK(r.status == 200);
  const auto j = json::parse(r.body);
  CHECK(j["id"] == "C");
  CHECK(j["df"] == 2);
  REQUIRE(j["sample_citing_docs"].size() == 2);
  CHECK(j["sample_citing_docs"][0] == json{{"doc_id", "d5"}, {"title", "Fifth"}, {"year", 2001}});
  CHECK(j["sample_citing_docs"][1]["doc_id"] == "d6");
  CHECK(j["sample_citing_docs"][1]["title"].is_null());

  CHECK(service.mention("NOPE", {}).status == 404);
  CHECK(service.mention("C", params({{"mode", "descriptor"}})).status == 400);
}

TEST_CASE("mention samples are capped at 20 in ordinal order") {
  std::vector<DocumentRecord> records;
  for (int i = 0; i < 30; ++i) {
    DocumentRecord r;
    r.doc_id = "doc" + std::to_string(i);
    r.references = {"popular"};
    records.push_back(r);
  }
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(build_index(records, Mode::citation));
  const PennantService service(std::move(indexes), {});
  const auto j = json::parse(service.mention("popular", {}).body);
  CHECK(j["df"] == 30);
  REQUIRE(j["sample_citing_docs"].size() == 20);
  CHECK(j["sample_citing_docs"][0]["doc_id"] == "doc0");
  CHECK(j["sample_citing_docs"][19]["doc_id"] == "doc19");
}

TEST_CASE("HTTP routes") {
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(build_index(corpus6_with_descriptors(), Mode::citation));
  indexes.push_back(build_index(corpus6_with_descriptors(), Mode::descriptor));
  testing::TempDir assets;
  testing::write_file(assets / "index.html", "<html>explorer</html>");
  ServiceConfig config;
  config.static_dir = assets.path().string();
  config.cors_origin = "http://localhost:5173";
  const PennantService service(std::move(indexes), config);
  LiveServer live(service);
  auto client = live.client();

  auto stats = client.Get("/api/stats");
  REQUIRE(stats);
  CHECK(stats->status == 200);
  CHECK(stats->get_header_value("Content-Type").find("application/json") == 0);
  CHECK(stats->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");

  auto pennant = client.Get("/api/pennant?seed=S&mode=citation");
  REQUIRE(pennant);
  CHECK(pennant->status == 200);
  CHECK(json::parse(pennant->body)["points"].size() == 3);

  auto desc = client.Get("/api/pennant?seed=labour&mode=descriptor");
  REQUIRE(desc);
  CHECK(desc->status == 200);
  CHECK(json::parse(desc->body)["mode"] == "descriptor");

  auto unknown = client.Get("/api/pennant?seed=NOPE&mode=citation");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  CHECK(json::parse(unknown->body)["error"] == "seed not found");

  auto bad = client.Get("/api/pennant?mode=citation");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto mention = client.Get("/api/mention/C?mode=citation");
  REQUIRE(mention);
  CHECK(mention->status == 200);
  CHECK(json::parse(mention->body)["df"] == 2);

  auto encoded = client.Get("/api/mention/%43?mode=citation");
  REQUIRE(encoded);
  CHECK(encoded->status == 200);

  auto no_route = client.Get("/api/nothing");
  REQUIRE(no_route);
  CHECK(no_route->status == 404);
  CHECK(json::parse(no_route->body).contains("error"));

  auto page = client.Get("/index.html");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body == "<html>explorer</html>");
}

TEST_CASE("concurrent queries return identical bodies") {
  std::mt19937_64 rng(3);
  std::vector<DocumentRecord> records = testing::random_corpus(rng, {.max_docs = 200});
  std::vector<CoMentionIndex> indexes;
  indexes.push_back(build_index(records, Mode::citation));
  const auto& key = indexes.front().key(0);
  const std::string path = "/api/pennant?seed=" + key;
  const PennantService service(std::move(indexes), {});
  LiveServer live(service);
  const auto expected = live.client().Get(path)->body;

  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      auto client = live.client();
      for (int i = 0; i < 25; ++i) {
        auto r = client.Get(path);
        if (!r || r->status != 200 || r->body != expected) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(mismatches == 0);
}

TEST_CASE("missing static directory is a configuration error") {
  ServiceConfig config;
  config.static_dir = "/nonexistent/ui";
  const auto service = citation_service(config);
  httplib::Server server;
  CHECK_THROWS_AS(service.install(server), ConfigError);
}
