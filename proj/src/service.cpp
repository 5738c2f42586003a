#include "pennant/service.hpp"

#include <charconv>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "pennant/errors.hpp"
#include "pennant/render.hpp"

namespace pennant {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxSampleDocs = 20;

ApiResponse error_response(int status, std::string_view message) {
  ordered_json j;
  j["error"] = message;
  return {status, j.dump() + "\n"};
}

// Thrown while reading query parameters; becomes a 400.
struct BadRequest {
  std::string message;
};

const std::string* find_param(const PennantService::Params& params, const char* name) {
  const auto it = params.find(name);
  return it == params.end() ? nullptr : &it->second;
}

std::size_t parse_count(const std::string& text, const char* name) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw BadRequest{std::string("invalid ") + name + ": '" + text + "'"};
  }
  return value;
}

double parse_real(const std::string& text, const char* name) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw BadRequest{std::string("invalid ") + name + ": '" + text + "'"};
  }
  return value;
}

}  // namespace

std::string stats_json(const std::vector<const CoMentionIndex*>& indexes) {
  ordered_json j;
  j["modes"] = ordered_json::array();
  for (const auto* index : indexes) j["modes"].push_back(to_string(index->mode()));
  for (const auto* index : indexes) {
    j[std::string(to_string(index->mode()))] = {{"n_docs", index->n_docs()},
                                                {"n_keys", index->n_keys()}};
  }
  j["index_version"] = kIndexFormatVersion;
  return j.dump() + "\n";
}

PennantService::PennantService(std::vector<CoMentionIndex> indexes, ServiceConfig config)
    : config_(std::move(config)) {
  if (indexes.empty()) throw ConfigError("at least one index must be loaded");
  for (auto& index : indexes) {
    const Mode mode = index.mode();
    if (!indexes_.emplace(mode, std::move(index)).second) {
      throw ConfigError("two indexes loaded for mode '" + std::string(to_string(mode)) +
                        "'");
    }
  }
  if (config_.max_k < 1) throw ConfigError("max_k must be at least 1");
  config_.defaults.validate();
}

std::vector<Mode> PennantService::modes() const {
  std::vector<Mode> out;
  for (const auto& [mode, index] : indexes_) out.push_back(mode);
  return out;
}

const CoMentionIndex* PennantService::index_for(Mode mode) const {
  const auto it = indexes_.find(mode);
  return it == indexes_.end() ? nullptr : &it->second;
}

Mode PennantService::default_mode() const {
  if (index_for(config_.defaults.mode)) return config_.defaults.mode;
  return indexes_.begin()->first;
}

ApiResponse PennantService::stats() const {
  std::vector<const CoMentionIndex*> loaded;
  for (const auto& [mode, index] : indexes_) loaded.push_back(&index);
  return {200, stats_json(loaded)};
}

ApiResponse PennantService::pennant(const Params& params) const {
  try {
    const auto* seed = find_param(params, "seed");
    if (!seed || seed->empty()) return error_response(400, "missing seed");

    PennantConfig config = config_.defaults;
    config.mode = default_mode();
    if (const auto* v = find_param(params, "mode")) {
      const auto mode = parse_mode(*v);
      if (!mode) return error_response(400, "invalid mode: '" + *v + "'");
      config.mode = *mode;
    }
    const CoMentionIndex* index = index_for(config.mode);
    if (!index) return error_response(400, "mode not loaded");

    if (const auto* v = find_param(params, "k")) config.k = parse_count(*v, "k");
    if (config.k > config_.max_k) {
      return error_response(400, "k exceeds maximum of " + std::to_string(config_.max_k));
    }
    if (const auto* v = find_param(params, "min_tf")) config.min_tf = parse_count(*v, "min_tf");
    if (const auto* v = find_param(params, "log_base")) {
      config.log_base = parse_real(*v, "log_base");
    }
    if (const auto* v = find_param(params, "idf_style")) {
      const auto style = parse_idf_style(*v);
      if (!style) return error_response(400, "invalid idf_style: '" + *v + "'");
      config.idf_style = *style;
    }
    if (const auto* v = find_param(params, "sectors")) {
      config.sectors = parse_sector_policy(*v);
    }
    config.validate();

    return {200, emit_json(build_pennant(*index, *seed, config))};
  } catch (const BadRequest& e) {
    return error_response(400, e.message);
  } catch (const ConfigError& e) {
    return error_response(400, e.what());
  } catch (const SeedNotFoundError& e) {
    return error_response(404, e.what());
  }
}

ApiResponse PennantService::mention(const std::string& id, const Params& params) const {
  Mode mode = default_mode();
  if (const auto* v = find_param(params, "mode")) {
    const auto parsed = parse_mode(*v);
    if (!parsed) return error_response(400, "invalid mode: '" + *v + "'");
    mode = *parsed;
  }
  const CoMentionIndex* index = index_for(mode);
  if (!index) return error_response(400, "mode not loaded");
  const auto key = index->find_key(id);
  if (!key) return error_response(404, "mention not found");

  const auto docs = index->postings(*key);
  ordered_json j;
  j["id"] = id;
  j["df"] = docs.size();
  auto& sample = j["sample_citing_docs"] = ordered_json::array();
  for (const DocOrdinal ordinal : docs.first(std::min(docs.size(), kMaxSampleDocs))) {
    const auto& doc = index->doc(ordinal);
    ordered_json entry;
    entry["doc_id"] = doc.doc_id;
    entry["title"] = doc.title ? ordered_json(*doc.title) : ordered_json(nullptr);
    entry["year"] = doc.year ? ordered_json(*doc.year) : ordered_json(nullptr);
    sample.push_back(std::move(entry));
  }
  return {200, j.dump() + "\n"};
}

void PennantService::install(httplib::Server& server) const {
  constexpr const char* kJson = "application/json; charset=utf-8";
  const auto to_params = [](const httplib::Request& req) {
    return Params(req.params.begin(), req.params.end());
  };
  const auto reply = [kJson](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, kJson);
  };

  server.Get("/api/stats", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, stats());
  });
  server.Get("/api/pennant",
             [this, reply, to_params](const httplib::Request& req, httplib::Response& res) {
               const auto api = pennant(to_params(req));
               reply(res, api);
               if (api.status == 200) res.set_header("Cache-Control", "public, max-age=300");
             });
  server.Get(R"(/api/mention/(.+))",
             [this, reply, to_params](const httplib::Request& req, httplib::Response& res) {
               reply(res, mention(req.matches[1].str(), to_params(req)));
             });

  server.set_error_handler([kJson](const httplib::Request& req, httplib::Response& res) {
    if (req.path.rfind("/api", 0) == 0 && res.body.empty()) {
      const auto api = error_response(res.status, res.status == 404 ? "not found"
                                                                    : "request failed");
      res.set_content(api.body, kJson);
    }
  });
  server.set_exception_handler(
      [kJson](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_response(500, message).body, kJson);
      });

  if (!config_.cors_origin.empty()) {
    server.set_post_routing_handler(
        [origin = config_.cors_origin](const httplib::Request&, httplib::Response& res) {
          res.set_header("Access-Control-Allow-Origin", origin);
        });
  }
  if (!config_.static_dir.empty() && !server.set_mount_point("/", config_.static_dir)) {
    throw ConfigError("static directory not found: " + config_.static_dir);
  }
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} {} {}B", req.method, req.target, res.status, res.body.size());
  });
}

}  // namespace pennant
