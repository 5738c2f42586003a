#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pennant/index.hpp"
#include "pennant/pennant.hpp"

namespace httplib {
class Server;
}

namespace pennant {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  PennantConfig defaults;
  std::string static_dir;   // empty: no UI bundle
  std::string cors_origin;  // empty: same-origin only
  std::size_t max_k = 1000;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // always JSON
};

/// Read-only query layer over one loaded index per mode. Handlers are const
/// and share the indexes, so requests may run concurrently.
class PennantService {
 public:
  /// Throws ConfigError when no index is given or two share a mode.
  PennantService(std::vector<CoMentionIndex> indexes, ServiceConfig config);

  const ServiceConfig& config() const { return config_; }
  std::vector<Mode> modes() const;

  using Params = std::multimap<std::string, std::string>;

  ApiResponse stats() const;
  ApiResponse pennant(const Params& params) const;
  ApiResponse mention(const std::string& id, const Params& params) const;

  /// Registers the /api routes, the static mount and request logging.
  void install(httplib::Server& server) const;

 private:
  const CoMentionIndex* index_for(Mode mode) const;
  Mode default_mode() const;

  std::map<Mode, CoMentionIndex> indexes_;
  ServiceConfig config_;
};

/// Body of GET /api/stats for the given indexes.
std::string stats_json(const std::vector<const CoMentionIndex*>& indexes);

}  // namespace pennant
