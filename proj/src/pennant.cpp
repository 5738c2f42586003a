#include "pennant/pennant.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "pennant/errors.hpp"

namespace pennant {

std::string_view to_string(IdfStyle style) {
  return style == IdfStyle::n_over_df ? "n_over_df" : "inverse_df";
}

std::optional<IdfStyle> parse_idf_style(std::string_view text) {
  if (text == "n_over_df") return IdfStyle::n_over_df;
  if (text == "inverse_df") return IdfStyle::inverse_df;
  return std::nullopt;
}

std::string_view to_string(Sector sector) {
  switch (sector) {
    case Sector::A: return "A";
    case Sector::B: return "B";
    case Sector::C: return "C";
  }
  return "C";
}

namespace {

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

SectorPolicy parse_sector_policy(std::string_view text) {
  if (text == "terciles" || text == "terciles_of_range") return {};
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ConfigError("sectors must be 'terciles' or 'b1,b2'");
  }
  SectorBounds bounds{parse_double(text.substr(0, comma)),
                      parse_double(text.substr(comma + 1))};
  if (!(bounds.b1 >= 0.0 && bounds.b1 < bounds.b2)) {
    throw ConfigError("absolute sector bounds must satisfy 0 <= b1 < b2");
  }
  return {bounds};
}

std::string to_string(const SectorPolicy& policy) {
  if (policy.is_terciles()) return "terciles";
  char buf[64];
  auto* p = std::to_chars(buf, buf + sizeof buf, policy.absolute->b1).ptr;
  *p++ = ',';
  p = std::to_chars(p, buf + sizeof buf, policy.absolute->b2).ptr;
  return std::string(buf, p);
}

void PennantConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (min_tf < 1) throw ConfigError("min_tf must be at least 1");
  if (!(std::isfinite(log_base) && log_base > 1.0)) {
    throw ConfigError("log_base must be a finite number greater than 1");
  }
  if (sectors.absolute) {
    const auto [b1, b2] = *sectors.absolute;
    if (!(std::isfinite(b1) && std::isfinite(b2) && b1 >= 0.0 && b1 < b2)) {
      throw ConfigError("absolute sector bounds must satisfy 0 <= b1 < b2");
    }
  }
}

double PennantDiagram::ce_max() const {
  return std::log(static_cast<double>(n_docs)) / std::log(config.log_base);
}

std::pair<double, double> PennantDiagram::ease_range() const {
  const double top = ce_max();
  if (config.idf_style == IdfStyle::inverse_df) return {-top, 0.0};
  return {0.0, top};
}

std::vector<Candidate> candidates(const CoMentionIndex& index, std::string_view seed) {
  const auto seed_key = index.find_key(seed);
  if (!seed_key) throw SeedNotFoundError();

  // Dense counters plus a touched list: cost is proportional to the total
  // length of the forward lists of the seed's documents.
  std::vector<std::uint32_t> counts(index.n_keys(), 0);
  std::vector<KeyOrdinal> touched;
  for (const DocOrdinal doc : index.postings(*seed_key)) {
    for (const KeyOrdinal key : index.forward(doc)) {
      if (key == *seed_key) continue;
      if (counts[key]++ == 0) touched.push_back(key);
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<Candidate> out;
  out.reserve(touched.size());
  for (const KeyOrdinal key : touched) out.push_back({key, counts[key]});
  return out;
}

Coordinates score(std::size_t tf, std::size_t df, std::size_t n_docs,
                  const PennantConfig& config) {
  if (!(1 <= tf && tf <= df && df <= n_docs)) {
    throw DomainError("score requires 1 <= tf <= df <= N (tf=" + std::to_string(tf) +
                      ", df=" + std::to_string(df) + ", N=" + std::to_string(n_docs) +
                      ")");
  }
  if (!(std::isfinite(config.log_base) && config.log_base > 1.0)) {
    throw DomainError("log_base must be a finite number greater than 1");
  }
  const double ln_base = std::log(config.log_base);
  const double ce = std::log(static_cast<double>(tf)) / ln_base;
  const double ease =
      config.idf_style == IdfStyle::n_over_df
          ? std::log(static_cast<double>(n_docs) / static_cast<double>(df)) / ln_base
          : -std::log(static_cast<double>(df)) / ln_base;
  return {ce, ease};
}

SectorBounds sector_bounds(std::size_t n_docs, const PennantConfig& config) {
  if (config.sectors.absolute) return *config.sectors.absolute;
  const double top = std::log(static_cast<double>(n_docs)) / std::log(config.log_base);
  if (config.idf_style == IdfStyle::inverse_df) return {-2.0 * top / 3.0, -top / 3.0};
  return {top / 3.0, 2.0 * top / 3.0};
}

Sector classify_sector(double ease, SectorBounds bounds) {
  if (ease >= bounds.b2) return Sector::A;
  if (ease >= bounds.b1) return Sector::B;
  return Sector::C;
}

Sector tercile_sector(std::size_t df, std::size_t n_docs) {
  using wide = unsigned __int128;
  const wide d = df;
  const wide n = n_docs;
  const wide cube = d * d * d;
  if (cube <= n) return Sector::A;
  if (cube <= n * n) return Sector::B;
  return Sector::C;
}

PennantDiagram build_pennant(const CoMentionIndex& index, std::string_view seed,
                             const PennantConfig& config) {
  config.validate();
  if (config.mode != index.mode()) {
    throw ConfigError("config mode '" + std::string(to_string(config.mode)) +
                      "' does not match index mode '" +
                      std::string(to_string(index.mode())) + "'");
  }

  PennantDiagram diagram;
  diagram.seed = std::string(seed);
  diagram.mode = index.mode();
  diagram.config = config;
  diagram.n_docs = index.n_docs();
  diagram.sector_bounds = sector_bounds(index.n_docs(), config);

  struct Ranked {
    KeyOrdinal key;
    std::size_t tf;
    std::size_t df;
  };
  std::vector<Ranked> ranked;
  for (const auto& c : candidates(index, seed)) {
    if (c.tf >= config.min_tf) ranked.push_back({c.key, c.tf, index.df(c.key)});
  }
  // ce descending is tf descending and ease descending is df ascending, for
  // any base and idf style; comparing the counts keeps ties exact. Key
  // ordinals are in id order.
  const auto before = [](const Ranked& a, const Ranked& b) {
    if (a.tf != b.tf) return a.tf > b.tf;
    if (a.df != b.df) return a.df < b.df;
    return a.key < b.key;
  };
  const auto keep = std::min(config.k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), before);
  ranked.resize(keep);

  diagram.points.reserve(keep);
  for (const auto& r : ranked) {
    PennantPoint point;
    point.candidate = index.key(r.key);
    point.tf = r.tf;
    point.df = r.df;
    const auto [ce, ease] = score(r.tf, r.df, index.n_docs(), config);
    point.ce = ce;
    point.ease = ease;
    point.sector = config.sectors.is_terciles()
                       ? tercile_sector(r.df, index.n_docs())
                       : classify_sector(ease, diagram.sector_bounds);
    if (index.mode() == Mode::citation) {
      if (const auto doc = index.find_doc(point.candidate)) {
        point.title = index.doc(*doc).title;
      }
    }
    diagram.points.push_back(std::move(point));
  }
  return diagram;
}

}  // namespace pennant
