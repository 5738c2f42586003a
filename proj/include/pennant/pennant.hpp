#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pennant/index.hpp"

namespace pennant {

enum class IdfStyle : std::uint8_t { n_over_df, inverse_df };
enum class Sector : std::uint8_t { A, B, C };

std::string_view to_string(IdfStyle style);
std::optional<IdfStyle> parse_idf_style(std::string_view text);
std::string_view to_string(Sector sector);

struct SectorBounds {
  double b1 = 0.0;
  double b2 = 0.0;

  bool operator==(const SectorBounds&) const = default;
};

/// Either equal-width terciles of the achievable ease range, or fixed
/// thresholds on the ease axis.
struct SectorPolicy {
  std::optional<SectorBounds> absolute;

  bool is_terciles() const { return !absolute.has_value(); }
  bool operator==(const SectorPolicy&) const = default;
};

/// Parses "terciles" or "b1,b2". Throws ConfigError.
SectorPolicy parse_sector_policy(std::string_view text);
std::string to_string(const SectorPolicy& policy);

struct PennantConfig {
  Mode mode = Mode::citation;
  std::size_t k = 100;
  std::size_t min_tf = 1;
  double log_base = 2.0;
  IdfStyle idf_style = IdfStyle::n_over_df;
  SectorPolicy sectors;

  /// Throws ConfigError when k or min_tf is zero, the base is not a finite
  /// value above 1, or absolute bounds are not 0 <= b1 < b2.
  void validate() const;

  bool operator==(const PennantConfig&) const = default;
};

struct PennantPoint {
  std::string candidate;
  std::size_t tf = 0;
  std::size_t df = 0;
  double ce = 0.0;    // cognitive effect, log(tf)
  double ease = 0.0;  // ease of processing, log(N/df) or log(1/df)
  Sector sector = Sector::C;
  std::optional<std::string> title;

  bool operator==(const PennantPoint&) const = default;
};

struct PennantDiagram {
  std::string seed;
  Mode mode = Mode::citation;
  PennantConfig config;
  std::size_t n_docs = 0;
  std::vector<PennantPoint> points;
  SectorBounds sector_bounds;

  /// log_base(N), the upper end of the cognitive-effect axis.
  double ce_max() const;
  /// Ease axis range: [0, log N] for n_over_df, [-log N, 0] for inverse_df.
  std::pair<double, double> ease_range() const;

  bool operator==(const PennantDiagram&) const = default;
};

struct Candidate {
  KeyOrdinal key;
  std::size_t tf;

  bool operator==(const Candidate&) const = default;
};

/// Every key co-mentioned with the seed in at least one document, with its
/// co-mention count, in ascending key order. The seed itself is excluded.
/// Throws SeedNotFoundError.
std::vector<Candidate> candidates(const CoMentionIndex& index,
                                  std::string_view seed);

struct Coordinates {
  double ce;
  double ease;
};

/// Logged tf and logged inverse df. Requires 1 <= tf <= df <= N; throws
/// DomainError otherwise.
Coordinates score(std::size_t tf, std::size_t df, std::size_t n_docs,
                  const PennantConfig& config);

/// Bounds actually used on the ease axis for a corpus of `n_docs`.
SectorBounds sector_bounds(std::size_t n_docs, const PennantConfig& config);

/// A if ease >= b2, B if b1 <= ease < b2, C otherwise.
Sector classify_sector(double ease, SectorBounds bounds);

/// Tercile sector decided on integers: ease >= (2/3) log N iff df^3 <= N,
/// ease >= (1/3) log N iff df^3 <= N^2. Independent of log base and idf
/// style, and exact at the band edges.
Sector tercile_sector(std::size_t df, std::size_t n_docs);

/// Scores, classifies and ranks the seed's candidates. Ranking is ce
/// descending, ease descending, candidate id ascending; the list is cut to
/// config.k. A seed with no admissible candidates yields an empty diagram.
PennantDiagram build_pennant(const CoMentionIndex& index, std::string_view seed,
                             const PennantConfig& config);

}  // namespace pennant
