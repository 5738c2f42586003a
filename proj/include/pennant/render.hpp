#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "pennant/pennant.hpp"

namespace pennant {

enum class LabelPolicy { top_n, all, none };

struct PlotSpec {
  int width = 960;
  int height = 640;
  int margin_left = 80;
  int margin_right = 40;
  int margin_top = 40;
  int margin_bottom = 70;
  LabelPolicy labels = LabelPolicy::top_n;
  std::size_t top_n_labels = 25;
  // Bottom to top: C, B, A.
  std::string fill_c = "#f0f0f0";
  std::string fill_b = "#d9d9d9";
  std::string fill_a = "#bdbdbd";
  int font_size = 12;

  /// Throws ConfigError unless the plot area has positive extent.
  void validate() const;
};

/// Diagram as compact JSON with a fixed key order, terminated by a newline.
/// Doubles are written with round-trip precision.
///
///   {"seed","mode","n_docs","config":{...},"sector_bounds":[b1,b2],
///    "points":[{"id","tf","df","ce","ease","sector","title"?}]}
std::string emit_json(const PennantDiagram& diagram);

/// Inverse of emit_json. Throws Error on schema violations.
PennantDiagram parse_diagram_json(std::string_view json);

/// Static SVG 1.1 plot. Throws Error("degenerate axis") when N = 1.
std::string emit_svg(const PennantDiagram& diagram, const PlotSpec& spec = {});

}  // namespace pennant
