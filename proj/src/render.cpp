#include "pennant/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pennant/errors.hpp"

namespace pennant {

using ordered_json = nlohmann::ordered_json;

void PlotSpec::validate() const {
  if (width <= margin_left + margin_right || height <= margin_top + margin_bottom) {
    throw ConfigError("plot size must exceed its margins");
  }
  if (margin_left < 0 || margin_right < 0 || margin_top < 0 || margin_bottom < 0) {
    throw ConfigError("margins must be non-negative");
  }
  if (font_size <= 0) throw ConfigError("font size must be positive");
}

std::string emit_json(const PennantDiagram& diagram) {
  const auto& config = diagram.config;
  ordered_json j;
  j["seed"] = diagram.seed;
  j["mode"] = to_string(diagram.mode);
  j["n_docs"] = diagram.n_docs;

  ordered_json c;
  c["mode"] = to_string(config.mode);
  c["k"] = config.k;
  c["min_tf"] = config.min_tf;
  c["log_base"] = config.log_base;
  c["idf_style"] = to_string(config.idf_style);
  if (config.sectors.is_terciles()) {
    c["sectors"] = "terciles";
  } else {
    c["sectors"] = {config.sectors.absolute->b1, config.sectors.absolute->b2};
  }
  j["config"] = std::move(c);
  j["sector_bounds"] = {diagram.sector_bounds.b1, diagram.sector_bounds.b2};

  auto& points = j["points"] = ordered_json::array();
  for (const auto& p : diagram.points) {
    ordered_json point;
    point["id"] = p.candidate;
    point["tf"] = p.tf;
    point["df"] = p.df;
    point["ce"] = p.ce;
    point["ease"] = p.ease;
    point["sector"] = to_string(p.sector);
    if (p.title) point["title"] = *p.title;
    points.push_back(std::move(point));
  }
  return j.dump() + "\n";
}

namespace {

template <typename T>
T require(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("diagram json: missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("diagram json: bad type for '") + key + "'");
  }
}

Sector parse_sector(const std::string& s) {
  if (s == "A") return Sector::A;
  if (s == "B") return Sector::B;
  if (s == "C") return Sector::C;
  throw Error("diagram json: bad sector '" + s + "'");
}

}  // namespace

PennantDiagram parse_diagram_json(std::string_view json) {
  const auto j = ordered_json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error("diagram json: not an object");

  PennantDiagram d;
  d.seed = require<std::string>(j, "seed");
  const auto mode = parse_mode(require<std::string>(j, "mode"));
  if (!mode) throw Error("diagram json: bad mode");
  d.mode = *mode;
  d.n_docs = require<std::size_t>(j, "n_docs");

  const auto& c = j.at("config");
  const auto config_mode = parse_mode(require<std::string>(c, "mode"));
  const auto style = parse_idf_style(require<std::string>(c, "idf_style"));
  if (!config_mode || !style) throw Error("diagram json: bad config");
  d.config.mode = *config_mode;
  d.config.idf_style = *style;
  d.config.k = require<std::size_t>(c, "k");
  d.config.min_tf = require<std::size_t>(c, "min_tf");
  d.config.log_base = require<double>(c, "log_base");
  const auto& sectors = c.at("sectors");
  if (sectors.is_array()) {
    const auto b = sectors.get<std::vector<double>>();
    if (b.size() != 2) throw Error("diagram json: bad sectors");
    d.config.sectors.absolute = SectorBounds{b[0], b[1]};
  } else if (sectors != "terciles") {
    throw Error("diagram json: bad sectors");
  }

  const auto bounds = require<std::vector<double>>(j, "sector_bounds");
  if (bounds.size() != 2) throw Error("diagram json: bad sector_bounds");
  d.sector_bounds = {bounds[0], bounds[1]};

  for (const auto& p : j.at("points")) {
    PennantPoint point;
    point.candidate = require<std::string>(p, "id");
    point.tf = require<std::size_t>(p, "tf");
    point.df = require<std::size_t>(p, "df");
    point.ce = require<double>(p, "ce");
    point.ease = require<double>(p, "ease");
    point.sector = parse_sector(require<std::string>(p, "sector"));
    if (p.contains("title")) point.title = require<std::string>(p, "title");
    d.points.push_back(std::move(point));
  }
  return d;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Affine data-to-pixel mapping; y grows upward in data space.
struct Frame {
  double left, right, top, bottom;
  double x_max;
  double y_min, y_max;

  double x(double ce) const { return left + (ce / x_max) * (right - left); }
  double y(double ease) const {
    return bottom - ((ease - y_min) / (y_max - y_min)) * (bottom - top);
  }
};

std::string px(double v) { return fmt::format("{:.3f}", v); }

}  // namespace

std::string emit_svg(const PennantDiagram& diagram, const PlotSpec& spec) {
  spec.validate();
  const double ce_max = diagram.ce_max();
  if (!(ce_max > 0.0) || !std::isfinite(ce_max)) throw Error("degenerate axis");
  const auto [ease_min, ease_max] = diagram.ease_range();

  const Frame f{static_cast<double>(spec.margin_left),
                static_cast<double>(spec.width - spec.margin_right),
                static_cast<double>(spec.margin_top),
                static_cast<double>(spec.height - spec.margin_bottom),
                ce_max, ease_min, ease_max};

  std::string out;
  auto line = [&out](std::string_view s) {
    out += s;
    out += '\n';
  };
  line(R"(<?xml version="1.0" encoding="UTF-8"?>)");
  line(fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif" font-size="{2}">)",
      spec.width, spec.height, spec.font_size));
  line(fmt::format("<title>pennant: {} ({})</title>", xml_escape(diagram.seed),
                   to_string(diagram.mode)));
  line(R"(<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>)");

  // Sector bands, bottom to top. Shared edges are printed from the same
  // value so the bands tile the plot area.
  const auto clamp = [&](double v) { return std::clamp(v, ease_min, ease_max); };
  const double b1 = clamp(diagram.sector_bounds.b1);
  const double b2 = std::max(b1, clamp(diagram.sector_bounds.b2));
  const std::string x0 = px(f.left);
  const std::string plot_w = px(f.right - f.left);
  struct Band {
    const char* name;
    double lo, hi;
    const std::string& fill;
  };
  const Band bands[] = {{"C", ease_min, b1, spec.fill_c},
                        {"B", b1, b2, spec.fill_b},
                        {"A", b2, ease_max, spec.fill_a}};
  line(R"(<g class="sectors">)");
  for (const auto& band : bands) {
    const double y_top = f.y(band.hi);
    const double y_bottom = f.y(band.lo);
    line(fmt::format(
        R"(<rect class="sector sector-{0}" x="{1}" y="{2}" width="{3}" height="{4}" fill="{5}"/>)",
        band.name, x0, px(y_top), plot_w, px(y_bottom - y_top), xml_escape(band.fill)));
  }
  for (const auto& band : bands) {
    if (band.hi <= band.lo) continue;
    line(fmt::format(
        R"(<text class="sector-label" x="{}" y="{}" text-anchor="end" font-weight="bold" fill="#555555">{}</text>)",
        px(f.right - 6), px((f.y(band.hi) + f.y(band.lo)) / 2 + spec.font_size / 2.0),
        band.name));
  }
  line("</g>");

  // Axes, integer ticks and titles.
  line(R"(<g class="axes" stroke="#000000" fill="none">)");
  line(fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}"/>)", px(f.left),
                   px(f.bottom), px(f.right)));
  line(fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>)", px(f.left),
                   px(f.bottom), px(f.top)));
  line("</g>");
  line(R"(<g class="ticks" fill="#000000">)");
  for (int t = 0; t <= static_cast<int>(std::floor(ce_max)); ++t) {
    const double x = f.x(t);
    line(fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#000000"/>)",
                     px(x), px(f.bottom), px(f.bottom + 5)));
    line(fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", px(x),
                     px(f.bottom + 5 + spec.font_size), t));
  }
  for (int t = static_cast<int>(std::ceil(ease_min));
       t <= static_cast<int>(std::floor(ease_max)); ++t) {
    const double y = f.y(t);
    line(fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#000000"/>)",
                     px(f.left - 5), px(y), px(f.left)));
    line(fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{}</text>)",
                     px(f.left - 8), px(y + spec.font_size / 3.0), t));
  }
  line("</g>");
  const std::string_view ease_title = diagram.config.idf_style == IdfStyle::n_over_df
                                          ? "ease of processing (log N/df)"
                                          : "ease of processing (log 1/df)";
  line(fmt::format(R"(<text class="axis-title" x="{}" y="{}" text-anchor="middle">{}</text>)",
                   px((f.left + f.right) / 2), px(spec.height - spec.font_size),
                   "cognitive effect (log tf)"));
  const double y_mid = (f.top + f.bottom) / 2;
  line(fmt::format(
      R"svg(<text class="axis-title" x="{0}" y="{1}" text-anchor="middle" transform="rotate(-90 {0} {1})">{2}</text>)svg",
      px(spec.font_size * 1.5), px(y_mid), ease_title));

  // Markers, then labels in rank order.
  std::size_t n_labels = 0;
  switch (spec.labels) {
    case LabelPolicy::all: n_labels = diagram.points.size(); break;
    case LabelPolicy::top_n: n_labels = std::min(spec.top_n_labels, diagram.points.size()); break;
    case LabelPolicy::none: n_labels = 0; break;
  }
  line(R"(<g class="points">)");
  for (std::size_t i = 0; i < diagram.points.size(); ++i) {
    const auto& p = diagram.points[i];
    const double x = f.x(std::clamp(p.ce, 0.0, ce_max));
    const double y = f.y(clamp(p.ease));
    line(fmt::format(
        R"(<circle class="marker sector-{}" data-rank="{}" data-id="{}" cx="{}" cy="{}" r="4" fill="#1f4e79"><title>{} tf={} df={}</title></circle>)",
        to_string(p.sector), i + 1, xml_escape(p.candidate), px(x), px(y),
        xml_escape(p.candidate), p.tf, p.df));
    if (i < n_labels) {
      line(fmt::format(R"(<text class="label" x="{}" y="{}">{}</text>)", px(x + 6),
                       px(y - 6), xml_escape(p.candidate)));
    }
  }
  line("</g>");
  line("</svg>");
  return out;
}

}  // namespace pennant
