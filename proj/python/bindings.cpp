#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pennant/corpus.hpp"
#include "pennant/errors.hpp"
#include "pennant/index.hpp"
#include "pennant/pennant.hpp"
#include "pennant/render.hpp"

namespace py = pybind11;
using namespace pennant;

namespace {

py::tuple parse_corpus_text(const std::string& text) {
  std::istringstream in(text);
  auto parsed = parse_corpus(in);
  return py::make_tuple(std::move(parsed.records), std::move(parsed.report));
}

PennantConfig make_config(Mode mode, std::size_t k, std::size_t min_tf, double log_base,
                          const std::string& idf_style, const std::string& sectors) {
  PennantConfig config;
  config.mode = mode;
  config.k = k;
  config.min_tf = min_tf;
  config.log_base = log_base;
  const auto style = parse_idf_style(idf_style);
  if (!style) throw ConfigError("idf_style must be n_over_df or inverse_df");
  config.idf_style = *style;
  config.sectors = parse_sector_policy(sectors);
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pennant-diagram engine: co-mention indexes, scoring and rendering";

  auto error = py::register_exception<Error>(m, "PennantError");
  py::register_exception<SeedNotFoundError>(m, "SeedNotFoundError", error);
  py::register_exception<CorruptIndexError>(m, "CorruptIndexError", error);
  py::register_exception<UnsupportedVersionError>(m, "UnsupportedVersionError", error);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);
  py::register_exception<EmptyCorpusError>(m, "EmptyCorpusError", error);
  py::register_exception<IoError>(m, "IoError", error);

  py::enum_<Mode>(m, "Mode")
      .value("citation", Mode::citation)
      .value("descriptor", Mode::descriptor);
  py::enum_<Sector>(m, "Sector").value("A", Sector::A).value("B", Sector::B).value("C", Sector::C);

  py::class_<DocumentRecord>(m, "DocumentRecord")
      .def(py::init<>())
      .def_readwrite("doc_id", &DocumentRecord::doc_id)
      .def_readwrite("title", &DocumentRecord::title)
      .def_readwrite("references", &DocumentRecord::references)
      .def_readwrite("descriptors", &DocumentRecord::descriptors)
      .def_readwrite("year", &DocumentRecord::year)
      .def("to_jsonl", &to_jsonl)
      .def("__eq__", [](const DocumentRecord& a, const DocumentRecord& b) { return a == b; });

  py::class_<IngestReport>(m, "IngestReport")
      .def_readonly("records_accepted", &IngestReport::records_accepted)
      .def_readonly("records_rejected", &IngestReport::records_rejected)
      .def_property_readonly("rejects",
                             [](const IngestReport& r) {
                               py::list out;
                               for (const auto& x : r.rejects) {
                                 out.append(py::make_tuple(x.line_number, x.reason));
                               }
                               return out;
                             })
      .def_readonly("duplicate_doc_ids", &IngestReport::duplicate_doc_ids)
      .def("to_json", &report_to_json);

  m.def("normalize_id", &normalize_id, py::arg("raw"));
  m.def("parse_corpus", &parse_corpus_text, py::arg("text"),
        "Parse JSONL text; returns (records, report).");
  m.def(
      "parse_corpus_file",
      [](const std::string& path) {
        auto parsed = parse_corpus_file(path);
        return py::make_tuple(std::move(parsed.records), std::move(parsed.report));
      },
      py::arg("path"));

  py::class_<CoMentionIndex>(m, "CoMentionIndex")
      .def_property_readonly("mode", &CoMentionIndex::mode)
      .def_property_readonly("n_docs", &CoMentionIndex::n_docs)
      .def_property_readonly("n_keys", &CoMentionIndex::n_keys)
      .def_property_readonly("keys",
                             [](const CoMentionIndex& i) {
                               return std::vector<std::string>(i.keys().begin(), i.keys().end());
                             })
      .def("df", py::overload_cast<std::string_view>(&CoMentionIndex::df, py::const_),
           py::arg("key"))
      .def(
          "citing_set",
          [](const CoMentionIndex& i, const std::string& key) {
            std::vector<std::string> ids;
            for (const auto ordinal : citing_set(i, key)) ids.push_back(i.doc(ordinal).doc_id);
            return ids;
          },
          py::arg("key"), "Doc ids mentioning key, in ordinal order.")
      .def(
          "co_mention_count",
          [](const CoMentionIndex& i, const std::string& a, const std::string& b) {
            return co_mention_count(i, a, b);
          },
          py::arg("a"), py::arg("b"))
      .def(
          "candidates",
          [](const CoMentionIndex& i, const std::string& seed) {
            std::vector<std::pair<std::string, std::size_t>> out;
            for (const auto& c : candidates(i, seed)) out.emplace_back(i.key(c.key), c.tf);
            return out;
          },
          py::arg("seed"))
      .def("save", [](const CoMentionIndex& i, const std::string& path) { save_index(i, path); })
      .def("to_bytes",
           [](const CoMentionIndex& i) { return py::bytes(serialize_index(i)); })
      .def("__eq__", [](const CoMentionIndex& a, const CoMentionIndex& b) { return a == b; });

  m.def(
      "build_index",
      [](const std::vector<DocumentRecord>& records, Mode mode) {
        return build_index(records, mode);
      },
      py::arg("records"), py::arg("mode") = Mode::citation);
  m.def("load_index", &load_index, py::arg("path"));
  m.def(
      "index_from_bytes",
      [](const py::bytes& data) { return deserialize_index(std::string(data)); },
      py::arg("data"));

  py::class_<PennantConfig>(m, "PennantConfig")
      .def(py::init(&make_config), py::arg("mode") = Mode::citation, py::arg("k") = 100,
           py::arg("min_tf") = 1, py::arg("log_base") = 2.0,
           py::arg("idf_style") = "n_over_df", py::arg("sectors") = "terciles")
      .def_readonly("mode", &PennantConfig::mode)
      .def_readonly("k", &PennantConfig::k)
      .def_readonly("min_tf", &PennantConfig::min_tf)
      .def_readonly("log_base", &PennantConfig::log_base)
      .def_property_readonly("idf_style",
                             [](const PennantConfig& c) { return std::string(to_string(c.idf_style)); })
      .def_property_readonly("sectors",
                             [](const PennantConfig& c) { return to_string(c.sectors); });

  py::class_<PennantPoint>(m, "PennantPoint")
      .def_readonly("candidate", &PennantPoint::candidate)
      .def_readonly("tf", &PennantPoint::tf)
      .def_readonly("df", &PennantPoint::df)
      .def_readonly("ce", &PennantPoint::ce)
      .def_readonly("ease", &PennantPoint::ease)
      .def_readonly("sector", &PennantPoint::sector)
      .def_readonly("title", &PennantPoint::title)
      .def("__repr__", [](const PennantPoint& p) {
        return "PennantPoint(" + p.candidate + ", tf=" + std::to_string(p.tf) +
               ", df=" + std::to_string(p.df) + ", sector=" + std::string(to_string(p.sector)) +
               ")";
      });

  py::class_<PennantDiagram>(m, "PennantDiagram")
      .def_readonly("seed", &PennantDiagram::seed)
      .def_readonly("mode", &PennantDiagram::mode)
      .def_readonly("config", &PennantDiagram::config)
      .def_readonly("n_docs", &PennantDiagram::n_docs)
      .def_readonly("points", &PennantDiagram::points)
      .def_property_readonly("sector_bounds",
                             [](const PennantDiagram& d) {
                               return py::make_tuple(d.sector_bounds.b1, d.sector_bounds.b2);
                             })
      .def("to_json", &emit_json)
      .def(
          "to_svg",
          [](const PennantDiagram& d, int width, int height, const std::string& labels,
             std::size_t top_n) {
            PlotSpec spec;
            spec.width = width;
            spec.height = height;
            spec.labels = labels == "all"    ? LabelPolicy::all
                          : labels == "none" ? LabelPolicy::none
                                             : LabelPolicy::top_n;
            spec.top_n_labels = top_n;
            return emit_svg(d, spec);
          },
          py::arg("width") = 960, py::arg("height") = 640, py::arg("labels") = "top",
          py::arg("top_n") = 25);

  m.def("score",
        [](std::size_t tf, std::size_t df, std::size_t n_docs, const PennantConfig& config) {
          const auto c = score(tf, df, n_docs, config);
          return py::make_tuple(c.ce, c.ease);
        },
        py::arg("tf"), py::arg("df"), py::arg("n_docs"), py::arg("config"));
  m.def("build_pennant", &build_pennant, py::arg("index"), py::arg("seed"),
        py::arg("config") = PennantConfig{});
  m.def("emit_json", &emit_json, py::arg("diagram"));
  m.attr("INDEX_FORMAT_VERSION") = kIndexFormatVersion;
}
