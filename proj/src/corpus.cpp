#include "pennant/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "pennant/errors.hpp"

namespace pennant {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

bool is_ascii_space(char c) {
  return c == ' ' || (c >= '\t' && c <= '\r');
}

// ASCII text is already NFC, and its White_Space members are exactly
// TAB..CR and SPACE, so this agrees with the ICU path below.
std::string collapse_ascii(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string normalize_unicode(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");

  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 cp = normalized.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (pending_space) out.append(static_cast<UChar>(u' '));
    pending_space = false;
    out.append(cp);
  }
  std::string utf8;
  out.toUTF8String(utf8);
  return utf8;
}

// Normalizes every entry, dropping empties and later duplicates.
std::optional<std::vector<std::string>> id_list(const ordered_json& value) {
  std::vector<std::string> out;
  if (value.is_null()) return out;
  if (!value.is_array()) return std::nullopt;
  std::unordered_set<std::string> seen;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) return std::nullopt;
    std::string id = normalize_id(item.get_ref<const std::string&>());
    if (id.empty() || !seen.insert(id).second) continue;
    out.push_back(std::move(id));
  }
  return out;
}

struct LineResult {
  std::optional<DocumentRecord> record;
  std::string reason;
};

LineResult parse_line(std::string_view line) {
  const auto value = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) return {std::nullopt, "parse error"};
  if (!value.is_object()) return {std::nullopt, "not a JSON object"};

  DocumentRecord record;
  const auto id = value.find("id");
  if (id == value.end() || id->is_null()) return {std::nullopt, "missing id"};
  if (!id->is_string()) return {std::nullopt, "id must be a string"};
  record.doc_id = normalize_id(id->get_ref<const std::string&>());
  if (record.doc_id.empty()) return {std::nullopt, "empty id"};

  if (const auto it = value.find("title"); it != value.end() && !it->is_null()) {
    if (!it->is_string()) return {std::nullopt, "title must be a string"};
    record.title = it->get<std::string>();
  }
  if (const auto it = value.find("year"); it != value.end() && !it->is_null()) {
    if (!it->is_number_integer()) return {std::nullopt, "year must be an integer"};
    record.year = it->get<std::int64_t>();
  }
  if (const auto it = value.find("references"); it != value.end()) {
    auto refs = id_list(*it);
    if (!refs) return {std::nullopt, "references must be an array of strings"};
    record.references = std::move(*refs);
  }
  if (const auto it = value.find("descriptors"); it != value.end()) {
    auto descs = id_list(*it);
    if (!descs) return {std::nullopt, "descriptors must be an array of strings"};
    record.descriptors = std::move(*descs);
  }
  return {std::move(record), {}};
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), is_ascii_space);
}

}  // namespace

std::string normalize_id(std::string_view raw) {
  if (is_ascii(raw)) return collapse_ascii(raw);
  return normalize_unicode(raw);
}

ParsedCorpus parse_corpus(std::istream& in, CorpusFormat format) {
  if (format != CorpusFormat::jsonl) throw Error("unsupported corpus format");
  if (!in) throw IoError("corpus stream is not readable");

  ParsedCorpus result;
  auto& report = result.report;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    LineResult parsed = parse_line(line);
    if (!parsed.record) {
      ++report.records_rejected;
      report.rejects.push_back({line_number, std::move(parsed.reason)});
      continue;
    }
    if (!seen_ids.insert(parsed.record->doc_id).second) {
      ++report.records_rejected;
      report.rejects.push_back({line_number, "duplicate doc_id"});
      report.duplicate_doc_ids.push_back(parsed.record->doc_id);
      continue;
    }
    ++report.records_accepted;
    result.records.push_back(std::move(*parsed.record));
  }
  if (in.bad()) throw IoError("error while reading corpus stream");
  return result;
}

ParsedCorpus parse_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return parse_corpus(in);
}

std::string to_jsonl(const DocumentRecord& record) {
  ordered_json j;
  j["id"] = record.doc_id;
  if (record.title) j["title"] = *record.title;
  j["references"] = record.references;
  j["descriptors"] = record.descriptors;
  if (record.year) j["year"] = *record.year;
  return j.dump();
}

void write_jsonl(std::ostream& out, const std::vector<DocumentRecord>& records) {
  for (const auto& record : records) out << to_jsonl(record) << '\n';
}

std::string report_to_json(const IngestReport& report) {
  ordered_json j;
  j["records_accepted"] = report.records_accepted;
  j["records_rejected"] = report.records_rejected;
  j["rejects"] = ordered_json::array();
  for (const auto& reject : report.rejects) {
    j["rejects"].push_back({{"line", reject.line_number}, {"reason", reject.reason}});
  }
  j["duplicate_doc_ids"] = report.duplicate_doc_ids;
  return j.dump(2) + "\n";
}

}  // namespace pennant
