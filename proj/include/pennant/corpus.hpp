#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pennant {

/// One citing document of the corpus.
struct DocumentRecord {
  std::string doc_id;
  std::optional<std::string> title;
  std::vector<std::string> references;   // cited work ids
  std::vector<std::string> descriptors;  // descriptor ids
  std::optional<std::int64_t> year;

  bool operator==(const DocumentRecord&) const = default;
};

struct LineReject {
  std::size_t line_number;  // 1-based, counting blank lines too
  std::string reason;

  bool operator==(const LineReject&) const = default;
};

struct IngestReport {
  std::size_t records_accepted = 0;
  std::size_t records_rejected = 0;
  std::vector<LineReject> rejects;
  std::vector<std::string> duplicate_doc_ids;
};

enum class CorpusFormat { jsonl };

struct ParsedCorpus {
  std::vector<DocumentRecord> records;
  IngestReport report;
};

/// NFC-normalizes, trims and collapses internal whitespace runs to a single
/// space. Case is preserved. May return an empty string.
std::string normalize_id(std::string_view raw);

/// Reads one JSON object per line. Malformed lines are rejected with a
/// reason and never abort the parse; a later duplicate doc id is rejected
/// and listed. Throws IoError when the stream itself fails.
ParsedCorpus parse_corpus(std::istream& in,
                          CorpusFormat format = CorpusFormat::jsonl);

/// Opens `path` and parses it. Throws IoError if the file cannot be opened.
ParsedCorpus parse_corpus_file(const std::string& path);

/// Single JSONL line (no trailing newline) that parse_corpus maps back to
/// the same record.
std::string to_jsonl(const DocumentRecord& record);

void write_jsonl(std::ostream& out, const std::vector<DocumentRecord>& records);

/// Report as a JSON document.
std::string report_to_json(const IngestReport& report);

}  // namespace pennant
