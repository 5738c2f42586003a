#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pennant/corpus.hpp"

namespace pennant {

enum class Mode : std::uint8_t { citation = 0, descriptor = 1 };

std::string_view to_string(Mode mode);
/// Parses "citation" or "descriptor"; nullopt otherwise.
std::optional<Mode> parse_mode(std::string_view text);

using DocOrdinal = std::uint32_t;
using KeyOrdinal = std::uint32_t;

inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct DocEntry {
  std::string doc_id;
  std::optional<std::string> title;
  std::optional<std::int64_t> year;

  bool operator==(const DocEntry&) const = default;
};

/// Immutable inverted index over one mention kind (cited works or
/// descriptors).
///
/// Documents get dense ordinals in input order. Keys get dense ordinals in
/// ascending byte order of their id, so key ordinal order and key id order
/// agree. Postings and forward lists are both stored in CSR form and are
/// transposes of each other.
class CoMentionIndex {
 public:
  CoMentionIndex() = default;

  Mode mode() const { return mode_; }
  std::size_t n_docs() const { return docs_.size(); }
  std::size_t n_keys() const { return keys_.size(); }

  const DocEntry& doc(DocOrdinal ordinal) const { return docs_.at(ordinal); }
  std::span<const DocEntry> docs() const { return docs_; }
  std::optional<DocOrdinal> find_doc(std::string_view doc_id) const;

  const std::string& key(KeyOrdinal ordinal) const { return keys_.at(ordinal); }
  std::span<const std::string> keys() const { return keys_; }
  std::optional<KeyOrdinal> find_key(std::string_view key) const;

  /// Ascending documents mentioning `key`.
  std::span<const DocOrdinal> postings(KeyOrdinal key) const;
  /// Ascending keys mentioned by `doc`.
  std::span<const KeyOrdinal> forward(DocOrdinal doc) const;

  std::size_t df(KeyOrdinal key) const { return postings(key).size(); }
  /// Zero for unknown keys.
  std::size_t df(std::string_view key) const;

  bool operator==(const CoMentionIndex& other) const;

  /// Assembles an index from a document table and per-key postings. Keys
  /// must be strictly ascending, postings ascending and in range; forward
  /// lists are derived. Throws CorruptIndexError on violations.
  static CoMentionIndex from_postings(Mode mode, std::vector<DocEntry> docs,
                                      std::vector<std::string> keys,
                                      std::vector<std::uint64_t> posting_offsets,
                                      std::vector<DocOrdinal> posting_docs);

 private:
  friend CoMentionIndex build_index(std::span<const DocumentRecord>, Mode);

  void build_doc_lookup();
  void build_forward();

  Mode mode_ = Mode::citation;
  std::vector<DocEntry> docs_;
  std::vector<std::string> keys_;
  std::vector<std::uint64_t> posting_offsets_{0};
  std::vector<DocOrdinal> posting_docs_;
  std::vector<std::uint64_t> forward_offsets_{0};
  std::vector<KeyOrdinal> forward_keys_;
  std::unordered_map<std::string, DocOrdinal> doc_lookup_;
};

/// Indexes references (citation mode) or descriptors (descriptor mode).
/// Documents without mentions still count toward n_docs. Throws
/// EmptyCorpusError for an empty record list and Error on duplicate doc ids.
CoMentionIndex build_index(std::span<const DocumentRecord> records, Mode mode);

/// Sorted documents mentioning `key`; empty for unknown keys.
std::vector<DocOrdinal> citing_set(const CoMentionIndex& index,
                                   std::string_view key);

/// Number of documents mentioning both keys.
std::size_t co_mention_count(const CoMentionIndex& index, std::string_view a,
                             std::string_view b);

/// Size of the intersection of two ascending ordinal lists. Uses a linear
/// merge for lists of similar length and galloping search once one list is
/// at least 16 times longer than the other.
std::size_t intersection_size(std::span<const DocOrdinal> a,
                              std::span<const DocOrdinal> b);

/// Binary index file: magic, version, CRC-32 of the body, then the body
/// (mode, n_docs, n_keys, doc table, key dictionary, delta-varint postings).
std::string serialize_index(const CoMentionIndex& index);
/// Throws UnsupportedVersionError or CorruptIndexError.
CoMentionIndex deserialize_index(std::string_view bytes);

void save_index(const CoMentionIndex& index, const std::string& path);
CoMentionIndex load_index(const std::string& path);

}  // namespace pennant
