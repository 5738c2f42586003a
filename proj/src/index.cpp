#include "pennant/index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "pennant/errors.hpp"

namespace pennant {

std::string_view to_string(Mode mode) {
  return mode == Mode::citation ? "citation" : "descriptor";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "citation") return Mode::citation;
  if (text == "descriptor") return Mode::descriptor;
  return std::nullopt;
}

std::optional<DocOrdinal> CoMentionIndex::find_doc(std::string_view doc_id) const {
  const auto it = doc_lookup_.find(std::string(doc_id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<KeyOrdinal> CoMentionIndex::find_key(std::string_view key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<KeyOrdinal>(it - keys_.begin());
}

std::span<const DocOrdinal> CoMentionIndex::postings(KeyOrdinal key) const {
  const auto begin = posting_offsets_.at(key);
  const auto end = posting_offsets_.at(key + 1);
  return std::span<const DocOrdinal>(posting_docs_).subspan(begin, end - begin);
}

std::span<const KeyOrdinal> CoMentionIndex::forward(DocOrdinal doc) const {
  const auto begin = forward_offsets_.at(doc);
  const auto end = forward_offsets_.at(doc + 1);
  return std::span<const KeyOrdinal>(forward_keys_).subspan(begin, end - begin);
}

std::size_t CoMentionIndex::df(std::string_view key) const {
  const auto ordinal = find_key(key);
  return ordinal ? df(*ordinal) : 0;
}

bool CoMentionIndex::operator==(const CoMentionIndex& other) const {
  return mode_ == other.mode_ && docs_ == other.docs_ && keys_ == other.keys_ &&
         posting_offsets_ == other.posting_offsets_ &&
         posting_docs_ == other.posting_docs_ &&
         forward_offsets_ == other.forward_offsets_ &&
         forward_keys_ == other.forward_keys_;
}

void CoMentionIndex::build_doc_lookup() {
  doc_lookup_.clear();
  doc_lookup_.reserve(docs_.size());
  for (DocOrdinal i = 0; i < docs_.size(); ++i) {
    if (!doc_lookup_.emplace(docs_[i].doc_id, i).second) {
      throw Error("duplicate doc_id: " + docs_[i].doc_id);
    }
  }
}

// Counting-sort transpose of the postings. Keys are visited in ascending
// order, so every forward list comes out ascending.
void CoMentionIndex::build_forward() {
  std::vector<std::uint64_t> counts(docs_.size() + 1, 0);
  for (const DocOrdinal doc : posting_docs_) ++counts[doc + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  forward_offsets_ = counts;
  forward_keys_.assign(posting_docs_.size(), 0);
  for (KeyOrdinal key = 0; key < keys_.size(); ++key) {
    for (const DocOrdinal doc : postings(key)) forward_keys_[counts[doc]++] = key;
  }
}

CoMentionIndex CoMentionIndex::from_postings(Mode mode, std::vector<DocEntry> docs,
                                             std::vector<std::string> keys,
                                             std::vector<std::uint64_t> posting_offsets,
                                             std::vector<DocOrdinal> posting_docs) {
  if (posting_offsets.size() != keys.size() + 1 || posting_offsets.front() != 0 ||
      posting_offsets.back() != posting_docs.size()) {
    throw CorruptIndexError();
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (k > 0 && !(keys[k - 1] < keys[k])) throw CorruptIndexError();
    const auto begin = posting_offsets[k];
    const auto end = posting_offsets[k + 1];
    if (end <= begin) throw CorruptIndexError();
    for (auto i = begin; i < end; ++i) {
      if (posting_docs[i] >= docs.size()) throw CorruptIndexError();
      if (i > begin && posting_docs[i] <= posting_docs[i - 1]) throw CorruptIndexError();
    }
  }
  CoMentionIndex index;
  index.mode_ = mode;
  index.docs_ = std::move(docs);
  index.keys_ = std::move(keys);
  index.posting_offsets_ = std::move(posting_offsets);
  index.posting_docs_ = std::move(posting_docs);
  try {
    index.build_doc_lookup();
  } catch (const Error&) {
    throw CorruptIndexError();
  }
  index.build_forward();
  return index;
}

CoMentionIndex build_index(std::span<const DocumentRecord> records, Mode mode) {
  if (records.empty()) throw EmptyCorpusError();
  if (records.size() > std::numeric_limits<DocOrdinal>::max()) {
    throw Error("corpus too large for 32-bit document ordinals");
  }

  CoMentionIndex index;
  index.mode_ = mode;
  index.docs_.reserve(records.size());

  // First pass: provisional key ids in first-seen order, one list per doc.
  std::unordered_map<std::string_view, KeyOrdinal> provisional;
  std::vector<std::string_view> provisional_keys;
  std::vector<std::uint64_t> doc_offsets{0};
  std::vector<KeyOrdinal> doc_keys;
  for (const auto& record : records) {
    index.docs_.push_back({record.doc_id, record.title, record.year});
    const auto& mentions =
        mode == Mode::citation ? record.references : record.descriptors;
    const auto start = doc_keys.size();
    for (const auto& mention : mentions) {
      if (mention.empty()) continue;
      const auto [it, inserted] = provisional.try_emplace(
          mention, static_cast<KeyOrdinal>(provisional_keys.size()));
      if (inserted) provisional_keys.push_back(mention);
      doc_keys.push_back(it->second);
    }
    std::sort(doc_keys.begin() + start, doc_keys.end());
    doc_keys.erase(std::unique(doc_keys.begin() + start, doc_keys.end()),
                   doc_keys.end());
    doc_offsets.push_back(doc_keys.size());
  }
  index.build_doc_lookup();

  // Final key ordinals follow byte order of the key ids.
  std::vector<KeyOrdinal> order(provisional_keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](KeyOrdinal a, KeyOrdinal b) {
    return provisional_keys[a] < provisional_keys[b];
  });
  std::vector<KeyOrdinal> remap(order.size());
  index.keys_.reserve(order.size());
  for (KeyOrdinal final_id = 0; final_id < order.size(); ++final_id) {
    remap[order[final_id]] = final_id;
    index.keys_.emplace_back(provisional_keys[order[final_id]]);
  }

  // Counting sort into postings; documents are visited in ordinal order, so
  // each posting list is filled ascending.
  std::vector<std::uint64_t> counts(index.keys_.size() + 1, 0);
  for (const KeyOrdinal key : doc_keys) ++counts[remap[key] + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  index.posting_offsets_ = counts;
  index.posting_docs_.assign(doc_keys.size(), 0);
  for (DocOrdinal doc = 0; doc + 1 < doc_offsets.size(); ++doc) {
    for (auto i = doc_offsets[doc]; i < doc_offsets[doc + 1]; ++i) {
      index.posting_docs_[counts[remap[doc_keys[i]]]++] = doc;
    }
  }
  index.build_forward();
  return index;
}

std::vector<DocOrdinal> citing_set(const CoMentionIndex& index, std::string_view key) {
  const auto ordinal = index.find_key(key);
  if (!ordinal) return {};
  const auto docs = index.postings(*ordinal);
  return {docs.begin(), docs.end()};
}

namespace {

std::size_t merge_count(std::span<const DocOrdinal> a, std::span<const DocOrdinal> b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

// `small` drives; each probe gallops forward in `large` from the last hit.
std::size_t gallop_count(std::span<const DocOrdinal> small,
                         std::span<const DocOrdinal> large) {
  std::size_t count = 0;
  auto lo = large.begin();
  for (const DocOrdinal target : small) {
    std::size_t step = 1;
    auto hi = lo;
    while (hi != large.end() && *hi < target) {
      lo = hi;
      const auto remaining = static_cast<std::size_t>(large.end() - hi);
      hi += std::min(step, remaining);
      step *= 2;
    }
    lo = std::lower_bound(lo, hi, target);
    if (lo == large.end()) break;
    if (*lo == target) {
      ++count;
      ++lo;
    }
  }
  return count;
}

}  // namespace

std::size_t intersection_size(std::span<const DocOrdinal> a,
                              std::span<const DocOrdinal> b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  if (b.size() / a.size() >= 16) return gallop_count(a, b);
  return merge_count(a, b);
}

std::size_t co_mention_count(const CoMentionIndex& index, std::string_view a,
                             std::string_view b) {
  const auto ka = index.find_key(a);
  const auto kb = index.find_key(b);
  if (!ka || !kb) return 0;
  return intersection_size(index.postings(*ka), index.postings(*kb));
}

}  // namespace pennant
