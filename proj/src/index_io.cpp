#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "pennant/errors.hpp"
#include "pennant/index.hpp"

// File layout, all integers little-endian:
//
//   0  magic "PNIX"
//   4  u32 format version
//   8  u32 CRC-32 of bytes [12, end)
//  12  u32 reserved (zero)
//  16  u8  mode, 7 bytes padding
//  24  u64 n_docs
//  32  u64 n_keys
//  40  u64 body length
//  48  body: doc table, key dictionary, postings
//
// Strings are varint length + bytes. Postings store df followed by
// varint gaps between successive document ordinals.

namespace pennant {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'N', 'I', 'X'};
constexpr std::size_t kHeaderSize = 48;
constexpr std::size_t kChecksumStart = 12;

constexpr std::uint8_t kHasTitle = 1;
constexpr std::uint8_t kHasYear = 2;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }

  void fixed(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    u8(static_cast<std::uint8_t>(v));
  }

  void str(std::string_view s) {
    varint(s.size());
    out_.append(s);
  }

  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

// Every read is bounds-checked; running off the end means a corrupt file.
class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() {
    if (pos_ >= in_.size()) throw CorruptIndexError();
    return static_cast<std::uint8_t>(in_[pos_++]);
  }

  std::uint64_t fixed(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{u8()} << (8 * i);
    return v;
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t byte = u8();
      v |= std::uint64_t{byte & 0x7fu} << shift;
      if ((byte & 0x80) == 0) return v;
    }
    throw CorruptIndexError();
  }

  std::string str() {
    const auto len = varint();
    if (len > in_.size() - pos_) throw CorruptIndexError();
    std::string s(in_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  bool at_end() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large files.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const auto len = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off),
                static_cast<uInt>(len));
  }
  return static_cast<std::uint32_t>(crc);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

}  // namespace

std::string serialize_index(const CoMentionIndex& index) {
  Writer body;
  for (const auto& doc : index.docs()) {
    body.str(doc.doc_id);
    body.u8((doc.title ? kHasTitle : 0) | (doc.year ? kHasYear : 0));
    if (doc.title) body.str(*doc.title);
    if (doc.year) body.varint(zigzag(*doc.year));
  }
  for (const auto& key : index.keys()) body.str(key);
  for (KeyOrdinal k = 0; k < index.n_keys(); ++k) {
    const auto docs = index.postings(k);
    body.varint(docs.size());
    DocOrdinal prev = 0;
    for (const DocOrdinal doc : docs) {
      body.varint(doc - prev);
      prev = doc;
    }
  }

  Writer file;
  for (const char c : kMagic) file.u8(static_cast<std::uint8_t>(c));
  file.fixed(kIndexFormatVersion, 4);
  file.fixed(0, 4);  // checksum, patched below
  file.fixed(0, 4);
  file.u8(static_cast<std::uint8_t>(index.mode()));
  file.fixed(0, 7);
  file.fixed(index.n_docs(), 8);
  file.fixed(index.n_keys(), 8);
  file.fixed(body.bytes().size(), 8);
  std::string out = std::move(file.bytes());
  out += body.bytes();

  const std::uint32_t crc = crc_of(std::string_view(out).substr(kChecksumStart));
  for (int i = 0; i < 4; ++i) out[8 + i] = static_cast<char>((crc >> (8 * i)) & 0xff);
  return out;
}

CoMentionIndex deserialize_index(std::string_view bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw CorruptIndexError();
  }
  Reader header(bytes.substr(0, std::min(bytes.size(), kHeaderSize)));
  header.fixed(4);
  if (header.fixed(4) != kIndexFormatVersion) throw UnsupportedVersionError();
  if (bytes.size() < kHeaderSize) throw CorruptIndexError();
  const auto stored_crc = static_cast<std::uint32_t>(header.fixed(4));
  if (stored_crc != crc_of(bytes.substr(kChecksumStart))) throw CorruptIndexError();

  header.fixed(4);
  const std::uint8_t mode_byte = header.u8();
  header.fixed(7);
  const auto n_docs = header.fixed(8);
  const auto n_keys = header.fixed(8);
  const auto body_len = header.fixed(8);
  if (mode_byte > static_cast<std::uint8_t>(Mode::descriptor) ||
      body_len != bytes.size() - kHeaderSize || n_docs > body_len ||
      n_keys > body_len) {
    throw CorruptIndexError();
  }

  Reader body(bytes.substr(kHeaderSize));
  std::vector<DocEntry> docs;
  docs.reserve(n_docs);
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    DocEntry doc;
    doc.doc_id = body.str();
    const std::uint8_t flags = body.u8();
    if (flags & ~(kHasTitle | kHasYear)) throw CorruptIndexError();
    if (flags & kHasTitle) doc.title = body.str();
    if (flags & kHasYear) doc.year = unzigzag(body.varint());
    docs.push_back(std::move(doc));
  }
  std::vector<std::string> keys;
  keys.reserve(n_keys);
  for (std::uint64_t i = 0; i < n_keys; ++i) keys.push_back(body.str());

  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(n_keys + 1);
  std::vector<DocOrdinal> postings;
  for (std::uint64_t k = 0; k < n_keys; ++k) {
    const auto df = body.varint();
    if (df > body.remaining()) throw CorruptIndexError();
    std::uint64_t doc = 0;
    for (std::uint64_t i = 0; i < df; ++i) {
      doc += body.varint();
      if (doc >= n_docs) throw CorruptIndexError();
      postings.push_back(static_cast<DocOrdinal>(doc));
    }
    offsets.push_back(postings.size());
  }
  if (!body.at_end()) throw CorruptIndexError();

  return CoMentionIndex::from_postings(static_cast<Mode>(mode_byte), std::move(docs),
                                       std::move(keys), std::move(offsets),
                                       std::move(postings));
}

void save_index(const CoMentionIndex& index, const std::string& path) {
  const std::string bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open index file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("failed writing index file: " + path);
}

CoMentionIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading index file: " + path);
  return deserialize_index(bytes);
}

}  // namespace pennant
