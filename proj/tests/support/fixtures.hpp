#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "pennant/corpus.hpp"

namespace pennant::testing {

/// CORPUS-6: d1:{S,A} d2:{S,A,B} d3:{S,B} d4:{A} d5:{B,C} d6:{S,C}.
inline std::vector<DocumentRecord> corpus6() {
  auto doc = [](std::string id, std::vector<std::string> refs) {
    DocumentRecord r;
    r.doc_id = std::move(id);
    r.references = std::move(refs);
    return r;
  };
  return {doc("d1", {"S", "A"}),      doc("d2", {"S", "A", "B"}), doc("d3", {"S", "B"}),
          doc("d4", {"A"}),           doc("d5", {"B", "C"}),      doc("d6", {"S", "C"})};
}

inline std::string corpus6_jsonl() {
  return R"({"id":"d1","references":["S","A"]}
{"id":"d2","references":["S","A","B"]}
{"id":"d3","references":["S","B"]}
{"id":"d4","references":["A"]}
{"id":"d5","references":["B","C"]}
{"id":"d6","references":["S","C"]}
)";
}

struct RandomCorpusShape {
  std::size_t max_docs = 200;
  std::size_t max_keys = 50;
  std::size_t max_mentions = 10;
  bool with_descriptors = false;
};

/// Random corpus with skewed key popularity, so that some keys are common
/// and many are rare. Documents may mention nothing.
inline std::vector<DocumentRecord> random_corpus(std::mt19937_64& rng,
                                                 RandomCorpusShape shape = {}) {
  std::uniform_int_distribution<std::size_t> n_docs_dist(1, shape.max_docs);
  std::uniform_int_distribution<std::size_t> n_keys_dist(1, shape.max_keys);
  const std::size_t n_docs = n_docs_dist(rng);
  const std::size_t n_keys = n_keys_dist(rng);
  std::uniform_int_distribution<std::size_t> n_mentions(0, shape.max_mentions);
  std::vector<double> weights(n_keys);
  for (std::size_t i = 0; i < n_keys; ++i) weights[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<std::size_t> key_dist(weights.begin(), weights.end());

  auto draw = [&] {
    std::vector<std::string> out;
    const auto m = n_mentions(rng);
    for (std::size_t j = 0; j < m; ++j) {
      const auto id = "k" + std::to_string(key_dist(rng));
      bool seen = false;
      for (const auto& x : out) seen = seen || x == id;
      if (!seen) out.push_back(id);
    }
    return out;
  };

  std::vector<DocumentRecord> records;
  for (std::size_t i = 0; i < n_docs; ++i) {
    DocumentRecord r;
    r.doc_id = "doc" + std::to_string(i);
    if (rng() % 3 == 0) r.title = "Title of doc " + std::to_string(i);
    if (rng() % 2 == 0) r.year = 1950 + static_cast<std::int64_t>(rng() % 75);
    r.references = draw();
    if (shape.with_descriptors) r.descriptors = draw();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace pennant::testing
