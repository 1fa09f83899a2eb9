#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"
#include "regpipe/regdoc.hpp"
#include "regpipe/smartchunk.hpp"

namespace regpipe::retrieve {

enum class RetrieveErrc { DuplicateChunkId, UnknownChunk };
using RetrieveError = KindedError<RetrieveErrc>;

// Chunk ids that are clause ids sort in clause order ("5" < "5.1" < "10"),
// ahead of any other id; remaining ids sort as strings.
struct ChunkIdLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

struct Posting {
  std::string chunk_id;
  std::size_t term_frequency = 0;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

class Index {
 public:
  static Index build(std::span<const smartchunk::Chunk> chunks);

  const std::map<std::string, std::vector<Posting>, std::less<>>& postings() const { return postings_; }
  const std::map<std::string, std::size_t, ChunkIdLess>& doc_lengths() const { return doc_lengths_; }
  double avg_doc_length() const { return avg_doc_length_; }
  std::size_t corpus_size() const { return doc_lengths_.size(); }
  const std::vector<Posting>* find(std::string_view token) const;

  double idf(std::size_t document_frequency) const;
  double term_score(std::size_t tf, std::size_t doc_length, double idf) const;

  Bm25Params params;

 private:
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;
  std::map<std::string, std::size_t, ChunkIdLess> doc_lengths_;
  double avg_doc_length_ = 0.0;
};

inline Index build_index(std::span<const smartchunk::Chunk> chunks) { return Index::build(chunks); }

struct RerankComponents {
  double bm25_norm = 0.0;
  double ref_proximity = 0.0;
  double numeric_overlap = 0.0;
};

struct ScoredChunk {
  std::string id;
  double bm25 = 0.0;
  double rerank = 0.0;
  RerankComponents components;
};

struct RerankWeights {
  double bm25 = 0.7;
  double ref_proximity = 0.2;
  double numeric_overlap = 0.1;
};

double score_bm25(const Index& index, std::string_view query, std::string_view chunk_id);

// Top-k by bm25 descending, ties by ChunkIdLess.
std::vector<ScoredChunk> retrieve(const Index& index, std::string_view query, std::size_t k);

using ChunkLookup = std::map<std::string, const smartchunk::Chunk*, std::less<>>;
ChunkLookup make_lookup(std::span<const smartchunk::Chunk> chunks);

std::vector<ScoredChunk> rerank(std::vector<ScoredChunk> candidates, std::string_view query,
                                const regdoc::RefGraph& graph, const ChunkLookup& chunks,
                                const RerankWeights& weights = {});

std::string format_results(std::span<const ScoredChunk> results);

}  // namespace regpipe::retrieve

namespace regpipe {
template <>
std::string_view error_kind_name(retrieve::RetrieveErrc kind) noexcept;
}
