#include "regpipe/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(retrieve::RetrieveErrc kind) noexcept {
  switch (kind) {
    case retrieve::RetrieveErrc::DuplicateChunkId: return "DuplicateChunkId";
    case retrieve::RetrieveErrc::UnknownChunk: return "UnknownChunk";
  }
  return "RetrieveError";
}

namespace retrieve {

using regdoc::ClauseId;
using smartchunk::Chunk;

bool ChunkIdLess::operator()(std::string_view a, std::string_view b) const {
  auto ca = ClauseId::try_parse(a);
  auto cb = ClauseId::try_parse(b);
  if (ca && cb) {
    if (*ca != *cb) return *ca < *cb;
    return a < b;
  }
  if (ca.has_value() != cb.has_value()) return ca.has_value();
  return a < b;
}

Index Index::build(std::span<const Chunk> chunks) {
  Index index;
  std::map<std::string, std::map<std::string, std::size_t, ChunkIdLess>, std::less<>> counts;
  for (const Chunk& chunk : chunks) {
    auto tokens = smartchunk::tokenize(chunk.text);
    if (!index.doc_lengths_.emplace(chunk.id, tokens.size()).second) {
      throw RetrieveError(RetrieveErrc::DuplicateChunkId, chunk.id);
    }
    for (auto& t : tokens) ++counts[std::move(t)][chunk.id];
  }
  for (auto& [token, per_chunk] : counts) {
    auto& list = index.postings_[token];
    list.reserve(per_chunk.size());
    for (auto& [id, tf] : per_chunk) list.push_back({id, tf});
  }
  if (!index.doc_lengths_.empty()) {
    double total = 0.0;
    for (const auto& [_, len] : index.doc_lengths_) total += static_cast<double>(len);
    index.avg_doc_length_ = total / static_cast<double>(index.doc_lengths_.size());
  }
  return index;
}

const std::vector<Posting>* Index::find(std::string_view token) const {
  auto it = postings_.find(token);
  return it == postings_.end() ? nullptr : &it->second;
}

double Index::idf(std::size_t document_frequency) const {
  const double n = static_cast<double>(corpus_size());
  const double df = static_cast<double>(document_frequency);
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double Index::term_score(std::size_t tf, std::size_t doc_length, double idf_value) const {
  const double f = static_cast<double>(tf);
  const double norm = 1.0 - params.b + params.b * static_cast<double>(doc_length) / avg_doc_length_;
  return idf_value * (f * (params.k1 + 1.0)) / (f + params.k1 * norm);
}

double score_bm25(const Index& index, std::string_view query, std::string_view chunk_id) {
  auto len = index.doc_lengths().find(chunk_id);
  if (len == index.doc_lengths().end()) {
    throw RetrieveError(RetrieveErrc::UnknownChunk, std::string(chunk_id));
  }
  double score = 0.0;
  for (const std::string& token : smartchunk::tokenize(query)) {
    const auto* list = index.find(token);
    if (list == nullptr) continue;
    auto it = std::lower_bound(list->begin(), list->end(), chunk_id,
                               [](const Posting& p, std::string_view id) { return ChunkIdLess{}(p.chunk_id, id); });
    if (it == list->end() || it->chunk_id != chunk_id) continue;
    score += index.term_score(it->term_frequency, len->second, index.idf(list->size()));
  }
  return score;
}

std::vector<ScoredChunk> retrieve(const Index& index, std::string_view query, std::size_t k) {
  // Accumulate per chunk, walking postings once per query token.
  std::map<std::string_view, double, ChunkIdLess> acc;
  for (const auto& [id, _] : index.doc_lengths()) acc.emplace(id, 0.0);
  for (const std::string& token : smartchunk::tokenize(query)) {
    const auto* list = index.find(token);
    if (list == nullptr) continue;
    const double idf = index.idf(list->size());
    for (const Posting& p : *list) {
      acc[p.chunk_id] += index.term_score(p.term_frequency, index.doc_lengths().find(p.chunk_id)->second, idf);
    }
  }

  std::vector<ScoredChunk> scored;
  scored.reserve(acc.size());
  for (const auto& [id, score] : acc) scored.push_back({std::string(id), score, 0.0, {}});
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const ScoredChunk& a, const ScoredChunk& b) {
                      if (a.bm25 != b.bm25) return a.bm25 > b.bm25;
                      return ChunkIdLess{}(a.id, b.id);
                    });
  scored.resize(take);
  return scored;
}

ChunkLookup make_lookup(std::span<const Chunk> chunks) {
  ChunkLookup lookup;
  for (const Chunk& c : chunks) lookup.emplace(c.id, &c);
  return lookup;
}

namespace {

// Directed hop distance over resolved references from any source clause.
std::map<ClauseId, std::size_t> reference_distances(const std::vector<ClauseId>& sources,
                                                    const regdoc::RefGraph& graph) {
  std::map<ClauseId, std::size_t> dist;
  std::deque<ClauseId> queue;
  for (const ClauseId& s : sources) {
    if (dist.emplace(s, 0).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    ClauseId node = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = dist.at(node);
    for (const auto& edge : graph.edges(node)) {
      if (!edge.resolved) continue;
      if (dist.emplace(edge.target, d + 1).second) queue.push_back(edge.target);
    }
  }
  return dist;
}

}  // namespace

std::vector<ScoredChunk> rerank(std::vector<ScoredChunk> candidates, std::string_view query,
                                const regdoc::RefGraph& graph, const ChunkLookup& chunks,
                                const RerankWeights& weights) {
  double max_bm25 = 0.0;
  for (const auto& c : candidates) max_bm25 = std::max(max_bm25, c.bm25);

  std::vector<ClauseId> mentioned;
  for (auto& ref : regdoc::find_references(query, nullptr)) mentioned.push_back(std::move(ref.target));
  const auto dist = reference_distances(mentioned, graph);

  std::set<std::string> numeric;
  for (auto& t : smartchunk::tokenize(query)) {
    if (smartchunk::is_numeric_token(t)) numeric.insert(std::move(t));
  }

  for (ScoredChunk& c : candidates) {
    c.components = {};
    c.components.bm25_norm = max_bm25 > 0.0 ? c.bm25 / max_bm25 : 0.0;
    auto it = chunks.find(c.id);
    if (it != chunks.end()) {
      const Chunk& chunk = *it->second;
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (const ClauseId& m : chunk.member_clauses) {
        if (auto d = dist.find(m); d != dist.end()) best = std::min(best, d->second);
      }
      if (best != std::numeric_limits<std::size_t>::max()) {
        c.components.ref_proximity = 1.0 / (1.0 + static_cast<double>(best));
      }
      if (!numeric.empty()) {
        auto tokens = smartchunk::tokenize(chunk.text);
        std::set<std::string> have(tokens.begin(), tokens.end());
        std::size_t hits = 0;
        for (const auto& n : numeric) hits += have.count(n);
        c.components.numeric_overlap = static_cast<double>(hits) / static_cast<double>(numeric.size());
      }
    }
    c.rerank = weights.bm25 * c.components.bm25_norm + weights.ref_proximity * c.components.ref_proximity +
               weights.numeric_overlap * c.components.numeric_overlap;
  }
  std::sort(candidates.begin(), candidates.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.rerank != b.rerank) return a.rerank > b.rerank;
    return ChunkIdLess{}(a.id, b.id);
  });
  return candidates;
}

std::string format_results(std::span<const ScoredChunk> results) {
  std::string out;
  for (const auto& r : results) {
    out += r.id + "\tbm25=" + text::format_real(r.bm25) + "\trerank=" + text::format_real(r.rerank) +
           "\tbm25_norm=" + text::format_real(r.components.bm25_norm) +
           "\tref_proximity=" + text::format_real(r.components.ref_proximity) +
           "\tnumeric_overlap=" + text::format_real(r.components.numeric_overlap) + "\n";
  }
  return out;
}

}  // namespace retrieve
}  // namespace regpipe
