#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/regdoc.hpp"

namespace regpipe::smartchunk {

// Lowercased tokens: maximal alphanumeric runs, where a leading digit run
// may absorb one ".<digits>" (so "5.2.1" yields "5.2", "1"). Bytes >= 0x80
// count as alphanumeric so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);
std::size_t count_tokens(std::string_view text);
bool is_numeric_token(std::string_view token);

struct Chunk {
  std::string id;  // canonical id of the seed clause
  std::vector<regdoc::ClauseId> member_clauses;
  std::string text;
  std::size_t token_count = 0;
  std::size_t expansion_depth = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct TokenBudget {
  std::size_t max_tokens = 512;
};

struct ChunkingDefaults {
  static constexpr std::size_t granularity = 1;
  static constexpr std::size_t depth_limit = 2;
  static constexpr std::size_t max_tokens = 512;
};

// "<id> <clause text>": the line a member contributes to a chunk's text.
std::string member_line(const regdoc::Clause& clause);

// Partition of all clauses by their depth-`granularity` ancestor. Clauses
// shallower than the granularity form singleton chunks.
std::vector<Chunk> base_chunks(const regdoc::RegDocument& doc, std::size_t granularity);

// Breadth-first enrichment over outgoing resolved references and parent
// edges. Each layer's frontier is expanded in canonical id order; a node's
// neighbours are visited references-first (textual order) then parent. A
// visited clause is appended whole iff the chunk stays within budget; only
// appended clauses seed the next layer.
Chunk expand_chunk(const Chunk& chunk, const regdoc::RefGraph& graph, const regdoc::RegDocument& doc,
                   std::size_t depth_limit, TokenBudget budget);

std::string dump_chunks(const std::vector<Chunk>& chunks);

}  // namespace regpipe::smartchunk
