#include "regpipe/smartchunk.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace regpipe::smartchunk {

using regdoc::Clause;
using regdoc::ClauseId;
using regdoc::RegDocument;

namespace {

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

template <typename Sink>
void scan_tokens(std::string_view s, Sink&& sink) {
  std::size_t i = 0;
  const auto at = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    if (!is_alnum(at(i))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    bool all_digits = true;
    bool has_point = false;
    while (i < s.size()) {
      unsigned char c = at(i);
      if (is_alnum(c)) {
        all_digits = all_digits && is_digit(c);
        ++i;
      } else if (c == '.' && all_digits && !has_point && i + 1 < s.size() && is_digit(at(i + 1))) {
        has_point = true;
        ++i;
      } else {
        break;
      }
    }
    sink(s.substr(start, i - start));
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t depth_of(const ClauseId& id) { return id.path.size(); }

void collect_subtree(const RegDocument& doc, const ClauseId& id, std::vector<ClauseId>& out) {
  out.push_back(id);
  for (const ClauseId& child : doc.clauses.at(id).children) collect_subtree(doc, child, out);
}

std::string join_member_text(const RegDocument& doc, const std::vector<ClauseId>& members) {
  std::string text;
  for (const ClauseId& id : members) {
    if (!text.empty()) text.push_back('\n');
    text += member_line(doc.clauses.at(id));
  }
  return text;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  scan_tokens(text, [&](std::string_view t) { tokens.push_back(lower(t)); });
  return tokens;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t n = 0;
  scan_tokens(text, [&](std::string_view) { ++n; });
  return n;
}

bool is_numeric_token(std::string_view token) {
  if (token.empty() || !is_digit(static_cast<unsigned char>(token.front()))) return false;
  bool point = false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    char c = token[i];
    if (c == '.') {
      if (point || i + 1 == token.size()) return false;
      point = true;
    } else if (!is_digit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

std::string member_line(const Clause& clause) { return clause.id.str() + " " + clause.text; }

std::vector<Chunk> base_chunks(const RegDocument& doc, std::size_t granularity) {
  std::vector<Chunk> chunks;
  std::vector<ClauseId> seeds;
  // Pre-order walk that stops descending at the granularity depth.
  std::vector<ClauseId> stack(doc.roots.rbegin(), doc.roots.rend());
  while (!stack.empty()) {
    ClauseId id = std::move(stack.back());
    stack.pop_back();
    if (depth_of(id) < granularity) {
      const auto& kids = doc.clauses.at(id).children;
      stack.insert(stack.end(), kids.rbegin(), kids.rend());
    }
    seeds.push_back(std::move(id));
  }
  for (const ClauseId& seed : seeds) {
    Chunk chunk;
    chunk.id = seed.str();
    if (depth_of(seed) >= granularity) {
      collect_subtree(doc, seed, chunk.member_clauses);
    } else {
      chunk.member_clauses.push_back(seed);
    }
    chunk.text = join_member_text(doc, chunk.member_clauses);
    chunk.token_count = count_tokens(chunk.text);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

Chunk expand_chunk(const Chunk& chunk, const regdoc::RefGraph& graph, const RegDocument& doc,
                   std::size_t depth_limit, TokenBudget budget) {
  Chunk out = chunk;
  std::set<ClauseId> visited(chunk.member_clauses.begin(), chunk.member_clauses.end());
  std::vector<ClauseId> frontier = chunk.member_clauses;
  std::size_t reached = chunk.expansion_depth;

  for (std::size_t layer = 1; layer <= depth_limit && !frontier.empty(); ++layer) {
    std::sort(frontier.begin(), frontier.end());
    std::vector<ClauseId> discovered;
    const auto visit = [&](const ClauseId& id) {
      if (!doc.contains(id) || !visited.insert(id).second) return;
      discovered.push_back(id);
    };
    for (const ClauseId& node : frontier) {
      for (const auto& edge : graph.edges(node)) {
        if (edge.resolved) visit(edge.target);
      }
      if (auto parent = node.parent()) visit(*parent);
    }

    std::vector<ClauseId> next;
    for (const ClauseId& id : discovered) {
      std::string line = member_line(doc.clauses.at(id));
      // The newline separator contributes no tokens, so counts add up.
      std::size_t extra = count_tokens(line);
      if (out.token_count + extra > budget.max_tokens) continue;
      out.member_clauses.push_back(id);
      if (!out.text.empty()) out.text.push_back('\n');
      out.text += line;
      out.token_count += extra;
      reached = std::max(reached, chunk.expansion_depth + layer);
      next.push_back(id);
    }
    frontier = std::move(next);
  }
  out.expansion_depth = reached;
  return out;
}

std::string dump_chunks(const std::vector<Chunk>& chunks) {
  std::string out;
  for (const Chunk& c : chunks) {
    out += "chunk " + c.id + "\n";
    out += "expansion_depth " + std::to_string(c.expansion_depth) + "\n";
    out += "token_count " + std::to_string(c.token_count) + "\n";
    out += "members";
    for (const auto& m : c.member_clauses) out += " " + m.str();
    out += "\n";
    out += "text\n";
    std::size_t start = 0;
    while (start <= c.text.size()) {
      std::size_t nl = c.text.find('\n', start);
      std::size_t end = nl == std::string::npos ? c.text.size() : nl;
      out += "  " + c.text.substr(start, end - start) + "\n";
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
    out += "end\n";
  }
  return out;
}

}  // namespace regpipe::smartchunk
