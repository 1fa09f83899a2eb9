#include "regpipe/regdoc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(regdoc::RegDocErrc kind) noexcept {
  using regdoc::RegDocErrc;
  switch (kind) {
    case RegDocErrc::DuplicateClauseId: return "DuplicateClauseId";
    case RegDocErrc::OrphanClause: return "OrphanClause";
    case RegDocErrc::EmptyDocument: return "EmptyDocument";
    case RegDocErrc::EmptyLeafClause: return "EmptyLeafClause";
    case RegDocErrc::BadClauseId: return "BadClauseId";
  }
  return "RegDocError";
}

namespace regdoc {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// Reads one positive integer at `pos`; advances `pos` on success.
std::optional<int> read_component(std::string_view s, std::size_t& pos) {
  std::size_t end = pos;
  while (end < s.size() && is_digit(s[end])) ++end;
  if (end == pos) return std::nullopt;
  int value = 0;
  auto res = std::from_chars(s.data() + pos, s.data() + end, value);
  if (res.ec != std::errc{} || value < 1) return std::nullopt;
  pos = end;
  return value;
}

// Matches `\d+(\.\d+)*` at `pos` (components must be positive). On success
// `pos` is just past the last digit.
std::optional<std::vector<int>> read_path(std::string_view s, std::size_t& pos) {
  std::size_t p = pos;
  std::vector<int> path;
  auto first = read_component(s, p);
  if (!first) return std::nullopt;
  path.push_back(*first);
  while (p + 1 < s.size() && s[p] == '.' && is_digit(s[p + 1])) {
    std::size_t q = p + 1;
    auto next = read_component(s, q);
    if (!next) return std::nullopt;
    path.push_back(*next);
    p = q;
  }
  pos = p;
  return path;
}

bool iequals_at(std::string_view s, std::size_t pos, std::string_view word) {
  if (pos + word.size() > s.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i]) return false;
  }
  return true;
}

struct Header {
  std::vector<int> path;
  std::string_view rest;
};

// `^(\d+(\.\d+)*)\.\s+(.*)$`
std::optional<Header> match_header(std::string_view line) {
  std::size_t pos = 0;
  auto path = read_path(line, pos);
  if (!path) return std::nullopt;
  if (pos >= line.size() || line[pos] != '.') return std::nullopt;
  ++pos;
  if (pos >= line.size() || !is_space(line[pos])) return std::nullopt;
  return Header{std::move(*path), line.substr(pos)};
}

// `^Annex\s+(\d+)\b.*$`
std::optional<int> match_annex_header(std::string_view line) {
  if (line.substr(0, 5) != "Annex") return std::nullopt;
  std::size_t pos = 5;
  if (pos >= line.size() || !is_space(line[pos])) return std::nullopt;
  while (pos < line.size() && is_space(line[pos])) ++pos;
  auto n = read_component(line, pos);
  if (!n) return std::nullopt;
  if (pos < line.size() && is_word(line[pos])) return std::nullopt;
  return n;
}

ClauseId annex_target(int annex, const RegDocument* doc) {
  if (doc != nullptr) {
    for (const auto& root : doc->roots) {
      if (root.annex == annex) return root;
    }
  }
  return ClauseId{{1}, annex};
}

}  // namespace

std::strong_ordering operator<=>(const ClauseId& a, const ClauseId& b) {
  if (a.annex.has_value() != b.annex.has_value()) {
    return a.annex.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  if (a.annex && *a.annex != *b.annex) return *a.annex <=> *b.annex;
  return std::lexicographical_compare_three_way(a.path.begin(), a.path.end(), b.path.begin(),
                                                b.path.end());
}

std::optional<ClauseId> ClauseId::parent() const {
  if (path.size() <= 1) return std::nullopt;
  ClauseId p = *this;
  p.path.pop_back();
  return p;
}

std::string ClauseId::str() const {
  std::string out;
  if (annex) out = "A" + std::to_string(*annex) + "/";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out.push_back('.');
    out += std::to_string(path[i]);
  }
  return out;
}

std::optional<ClauseId> ClauseId::try_parse(std::string_view s) {
  ClauseId id;
  std::size_t pos = 0;
  if (!s.empty() && s[0] == 'A') {
    pos = 1;
    auto annex = read_component(s, pos);
    if (!annex || pos >= s.size() || s[pos] != '/') return std::nullopt;
    id.annex = *annex;
    ++pos;
  }
  auto path = read_path(s, pos);
  if (!path) return std::nullopt;
  // Tolerate the trailing period of regulation-style numbering ("5.2.").
  if (pos < s.size() && s[pos] == '.') ++pos;
  if (pos != s.size()) return std::nullopt;
  id.path = std::move(*path);
  return id;
}

ClauseId ClauseId::parse(std::string_view s) {
  auto id = try_parse(s);
  if (!id) throw RegDocError(RegDocErrc::BadClauseId, "not a clause id: '" + std::string(s) + "'");
  return *id;
}

const Clause* RegDocument::find(const ClauseId& id) const {
  auto it = clauses.find(id);
  return it == clauses.end() ? nullptr : &it->second;
}

const std::vector<CrossRef>& RefGraph::edges(const ClauseId& id) const {
  static const std::vector<CrossRef> kNone;
  auto it = adjacency.find(id);
  return it == adjacency.end() ? kNone : it->second;
}

std::size_t RefGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, list] : adjacency) n += list.size();
  return n;
}

RegDocument parse_document(std::string_view text) {
  RegDocument doc;
  std::vector<ClauseId> order;
  std::map<ClauseId, std::string> raw;
  std::optional<int> annex;
  std::optional<ClauseId> current;

  for (const std::string& line : text::split_lines(text)) {
    if (auto n = match_annex_header(line)) {
      annex = *n;
      current.reset();  // the annex title line belongs to no clause
      continue;
    }
    if (auto header = match_header(line)) {
      ClauseId id{std::move(header->path), annex};
      if (raw.count(id)) {
        throw RegDocError(RegDocErrc::DuplicateClauseId, id.str());
      }
      raw.emplace(id, std::string(header->rest));
      order.push_back(id);
      current = std::move(id);
      continue;
    }
    if (current) {
      std::string& body = raw[*current];
      body.push_back(' ');
      body.append(line);
    }
  }

  if (order.empty()) {
    throw RegDocError(RegDocErrc::EmptyDocument, "no clause headers found");
  }

  for (const ClauseId& id : order) {
    doc.clauses.emplace(id, Clause{id, text::collapse_whitespace(raw[id]), {}});
  }
  for (const ClauseId& id : order) {
    if (auto parent = id.parent()) {
      auto it = doc.clauses.find(*parent);
      if (it == doc.clauses.end()) {
        throw RegDocError(RegDocErrc::OrphanClause,
                          id.str() + " (missing parent " + parent->str() + ")");
      }
      it->second.children.push_back(id);
    } else {
      doc.roots.push_back(id);
    }
  }
  for (const auto& [id, clause] : doc.clauses) {
    if (clause.children.empty() && clause.text.empty()) {
      throw RegDocError(RegDocErrc::EmptyLeafClause, id.str());
    }
  }
  return doc;
}

std::vector<TextReference> find_references(std::string_view s, const RegDocument* doc) {
  std::vector<TextReference> refs;
  std::size_t pos = 0;
  while (pos < s.size()) {
    bool boundary = pos == 0 || !is_word(s[pos - 1]);
    if (boundary && iequals_at(s, pos, "paragraph")) {
      std::size_t p = pos + 9;
      if (p < s.size() && (s[p] == 's' || s[p] == 'S')) ++p;
      std::size_t id_start = p;
      while (p < s.size() && is_space(s[p])) ++p;
      if (p > id_start) {
        if (auto path = read_path(s, p)) {
          refs.push_back({ClauseId{std::move(*path), std::nullopt}, RefKind::Paragraph});
          if (p < s.size() && s[p] == '.') ++p;
          // Enumeration: ", <id>." repeated, optionally closed by "and <id>.".
          for (;;) {
            std::size_t q = p;
            while (q < s.size() && is_space(s[q])) ++q;
            if (q < s.size() && s[q] == ',') {
              ++q;
              while (q < s.size() && is_space(s[q])) ++q;
              if (auto next = read_path(s, q)) {
                refs.push_back({ClauseId{std::move(*next), std::nullopt}, RefKind::Paragraph});
                if (q < s.size() && s[q] == '.') ++q;
                p = q;
                continue;
              }
              break;
            }
            if (q > p && iequals_at(s, q, "and") && q + 3 < s.size() && is_space(s[q + 3])) {
              q += 3;
              while (q < s.size() && is_space(s[q])) ++q;
              if (auto next = read_path(s, q)) {
                refs.push_back({ClauseId{std::move(*next), std::nullopt}, RefKind::Paragraph});
                if (q < s.size() && s[q] == '.') ++q;
                p = q;
              }
            }
            break;
          }
          pos = p;
          continue;
        }
      }
    }
    if (boundary && iequals_at(s, pos, "annex")) {
      std::size_t p = pos + 5;
      std::size_t num_start = p;
      while (p < s.size() && is_space(s[p])) ++p;
      if (p > num_start) {
        if (auto n = read_component(s, p); n && (p >= s.size() || !is_word(s[p]))) {
          refs.push_back({annex_target(*n, doc), RefKind::Annex});
          pos = p;
          continue;
        }
      }
    }
    ++pos;
  }
  return refs;
}

std::vector<CrossRef> extract_references(const Clause& clause, const RegDocument& doc) {
  std::vector<CrossRef> out;
  for (auto& ref : find_references(clause.text, &doc)) {
    bool resolved = doc.contains(ref.target);
    out.push_back(CrossRef{clause.id, std::move(ref.target), ref.kind, resolved});
  }
  return out;
}

RefGraph build_reference_graph(const RegDocument& doc) {
  RefGraph graph;
  for (const auto& [id, clause] : doc.clauses) {
    graph.adjacency.emplace(id, extract_references(clause, doc));
  }
  return graph;
}

std::vector<ClauseId> preorder(const RegDocument& doc) {
  std::vector<ClauseId> out;
  out.reserve(doc.clauses.size());
  std::vector<ClauseId> stack(doc.roots.rbegin(), doc.roots.rend());
  while (!stack.empty()) {
    ClauseId id = std::move(stack.back());
    stack.pop_back();
    const Clause& c = doc.clauses.at(id);
    stack.insert(stack.end(), c.children.rbegin(), c.children.rend());
    out.push_back(std::move(id));
  }
  return out;
}

std::string dump_clauses(const RegDocument& doc) {
  std::string out;
  for (const ClauseId& id : preorder(doc)) {
    out += id.str();
    out.push_back('\t');
    out += doc.clauses.at(id).text;
    out.push_back('\n');
  }
  return out;
}

std::string dump_references(const RefGraph& graph) {
  std::string out;
  for (const auto& [id, edges] : graph.adjacency) {
    for (const CrossRef& e : edges) {
      out += e.source.str() + " -> " + e.target.str() + (e.resolved ? " [resolved]\n" : " [dangling]\n");
    }
  }
  return out;
}

std::string to_regulation_text(const RegDocument& doc) {
  std::string out;
  std::optional<int> annex;
  for (const ClauseId& id : preorder(doc)) {
    if (id.annex != annex) {
      annex = id.annex;
      out += "Annex " + std::to_string(*annex) + "\n";
    }
    std::string number;
    for (int c : id.path) number += std::to_string(c) + ".";
    out += number + " " + doc.clauses.at(id).text + "\n";
  }
  return out;
}

}  // namespace regdoc
}  // namespace regpipe
