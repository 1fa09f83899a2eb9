#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"

namespace regpipe::regdoc {

enum class RegDocErrc { DuplicateClauseId, OrphanClause, EmptyDocument, EmptyLeafClause, BadClauseId };
using RegDocError = KindedError<RegDocErrc>;

// Hierarchical paragraph number, optionally qualified by an annex.
// Ordering: main body before annexes, annexes by number, then the path
// compared component-wise as integers (so 5.1 < 6 < 10).
struct ClauseId {
  std::vector<int> path;
  std::optional<int> annex;

  std::size_t depth() const { return path.size(); }
  std::optional<ClauseId> parent() const;
  std::string str() const;  // "5.2.1" or "A3/1.2"

  static ClauseId parse(std::string_view s);  // throws RegDocError(BadClauseId)
  static std::optional<ClauseId> try_parse(std::string_view s);

  friend bool operator==(const ClauseId&, const ClauseId&) = default;
  friend std::strong_ordering operator<=>(const ClauseId& a, const ClauseId& b);
};

struct Clause {
  ClauseId id;
  std::string text;
  std::vector<ClauseId> children;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct RegDocument {
  std::map<ClauseId, Clause> clauses;
  // Depth-1 main-body clauses, then annex roots in document order.
  std::vector<ClauseId> roots;

  const Clause* find(const ClauseId& id) const;
  bool contains(const ClauseId& id) const { return clauses.count(id) != 0; }

  friend bool operator==(const RegDocument&, const RegDocument&) = default;
};

enum class RefKind { Paragraph, Annex };

struct CrossRef {
  ClauseId source;
  ClauseId target;
  RefKind kind = RefKind::Paragraph;
  bool resolved = false;

  friend bool operator==(const CrossRef&, const CrossRef&) = default;
};

struct RefGraph {
  std::map<ClauseId, std::vector<CrossRef>> adjacency;

  const std::vector<CrossRef>& edges(const ClauseId& id) const;
  std::size_t edge_count() const;
};

RegDocument parse_document(std::string_view text);

// Clause references found in free text, in occurrence order. Targets are
// unresolved ids; `Annex n` yields the id of annex n's first clause when the
// document has one, else A<n>/1.
struct TextReference {
  ClauseId target;
  RefKind kind;
};
std::vector<TextReference> find_references(std::string_view text, const RegDocument* doc);

std::vector<CrossRef> extract_references(const Clause& clause, const RegDocument& doc);
RefGraph build_reference_graph(const RegDocument& doc);

// Tree pre-order traversal of all clauses.
std::vector<ClauseId> preorder(const RegDocument& doc);

// "<id>\t<text>" per clause, pre-order.
std::string dump_clauses(const RegDocument& doc);
// "<src> -> <dst> [resolved|dangling]" per edge.
std::string dump_references(const RefGraph& graph);
// Regulation-style text ("5.1. text", "Annex 3") that parse_document maps
// back to an identical document.
std::string to_regulation_text(const RegDocument& doc);

}  // namespace regpipe::regdoc

namespace regpipe {
template <>
std::string_view error_kind_name(regdoc::RegDocErrc kind) noexcept;
}
