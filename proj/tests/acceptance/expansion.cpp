#include <deque>
#include <map>
#include <set>

#include "harness.hpp"
#include "regpipe/regdoc.hpp"
#include "regpipe/smartchunk.hpp"
#include "support.hpp"

namespace acceptance {
namespace {

using regdoc::ClauseId;

const char* const kFiller[] = {"vehicle", "shall", "brake", "test", "speed", "of", "20", "km", "signal", "lane"};

struct RandomDoc {
  std::string text;
  std::map<std::string, std::vector<std::string>> refs;  // clause -> referenced clauses (may dangle)
  std::vector<std::string> clauses;
};

RandomDoc random_document(Rng& rng) {
  RandomDoc doc;
  const int limit = pick(rng, 3, 100);
  std::vector<std::string> pending;
  for (int top = 1; static_cast<int>(doc.clauses.size()) < limit && top < 40; ++top) {
    std::deque<std::string> queue{std::to_string(top)};
    while (!queue.empty() && static_cast<int>(doc.clauses.size()) < limit) {
      std::string id = queue.front();
      queue.pop_front();
      doc.clauses.push_back(id);
      const int depth = static_cast<int>(std::count(id.begin(), id.end(), '.')) + 1;
      if (depth < 3) {
        const int kids = pick(rng, 0, 3);
        for (int k = 1; k <= kids; ++k) queue.push_back(id + "." + std::to_string(k));
      }
    }
  }
  // Keep document order (pre-order) for rendering.
  std::sort(doc.clauses.begin(), doc.clauses.end(),
            [](const std::string& a, const std::string& b) { return ClauseId::parse(a) < ClauseId::parse(b); });
  for (const auto& id : doc.clauses) {
    std::string body;
    const int n = pick(rng, 1, 12);
    for (int i = 0; i < n; ++i) body += std::string(i ? " " : "") + kFiller[pick(rng, 0, 9)];
    const int nrefs = pick(rng, 0, 2);
    for (int r = 0; r < nrefs; ++r) {
      std::string target = chance(rng, 0.9) ? doc.clauses[pick(rng, 0, static_cast<int>(doc.clauses.size()) - 1)]
                                             : "77.7";
      doc.refs[id].push_back(target);
      body += " as in paragraph " + target + ".";
    }
    doc.text += id + ". " + body + "\n";
  }
  return doc;
}

// Clauses reachable within `depth` hops over reference and parent edges.
std::set<ClauseId> reachable(const std::vector<ClauseId>& seeds, std::size_t depth,
                             const std::map<ClauseId, std::vector<ClauseId>>& edges) {
  std::set<ClauseId> seen(seeds.begin(), seeds.end());
  std::set<ClauseId> frontier = seen;
  for (std::size_t d = 0; d < depth; ++d) {
    std::set<ClauseId> next;
    for (const auto& c : frontier) {
      auto it = edges.find(c);
      if (it == edges.end()) continue;
      for (const auto& t : it->second) {
        if (seen.insert(t).second) next.insert(t);
      }
    }
    frontier = std::move(next);
  }
  return seen;
}

struct Case {
  regdoc::RegDocument doc;
  std::map<ClauseId, std::vector<ClauseId>> edges;
};

bool check_document(const Case& c, Result& res, const std::string& label, Rng& rng) {
  const auto graph = regdoc::build_reference_graph(c.doc);
  for (std::size_t g = 1; g <= 2; ++g) {
    for (const auto& chunk : smartchunk::base_chunks(c.doc, g)) {
      for (std::size_t depth = 0; depth <= 3; ++depth) {
        const auto expanded = smartchunk::expand_chunk(chunk, graph, c.doc, depth, {1u << 30});
        const std::set<ClauseId> got(expanded.member_clauses.begin(), expanded.member_clauses.end());
        if (got.size() != expanded.member_clauses.size()) {
          res.fail(label + " chunk " + chunk.id + ": duplicate members");
          return false;
        }
        if (got != reachable(chunk.member_clauses, depth, c.edges)) {
          res.fail(label + " chunk " + chunk.id + " depth " + std::to_string(depth) + ": member set differs");
          return false;
        }
        if (!std::equal(chunk.member_clauses.begin(), chunk.member_clauses.end(), expanded.member_clauses.begin())) {
          res.fail(label + " chunk " + chunk.id + ": seed members not kept in front");
          return false;
        }
        if (expanded.token_count != smartchunk::tokenize(expanded.text).size()) {
          res.fail(label + " chunk " + chunk.id + ": token_count does not match text");
          return false;
        }
        const std::size_t budget = static_cast<std::size_t>(pick(rng, 1, 200));
        const auto limited = smartchunk::expand_chunk(chunk, graph, c.doc, depth, {budget});
        if (limited.token_count > std::max(budget, chunk.token_count)) {
          res.fail(label + " chunk " + chunk.id + ": budget " + std::to_string(budget) + " exceeded");
          return false;
        }
        if (chunk.token_count >= budget && limited.member_clauses != chunk.member_clauses) {
          res.fail(label + " chunk " + chunk.id + ": expanded although the seed fills the budget");
          return false;
        }
        if (!(smartchunk::expand_chunk(chunk, graph, c.doc, depth, {budget}) == limited)) {
          res.fail(label + " chunk " + chunk.id + ": expansion is not deterministic");
          return false;
        }
      }
    }
  }
  return true;
}

std::map<ClauseId, std::vector<ClauseId>> parent_edges(const regdoc::RegDocument& doc) {
  std::map<ClauseId, std::vector<ClauseId>> edges;
  for (const auto& [id, _] : doc.clauses) {
    if (auto p = id.parent()) edges[id].push_back(*p);
  }
  return edges;
}

}  // namespace

Result expansion_closure() {
  Result res;
  Rng rng(4242);

  // F1 references, read off the fixture text.
  Case f1{regdoc::parse_document(regpipe::testing::fixture("F1.txt")), {}};
  f1.edges = parent_edges(f1.doc);
  for (auto [from, to] : {std::pair{"5.1", "5.2"}, {"5.2", "6.4"}, {"6.4", "5.1"}}) {
    f1.edges[ClauseId::parse(from)].push_back(ClauseId::parse(to));
  }
  if (!check_document(f1, res, "F1", rng)) return res;

  std::size_t clauses = 0;
  for (int i = 0; i < 50; ++i) {
    RandomDoc rd = random_document(rng);
    Case c{regdoc::parse_document(rd.text), {}};
    c.edges = parent_edges(c.doc);
    for (const auto& [from, targets] : rd.refs) {
      for (const auto& t : targets) {
        ClauseId tid = ClauseId::parse(t);
        if (c.doc.contains(tid)) c.edges[ClauseId::parse(from)].push_back(tid);
      }
    }
    clauses += c.doc.clauses.size();
    if (!check_document(c, res, "document " + std::to_string(i), rng)) return res;
  }
  res.detail = "F1 and 50 random documents (" + std::to_string(clauses) + " clauses), depths 0-3";
  return res;
}

}  // namespace acceptance
