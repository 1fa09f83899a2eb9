#include "doctest.h"
#include "regpipe/smartchunk.hpp"
#include "support.hpp"

using namespace regpipe;
using regdoc::ClauseId;

namespace {
std::vector<std::string> members(const smartchunk::Chunk& c) {
  std::vector<std::string> out;
  for (const auto& m : c.member_clauses) out.push_back(m.str());
  return out;
}
}  // namespace

TEST_CASE("tokenizer") {
  using V = std::vector<std::string>;
  CHECK(smartchunk::tokenize("speed of 20 km/h") == V{"speed", "of", "20", "km", "h"});
  CHECK(smartchunk::tokenize("").empty());
  CHECK(smartchunk::tokenize("AEBS: 5.2.1 test") == V{"aebs", "5.2", "1", "test"});
  CHECK(smartchunk::tokenize("v2.5x") == V{"v2", "5x"});
  CHECK(smartchunk::tokenize("150.0 m") == V{"150.0", "m"});
}

TEST_CASE("base chunks on F1") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto g1 = smartchunk::base_chunks(doc, 1);
  REQUIRE(g1.size() == 5);
  std::vector<std::string> seeds;
  for (const auto& c : g1) seeds.push_back(c.id);
  CHECK(seeds == std::vector<std::string>{"1", "2", "5", "6", "A3/1"});
  CHECK(members(g1[2]) == std::vector<std::string>{"5", "5.1", "5.2"});
  for (const auto& c : g1) {
    CHECK(c.expansion_depth == 0);
    CHECK(c.token_count == smartchunk::count_tokens(c.text));
  }
  CHECK(smartchunk::base_chunks(doc, 2).size() == 10);
}

TEST_CASE("expansion from 6.4 follows BFS layers") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto g = regdoc::build_reference_graph(doc);
  auto all = smartchunk::base_chunks(doc, 2);
  const auto& seed = *std::find_if(all.begin(), all.end(), [](const auto& c) { return c.id == "6.4"; });

  auto big = smartchunk::expand_chunk(seed, g, doc, 2, {10000});
  CHECK(members(big) == std::vector<std::string>{"6.4", "5.1", "6", "5.2", "5"});
  CHECK(big.expansion_depth == 2);
  CHECK(big.token_count == smartchunk::count_tokens(big.text));

  CHECK(smartchunk::expand_chunk(seed, g, doc, 0, {10000}) == seed);
  auto tiny = smartchunk::expand_chunk(seed, g, doc, 2, {1});
  CHECK(members(tiny) == std::vector<std::string>{"6.4"});
  CHECK(tiny.expansion_depth == 0);
}

TEST_CASE("budget caps additions") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto g = regdoc::build_reference_graph(doc);
  auto all = smartchunk::base_chunks(doc, 2);
  for (std::size_t budget : {5u, 20u, 30u, 40u, 60u}) {
    for (const auto& c : all) {
      auto e = smartchunk::expand_chunk(c, g, doc, 3, {budget});
      CHECK(e.token_count <= std::max(budget, c.token_count));
      CHECK(e.member_clauses.front().str() == c.id);
    }
  }
}
