#include <cmath>

#include "doctest.h"
#include "regpipe/retrieve.hpp"
#include "support.hpp"

using namespace regpipe;

namespace {
struct Corpus {
  regdoc::RegDocument doc;
  regdoc::RefGraph graph;
  std::vector<smartchunk::Chunk> chunks;
};

Corpus f1_base() {
  Corpus c;
  c.doc = regdoc::parse_document(testing::fixture("F1.txt"));
  c.graph = regdoc::build_reference_graph(c.doc);
  c.chunks = smartchunk::base_chunks(c.doc, 1);
  return c;
}
}  // namespace

TEST_CASE("index over F1 base chunks") {
  auto c = f1_base();
  auto index = retrieve::build_index(c.chunks);
  CHECK(index.corpus_size() == 5);
  const auto* p = index.find("collision");
  REQUIRE(p != nullptr);
  REQUIRE(p->size() == 2);
  CHECK((*p)[0].chunk_id == "2");
  CHECK((*p)[1].chunk_id == "5");

  auto empty = retrieve::build_index(std::vector<smartchunk::Chunk>{});
  CHECK(empty.corpus_size() == 0);
  CHECK(retrieve::retrieve(empty, "anything", 3).empty());

  auto dup = c.chunks;
  dup.push_back(dup.front());
  CHECK_THROWS_AS(retrieve::build_index(dup), retrieve::RetrieveError);
}

TEST_CASE("bm25 values match a hand evaluation") {
  auto c = f1_base();
  auto index = retrieve::build_index(c.chunks);
  const double n = 5;
  const auto df = [&](const std::string& term) {
    double count = 0;
    for (const auto& ch : c.chunks) {
      auto toks = smartchunk::tokenize(ch.text);
      count += std::find(toks.begin(), toks.end(), term) != toks.end() ? 1 : 0;
    }
    return count;
  };
  CHECK(df("collision") == 2);
  CHECK(df("warning") == 2);
  const auto idf = [&](double df) { return std::log((n - df + 0.5) / (df + 0.5) + 1.0); };
  double avg = 0;
  for (const auto& ch : c.chunks) avg += static_cast<double>(ch.token_count);
  avg /= n;
  const auto term = [&](double tf, double dl, double df) {
    return idf(df) * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * dl / avg));
  };
  const auto& chunk5 = c.chunks[2];
  std::size_t tf_collision = 0, tf_warning = 0;
  for (const auto& t : smartchunk::tokenize(chunk5.text)) {
    tf_collision += t == "collision";
    tf_warning += t == "warning";
  }
  const double expected = term(static_cast<double>(tf_collision), static_cast<double>(chunk5.token_count), df("collision")) +
                          term(static_cast<double>(tf_warning), static_cast<double>(chunk5.token_count), df("warning"));
  CHECK(retrieve::score_bm25(index, "collision warning", "5") == doctest::Approx(expected).epsilon(1e-12));
  CHECK(retrieve::score_bm25(index, "", "5") == 0.0);
  CHECK(retrieve::score_bm25(index, "banana", "5") == 0.0);

  auto top = retrieve::retrieve(index, "collision warning", 5);
  REQUIRE(top.size() == 5);
  CHECK(top[0].id == "5");
  CHECK(top[1].id == "2");
}

TEST_CASE("ties fall back to canonical id order") {
  auto c = f1_base();
  auto index = retrieve::build_index(c.chunks);
  auto all = retrieve::retrieve(index, "zzz", 10);
  std::vector<std::string> ids;
  for (const auto& s : all) ids.push_back(s.id);
  CHECK(ids == std::vector<std::string>{"1", "2", "5", "6", "A3/1"});
  CHECK(retrieve::ChunkIdLess{}("5.10", "10"));
  CHECK(retrieve::ChunkIdLess{}("5.9", "5.10"));
}

TEST_CASE("rerank components") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto g = regdoc::build_reference_graph(doc);
  auto chunks = smartchunk::base_chunks(doc, 1);
  auto index = retrieve::build_index(chunks);
  auto lookup = retrieve::make_lookup(chunks);

  auto numeric = retrieve::rerank(retrieve::retrieve(index, "target speed 20 km/h", 5), "target speed 20 km/h", g, lookup);
  auto six = std::find_if(numeric.begin(), numeric.end(), [](const auto& s) { return s.id == "6"; });
  REQUIRE(six != numeric.end());
  CHECK(six->components.numeric_overlap == 1.0);

  auto per_clause = smartchunk::base_chunks(doc, 2);
  auto idx2 = retrieve::build_index(per_clause);
  auto lk2 = retrieve::make_lookup(per_clause);
  auto mention = retrieve::rerank(retrieve::retrieve(idx2, "requirements of paragraph 5.2", 10),
                                  "requirements of paragraph 5.2", g, lk2);
  auto c52 = std::find_if(mention.begin(), mention.end(), [](const auto& s) { return s.id == "5.2"; });
  REQUIRE(c52 != mention.end());
  CHECK(c52->components.ref_proximity == 1.0);

  const std::string q = "collision warning as specified in paragraph 6.4.";
  auto ranked = retrieve::rerank(retrieve::retrieve(index, q, 5), q, g, lookup);
  REQUIRE(ranked.size() >= 2);
  CHECK(ranked[0].id == "5");
  CHECK(ranked[1].id == "6");
  for (const auto& s : ranked) {
    CHECK(s.rerank == doctest::Approx(0.7 * s.components.bm25_norm + 0.2 * s.components.ref_proximity +
                                      0.1 * s.components.numeric_overlap));
    CHECK(s.rerank >= 0.0);
    CHECK(s.rerank <= 1.0 + 1e-12);
  }
}
