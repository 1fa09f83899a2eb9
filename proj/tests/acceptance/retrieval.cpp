#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "harness.hpp"
#include "regpipe/retrieve.hpp"
#include "regpipe/smartchunk.hpp"

namespace acceptance {
namespace {

const char* const kVocabulary[] = {"vehicle", "brake", "Warning", "collision", "target", "speed", "radar",
                                   "driver", "signal", "test", "track", "lane", "20", "40", "5.2", "km",
                                   "shall", "system", "AEBS", "mode"};
constexpr int kVocabularySize = sizeof kVocabulary / sizeof kVocabulary[0];

// Texts are built from whitespace-separated words that are each a single
// token, so plain splitting plus lowercasing is an exact tokenizer here.
std::vector<std::string> words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(w);
  }
  return out;
}

std::string random_text(Rng& rng, int lo, int hi) {
  std::string out;
  const int n = pick(rng, lo, hi);
  for (int i = 0; i < n; ++i) out += std::string(i ? " " : "") + kVocabulary[pick(rng, 0, kVocabularySize - 1)];
  return out;
}

struct Scored {
  int id;
  double score;
};

std::vector<Scored> full_scan(const std::vector<std::vector<std::string>>& docs, const std::vector<int>& ids,
                              const std::string& query) {
  const double n = static_cast<double>(docs.size());
  double total = 0;
  for (const auto& d : docs) total += static_cast<double>(d.size());
  const double avg = total / n;
  std::vector<Scored> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0;
    for (const auto& q : words(query)) {
      const double tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), q));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), q) != d.end() ? 1 : 0;
      const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      const double len = static_cast<double>(docs[i].size());
      score += idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * len / avg));
    }
    out.push_back({ids[i], score});
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  return out;
}

}  // namespace

Result retrieval_oracle_equivalence() {
  Result res;
  Rng rng(777);
  int queries = 0;
  for (int corpus = 0; corpus < 4; ++corpus) {
    std::vector<smartchunk::Chunk> chunks;
    std::vector<std::vector<std::string>> docs;
    std::vector<int> ids;
    const int size = pick(rng, 50, 80);
    for (int i = 1; i <= size; ++i) {
      smartchunk::Chunk c;
      c.id = std::to_string(i);
      // Repeat an earlier text now and then to force exact score ties.
      c.text = (i > 1 && chance(rng, 0.15)) ? chunks[pick(rng, 0, i - 2)].text : random_text(rng, 3, 30);
      docs.push_back(words(c.text));
      ids.push_back(i);
      chunks.push_back(std::move(c));
    }
    // Shuffle input order; ranking must not depend on it.
    std::vector<std::size_t> order(chunks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<smartchunk::Chunk> shuffled;
    for (auto i : order) shuffled.push_back(chunks[i]);
    const auto index = retrieve::build_index(shuffled);

    for (int q = 0; q < 25; ++q, ++queries) {
      std::string query = random_text(rng, 0, 5);
      if (chance(rng, 0.1)) query += " unseen";
      const auto got = retrieve::retrieve(index, query, 10);
      const auto want = full_scan(docs, ids, query);
      if (got.size() != std::min<std::size_t>(10, want.size())) {
        res.fail("query '" + query + "': wrong result length");
        return res;
      }
      for (std::size_t r = 0; r < got.size(); ++r) {
        if (got[r].id != std::to_string(want[r].id) || std::abs(got[r].bm25 - want[r].score) > 1e-9) {
          res.fail("query '" + query + "' rank " + std::to_string(r + 1) + ": got " + got[r].id + " expected " +
                   std::to_string(want[r].id));
          return res;
        }
      }
    }
  }
  res.detail = std::to_string(queries) + " queries over 4 corpora of >= 50 chunks";
  return res;
}

}  // namespace acceptance
