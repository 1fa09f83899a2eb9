#pragma once

#include <chrono>
#include <random>
#include <string>

namespace regpipe {}

namespace acceptance {

using namespace regpipe;

struct Result {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Result ocl_oracle_equivalence();
Result retrieval_oracle_equivalence();
Result expansion_closure();
Result round_trips();
Result mutation_kill();
Result bridge_traces();
Result consensus_selection();
Result end_to_end();

}  // namespace acceptance
