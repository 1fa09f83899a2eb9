#include <cstdio>
#include <exception>

#include "harness.hpp"

int main() {
  struct Criterion {
    int number;
    const char* title;
    acceptance::Result (*run)();
  };
  const Criterion criteria[] = {
      {1, "OCL evaluator matches reference interpreter", acceptance::ocl_oracle_equivalence},
      {2, "retrieval top-10 matches full-scan BM25", acceptance::retrieval_oracle_equivalence},
      {3, "chunk expansion closure, budget and termination", acceptance::expansion_closure},
      {4, "round-trip fixpoints", acceptance::round_trips},
      {5, "conformance mutation kill", acceptance::mutation_kill},
      {6, "bridge command traces and edge-trigger law", acceptance::bridge_traces},
      {7, "consensus selection", acceptance::consensus_selection},
      {8, "end-to-end pipeline run", acceptance::end_to_end},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    acceptance::Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.fail(std::string("unexpected exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s%s%s\n", r.pass ? "PASS" : "FAIL", c.number, c.title,
                r.detail.empty() ? "" : " -- ", r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
