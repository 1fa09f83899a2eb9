#include <algorithm>
#include <map>

#include "harness.hpp"
#include "regpipe/genconsensus.hpp"

namespace acceptance {
namespace {

using namespace regpipe::gen;

Candidate make(std::size_t index, std::optional<std::string> canonical) {
  Candidate c;
  c.index = index;
  c.text = canonical.value_or("garbage");
  c.valid = canonical.has_value();
  c.canonical = std::move(canonical);
  return c;
}

bool fails(const std::vector<Candidate>& cs, const ConsensusPolicy& policy) {
  try {
    select(cs, policy);
  } catch (const GenError& e) {
    return e.kind() == GenErrc::GenerationFailed;
  }
  return false;
}

// Count every group, then take the largest; ties go to the group whose
// earliest candidate index is smallest. Returns that earliest candidate.
std::optional<std::size_t> oracle(const std::vector<Candidate>& cs, std::size_t min_valid) {
  std::size_t valid = 0;
  for (const auto& c : cs) valid += c.valid;
  if (valid < min_valid || valid == 0) return std::nullopt;
  std::optional<std::size_t> best;
  std::size_t best_count = 0, best_first = 0;
  for (const auto& c : cs) {
    if (!c.valid) continue;
    std::size_t count = 0, first = c.index;
    for (const auto& d : cs) {
      if (d.valid && d.canonical == c.canonical) {
        ++count;
        first = std::min(first, d.index);
      }
    }
    if (!best || count > best_count || (count == best_count && first < best_first)) {
      best = first;
      best_count = count;
      best_first = first;
    }
  }
  return best;
}

}  // namespace

Result consensus_selection() {
  Result res;
  const ConsensusPolicy defaults{};
  if (select({make(0, {}), make(1, "A"), make(2, "B"), make(3, {}), make(4, "A")}, defaults).index != 1) {
    res.fail("majority example picked the wrong candidate");
  }
  if (select({make(0, "A"), make(1, "B"), make(2, "B"), make(3, "A")}, defaults).index != 0) {
    res.fail("tie example picked the wrong candidate");
  }
  if (!fails({make(0, {}), make(1, {}), make(2, {})}, defaults)) res.fail("all-invalid set did not fail");
  if (!res.pass) return res;

  Rng rng(2718);
  const char* const kForms[] = {"A", "B", "C", "D"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Candidate> cs;
    const int n = pick(rng, 1, 9);
    const int forms = pick(rng, 1, 4);
    const double invalid = trial % 10 == 0 ? 1.0 : 0.3;
    for (int i = 0; i < n; ++i) {
      cs.push_back(make(static_cast<std::size_t>(i),
                        chance(rng, invalid) ? std::nullopt : std::optional<std::string>(kForms[pick(rng, 0, forms - 1)])));
    }
    std::shuffle(cs.begin(), cs.end(), rng);
    const ConsensusPolicy policy{static_cast<std::size_t>(n), static_cast<std::size_t>(pick(rng, 1, 3))};
    const auto want = oracle(cs, policy.min_valid);
    if (!want) {
      if (!fails(cs, policy)) {
        res.fail("trial " + std::to_string(trial) + ": expected GenerationFailed");
        return res;
      }
      continue;
    }
    const Candidate got = select(cs, policy);
    if (got.index != *want) {
      res.fail("trial " + std::to_string(trial) + ": picked " + std::to_string(got.index) + ", oracle " +
               std::to_string(*want));
      return res;
    }
  }
  res.detail = "3 fixed examples and 200 random candidate sets";
  return res;
}

}  // namespace acceptance
