#include <algorithm>
#include <map>
#include <optional>

#include "harness.hpp"
#include "regpipe/vehiclecode.hpp"
#include "support.hpp"

namespace acceptance {
namespace {

using namespace regpipe::vehiclecode;
using regpipe::scenario::Comparator;

bool holds(double v, Comparator c, double t) {
  switch (c) {
    case Comparator::Lt: return v < t;
    case Comparator::Le: return v <= t;
    case Comparator::Gt: return v > t;
    case Comparator::Ge: return v >= t;
    case Comparator::Eq: return v == t;
  }
  return false;
}

// A rule fires on an event of its signal when its condition holds now and
// did not hold on the previous event of that signal (or there was none).
CommandTrace edge_oracle(const std::vector<ControlRule>& rules, const std::vector<Event>& events) {
  CommandTrace out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    std::optional<double> previous;
    for (std::size_t j = i; j-- > 0;) {
      if (events[j].path == e.path) {
        previous = events[j].value;
        break;
      }
    }
    for (const auto& r : rules) {
      if (r.when_path != e.path || !holds(e.value, r.comparator, r.threshold)) continue;
      if (previous && holds(*previous, r.comparator, r.threshold)) continue;
      out.push_back({e.time, r.then_path, r.value});
    }
  }
  return out;
}

// Between two firings of the same rule some event on its signal made the
// condition false. Rules here have distinct output paths.
bool law_holds(const std::vector<ControlRule>& rules, const std::vector<Event>& events, const CommandTrace& trace) {
  for (const auto& r : rules) {
    std::optional<double> last_fire;
    for (const auto& c : trace) {
      if (c.path != r.then_path) continue;
      if (last_fire) {
        const bool falsified = std::any_of(events.begin(), events.end(), [&](const Event& e) {
          return e.time >= *last_fire && e.time <= c.time && e.path == r.when_path &&
                 !holds(e.value, r.comparator, r.threshold);
        });
        if (!falsified) return false;
      }
      last_fire = c.time;
    }
  }
  return true;
}

}  // namespace

Result bridge_traces() {
  Result res;
  const auto rules = parse_rules(regpipe::testing::fixture("R1.rules"));
  const std::string brake = "Vehicle.Chassis.Brake.PedalPosition";
  const CommandTrace want_aebs{{1.0, brake, 100.0}};
  const CommandTrace want_rearm{{1.0, brake, 100.0}, {3.0, brake, 100.0}};
  if (simulate_bridge(rules, parse_events(regpipe::testing::fixture("events_aebs.txt"))) != want_aebs) {
    res.fail("AEBS trace differs from the hand-derived one");
  }
  if (simulate_bridge(rules, parse_events(regpipe::testing::fixture("events_rearm.txt"))) != want_rearm) {
    res.fail("re-arm trace differs from the hand-derived one");
  }
  if (!simulate_bridge(rules, {}).empty()) res.fail("no events must give an empty trace");
  if (!res.pass) return res;

  Rng rng(31337);
  const char* const kPaths[] = {"A.Dist", "A.Speed", "B.Flag"};
  std::size_t commands = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ControlRule> rs;
    const int nr = pick(rng, 1, 3);
    for (int k = 0; k < nr; ++k) {
      rs.push_back({kPaths[pick(rng, 0, 2)], static_cast<Comparator>(pick(rng, 0, 4)), static_cast<double>(pick(rng, 0, 10)),
                    "Out." + std::to_string(k), static_cast<double>(pick(rng, 0, 100)), true});
    }
    std::vector<Event> events;
    double t = 0;
    const int ne = pick(rng, 0, 40);
    for (int k = 0; k < ne; ++k) {
      if (chance(rng, 0.8)) t += pick(rng, 1, 4) * 0.25;
      events.push_back({t, kPaths[pick(rng, 0, 2)], static_cast<double>(pick(rng, 0, 12))});
    }
    const auto got = simulate_bridge(rs, events);
    const auto want = edge_oracle(rs, events);
    commands += want.size();
    if (!law_holds(rs, events, got)) {
      res.fail("random trace " + std::to_string(trial) + " fires twice without an intervening false condition");
      return res;
    }
    if (got != want) {
      res.fail("random trace " + std::to_string(trial) + ": " + std::to_string(got.size()) + " commands, oracle " +
               std::to_string(want.size()));
      return res;
    }
  }
  res.detail = "fixture traces exact; 1000 random traces (" + std::to_string(commands) + " commands) match";
  return res;
}

}  // namespace acceptance
