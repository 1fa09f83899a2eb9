#include "doctest.h"
#include "regpipe/scenario.hpp"
#include "support.hpp"

using namespace regpipe;
using namespace regpipe::scenario;

namespace {
std::string s1() { return testing::fixture("S1.scn"); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

ScenarioErrc parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.kind();
  }
  FAIL("no error");
  return ScenarioErrc::SyntaxError;
}

bool has_kind(const std::vector<Finding>& fs, FindingKind k) {
  for (const auto& f : fs) {
    if (f.kind == k) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("S1 parses") {
  auto s = parse_scenario(s1());
  CHECK(s.id == "aebs_stationary");
  REQUIRE(s.vehicle.sensors.size() == 1);
  CHECK(s.vehicle.sensors[0].kind == SensorKind::Radar);
  CHECK(s.vehicle.sensors[0].mount == Vec3{2.3, 0.0, 0.5});
  CHECK(s.pre.ego_speed == 30.0);
  REQUIRE(s.pre.agents.size() == 1);
  CHECK(s.pre.agents[0].speed == 0.0);
  REQUIRE(s.post.assertions.size() == 1);
  const auto& a = s.post.assertions[0];
  CHECK(a.signal == "ego.speed");
  CHECK(a.comparator == Comparator::Eq);
  CHECK(a.threshold == 0.0);
  CHECK(a.window == Window::Eventually);
  CHECK(s.post.outcomes.count(ExpectedOutcome::CollisionAvoided) == 1);
}

TEST_CASE("parse errors") {
  CHECK(parse_error(replace(s1(), "ego_speed=30", "ego_speed=-5")) == ScenarioErrc::RangeError);
  CHECK(parse_error(replace(replace(s1(), "post assert ego.speed = 0 eventually\n", ""),
                            "post outcome collision_avoided", "")) == ScenarioErrc::RangeError);
  CHECK(parse_error(replace(s1(), "sensor radar", "sensor sonar")) == ScenarioErrc::RangeError);
  CHECK(parse_error(replace(s1(), "model=sedan", "colour=red")) == ScenarioErrc::UnknownKey);
  CHECK(parse_error(replace(s1(), "vehicle model=sedan\n", "")) == ScenarioErrc::SyntaxError);
  CHECK(parse_error(s1() + "\nteleport now\n") == ScenarioErrc::UnknownKey);
}

TEST_CASE("validation findings") {
  auto doc = regdoc::parse_document(testing::fixture("F1.txt"));
  auto s = parse_scenario(s1());
  CHECK(validate_scenario(s, &doc).empty());

  auto bad_source = s;
  bad_source.source_clauses = {regdoc::ClauseId::parse("9.9")};
  CHECK(has_kind(validate_scenario(bad_source, &doc), FindingKind::UnknownClause));
  CHECK(validate_scenario(bad_source).empty());

  auto dup = s;
  dup.pre.agents.push_back(dup.pre.agents[0]);
  CHECK(has_kind(validate_scenario(dup), FindingKind::DuplicateAgent));

  auto heading = s;
  heading.pre.agents[0].heading = 360;
  CHECK(has_kind(validate_scenario(heading), FindingKind::HeadingOutOfRange));

  auto weather = s;
  weather.pre.weather["precipitation"] = 120;
  CHECK(has_kind(validate_scenario(weather), FindingKind::WeatherOutOfRange));
}

TEST_CASE("config round trip") {
  auto s = parse_scenario(s1());
  auto text = emit_sim_config(s);
  CHECK(parse_scenario(text) == s);
  CHECK(emit_sim_config(parse_scenario(text)) == text);
}

TEST_CASE("simulation script") {
  auto s = parse_scenario(s1());
  auto script = emit_sim_script(s, default_sim_template());
  CHECK(script.find("60") != std::string::npos);
  CHECK(script.find("2.3") != std::string::npos);
  CHECK(script.find("# sensor:") != std::string::npos);
  CHECK(script.find("# agent:") != std::string::npos);
  CHECK(script.find("# assert:") != std::string::npos);
  CHECK(script.find("# outcome:") != std::string::npos);
  CHECK(script.find("{{") == std::string::npos);
  CHECK(emit_sim_script(s, "{{scenario_id}}") == "aebs_stationary");
  CHECK_THROWS_WITH_AS(emit_sim_script(s, "{{bogus}}"), doctest::Contains("UnresolvedPlaceholder"), ScenarioError);
}

TEST_CASE("sections") {
  auto vehicle = canonical_section(Section::Vehicle, "scenario x\nvehicle model=sedan\nsensor radar pos=1,0,0\n");
  auto pre = canonical_section(Section::Pre, "pre map=m ego_pos=0,0,0 ego_speed=10\n");
  auto post = canonical_section(Section::Post, "post outcome stopped\n");
  CHECK_THROWS_AS(canonical_section(Section::Pre, "post outcome stopped\n"), ScenarioError);
  auto merged = merge_sections(vehicle, pre, post);
  REQUIRE(merged.scenario.has_value());
  CHECK(merged.findings.empty());
  CHECK(merged.scenario->pre.ego_speed == 10.0);

  auto clash = merge_sections(vehicle, "scenario y\n" + pre, post);
  CHECK(has_kind(clash.findings, FindingKind::SectionConflict));
}
