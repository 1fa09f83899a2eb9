#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"
#include "regpipe/regdoc.hpp"

namespace regpipe::scenario {

enum class ScenarioErrc { SyntaxError, UnknownKey, RangeError, UnresolvedPlaceholder, InvalidScenario };
using ScenarioError = KindedError<ScenarioErrc>;

// Units: metres for positions, km/h for speeds, degrees for headings.
struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

enum class SensorKind { Radar, Camera, Lidar };

struct Sensor {
  SensorKind kind = SensorKind::Radar;
  Vec3 mount;
  std::map<std::string, std::string> params;
  friend bool operator==(const Sensor&, const Sensor&) = default;
};

struct VehicleDefinition {
  std::string model;
  std::vector<Sensor> sensors;
  friend bool operator==(const VehicleDefinition&, const VehicleDefinition&) = default;
};

struct Agent {
  std::string id;
  std::string kind;
  Vec3 position;
  double speed = 0;
  double heading = 0;
  friend bool operator==(const Agent&, const Agent&) = default;
};

struct PreConditions {
  std::string map_name;
  Vec3 ego_position;
  double ego_speed = 0;
  std::vector<Agent> agents;
  std::map<std::string, double> weather;
  friend bool operator==(const PreConditions&, const PreConditions&) = default;
};

enum class Comparator { Lt, Le, Gt, Ge, Eq };
std::string_view to_string(Comparator c);
std::optional<Comparator> comparator_from(std::string_view s);
bool compare(double lhs, Comparator c, double rhs);

enum class Window { Always, Eventually, AtEnd };
enum class ExpectedOutcome { CollisionAvoided, WarningIssued, Stopped };
std::string_view to_string(Window w);
std::string_view to_string(ExpectedOutcome o);

struct TelemetryAssertion {
  std::string signal;
  Comparator comparator = Comparator::Eq;
  double threshold = 0;
  Window window = Window::Always;
  friend bool operator==(const TelemetryAssertion&, const TelemetryAssertion&) = default;
};

struct PostConditions {
  std::vector<TelemetryAssertion> assertions;
  std::set<ExpectedOutcome> outcomes;
  friend bool operator==(const PostConditions&, const PostConditions&) = default;
};

struct TestScenario {
  std::string id;
  std::vector<regdoc::ClauseId> source_clauses;
  VehicleDefinition vehicle;
  PreConditions pre;
  PostConditions post;
  friend bool operator==(const TestScenario&, const TestScenario&) = default;
};

enum class FindingKind {
  EmptyId,
  MalformedValue,
  NoSensors,
  NonFinitePosition,
  NegativeSpeed,
  HeadingOutOfRange,
  DuplicateAgent,
  WeatherOutOfRange,
  EmptyPostConditions,
  NonFiniteThreshold,
  UnknownClause,
  SectionConflict,
};
std::string_view to_string(FindingKind k);

struct Finding {
  FindingKind kind;
  std::string subject;
  std::string message;
  friend bool operator==(const Finding&, const Finding&) = default;
};

TestScenario parse_scenario(std::string_view text);
std::vector<Finding> validate_scenario(const TestScenario& s, const regdoc::RegDocument* doc = nullptr);
std::string format_findings(const std::vector<Finding>& findings);

// Canonical scenario text; parse_scenario reads it back unchanged.
std::string emit_sim_config(const TestScenario& s);

// Placeholders: {{scenario_id}}, {{map}}, {{vehicle_model}}, {{ego_spawn}},
// {{ego_speed}}, {{sensors}}, {{agents}}, {{weather}}, {{assertions}}.
// Rendered sensor/agent/assertion/outcome lines carry "# sensor:",
// "# agent:", "# assert:" and "# outcome:" markers.
std::string emit_sim_script(const TestScenario& s, std::string_view tmpl);
std::string_view default_sim_template();
const std::vector<std::string>& sim_placeholders();

// Per-category sections as produced by separate generators.
enum class Section { Vehicle, Pre, Post };
std::string_view to_string(Section s);
// Parses a section in isolation (only its own keywords plus `scenario` and
// `source`) and returns its canonical text.
std::string canonical_section(Section section, std::string_view text);

struct MergeResult {
  std::optional<TestScenario> scenario;
  std::vector<Finding> findings;
};
MergeResult merge_sections(std::string_view vehicle, std::string_view pre, std::string_view post);

}  // namespace regpipe::scenario

namespace regpipe {
template <>
std::string_view error_kind_name(scenario::ScenarioErrc kind) noexcept;
}
