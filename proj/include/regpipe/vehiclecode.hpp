#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"
#include "regpipe/scenario.hpp"

namespace regpipe::vehiclecode {

enum class VehicleErrc {
  SyntaxError,
  DuplicatePath,
  BadRange,
  NoMatch,
  AmbiguousMapping,
  UnresolvedPlaceholder,
  UnmappedSignalInRule,
  InvalidRule,
  UnsortedEvents,
};
using VehicleError = KindedError<VehicleErrc>;

enum class DataType { Boolean, Int, Float, String };
std::string_view to_string(DataType t);

struct VssEntry {
  DataType type = DataType::Float;
  std::optional<std::string> unit;
  std::optional<double> min;
  std::optional<double> max;
  friend bool operator==(const VssEntry&, const VssEntry&) = default;
};

struct VssCatalog {
  std::map<std::string, VssEntry, std::less<>> entries;

  const VssEntry* find(std::string_view path) const;
  bool contains(std::string_view path) const { return find(path) != nullptr; }
};

VssCatalog parse_vss_catalog(std::string_view text);
std::string format_catalog(const VssCatalog& catalog);

enum class ActionRole { Actuation, Telemetry };
std::string_view to_string(ActionRole r);

struct Action {
  std::string phrase;
  ActionRole role = ActionRole::Telemetry;
  friend bool operator==(const Action&, const Action&) = default;
};

struct ExperimentModel {
  scenario::TestScenario scenario;
  std::vector<Action> actions;
};

// Telemetry actions come from assertion signals, actuation actions from
// expected outcomes; extras are appended. Repeated phrases keep their first role.
ExperimentModel derive_experiment(const scenario::TestScenario& s, const std::vector<Action>& extras = {});

enum class MatchMethod { Exact, Alias, Fuzzy };
std::string_view to_string(MatchMethod m);

struct SignalMapping {
  std::string phrase;
  std::string path;
  double score = 0.0;
  MatchMethod method = MatchMethod::Exact;
  ActionRole role = ActionRole::Telemetry;
  friend bool operator==(const SignalMapping&, const SignalMapping&) = default;
};

using AliasTable = std::map<std::string, std::string, std::less<>>;
AliasTable parse_aliases(std::string_view text);

inline constexpr double kDefaultMatchThreshold = 0.5;

SignalMapping map_phrase(std::string_view phrase, ActionRole role, const VssCatalog& catalog,
                         const AliasTable& aliases, double threshold = kDefaultMatchThreshold);
std::vector<SignalMapping> map_signals(const ExperimentModel& exp, const VssCatalog& catalog,
                                       const AliasTable& aliases, double threshold = kDefaultMatchThreshold);
std::string format_mappings(const std::vector<SignalMapping>& mappings);

struct ControlRule {
  std::string when_path;
  scenario::Comparator comparator = scenario::Comparator::Lt;
  double threshold = 0.0;
  std::string then_path;
  double value = 0.0;
  bool edge_triggered = true;
  friend bool operator==(const ControlRule&, const ControlRule&) = default;
};

// Lines: `when <path> <cmp> <threshold> then <path> = <value>`.
std::vector<ControlRule> parse_rules(std::string_view text);
std::string format_rule(const ControlRule& rule);
// Paths present, condition signal numeric, value inside the declared range and type.
void check_rules(const std::vector<ControlRule>& rules, const VssCatalog& catalog);

std::string_view default_control_template();
std::string emit_control_code(const ExperimentModel& exp, const std::vector<SignalMapping>& mappings,
                              const std::vector<ControlRule>& rules, std::string_view tmpl);

struct Event {
  double time = 0.0;
  std::string path;
  double value = 0.0;
  friend bool operator==(const Event&, const Event&) = default;
};
using Command = Event;
using CommandTrace = std::vector<Command>;

// Lines: `time;path;value`; booleans may be written true/false.
std::vector<Event> parse_events(std::string_view text);
std::string format_trace(const CommandTrace& trace);

CommandTrace simulate_bridge(const std::vector<ControlRule>& rules, const std::vector<Event>& events);

}  // namespace regpipe::vehiclecode

namespace regpipe {
template <>
std::string_view error_kind_name(vehiclecode::VehicleErrc kind) noexcept;
}  // namespace regpipe
