#include "regpipe/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(scenario::ScenarioErrc kind) noexcept {
  using scenario::ScenarioErrc;
  switch (kind) {
    case ScenarioErrc::SyntaxError: return "SyntaxError";
    case ScenarioErrc::UnknownKey: return "UnknownKey";
    case ScenarioErrc::RangeError: return "RangeError";
    case ScenarioErrc::UnresolvedPlaceholder: return "UnresolvedPlaceholder";
    case ScenarioErrc::InvalidScenario: return "InvalidScenario";
  }
  return "ScenarioError";
}

namespace scenario {

using regdoc::ClauseId;

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
    case Comparator::Eq: return "=";
  }
  return "=";
}

std::optional<Comparator> comparator_from(std::string_view s) {
  if (s == "<") return Comparator::Lt;
  if (s == "<=") return Comparator::Le;
  if (s == ">") return Comparator::Gt;
  if (s == ">=") return Comparator::Ge;
  if (s == "=") return Comparator::Eq;
  return std::nullopt;
}

bool compare(double lhs, Comparator c, double rhs) {
  switch (c) {
    case Comparator::Lt: return lhs < rhs;
    case Comparator::Le: return lhs <= rhs;
    case Comparator::Gt: return lhs > rhs;
    case Comparator::Ge: return lhs >= rhs;
    case Comparator::Eq: return lhs == rhs;
  }
  return false;
}

std::string_view to_string(Window w) {
  switch (w) {
    case Window::Always: return "always";
    case Window::Eventually: return "eventually";
    case Window::AtEnd: return "at_end";
  }
  return "always";
}

std::string_view to_string(ExpectedOutcome o) {
  switch (o) {
    case ExpectedOutcome::CollisionAvoided: return "collision_avoided";
    case ExpectedOutcome::WarningIssued: return "warning_issued";
    case ExpectedOutcome::Stopped: return "stopped";
  }
  return "collision_avoided";
}

std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::EmptyId: return "EmptyId";
    case FindingKind::MalformedValue: return "MalformedValue";
    case FindingKind::NoSensors: return "NoSensors";
    case FindingKind::NonFinitePosition: return "NonFinitePosition";
    case FindingKind::NegativeSpeed: return "NegativeSpeed";
    case FindingKind::HeadingOutOfRange: return "HeadingOutOfRange";
    case FindingKind::DuplicateAgent: return "DuplicateAgent";
    case FindingKind::WeatherOutOfRange: return "WeatherOutOfRange";
    case FindingKind::EmptyPostConditions: return "EmptyPostConditions";
    case FindingKind::NonFiniteThreshold: return "NonFiniteThreshold";
    case FindingKind::UnknownClause: return "UnknownClause";
    case FindingKind::SectionConflict: return "SectionConflict";
  }
  return "Finding";
}

std::string_view to_string(Section s) {
  switch (s) {
    case Section::Vehicle: return "vehicle";
    case Section::Pre: return "pre";
    case Section::Post: return "post";
  }
  return "vehicle";
}

namespace {

const std::set<std::string, std::less<>> kPercentWeather = {
    "cloudiness", "fog_density", "precipitation", "precipitation_deposits", "wetness", "wind_intensity"};

std::optional<SensorKind> sensor_kind_from(std::string_view s) {
  if (s == "radar") return SensorKind::Radar;
  if (s == "camera") return SensorKind::Camera;
  if (s == "lidar") return SensorKind::Lidar;
  return std::nullopt;
}

std::string_view to_string(SensorKind k) {
  switch (k) {
    case SensorKind::Radar: return "radar";
    case SensorKind::Camera: return "camera";
    case SensorKind::Lidar: return "lidar";
  }
  return "radar";
}

std::optional<Window> window_from(std::string_view s) {
  if (s == "always") return Window::Always;
  if (s == "eventually") return Window::Eventually;
  if (s == "at_end") return Window::AtEnd;
  return std::nullopt;
}

std::optional<ExpectedOutcome> outcome_from(std::string_view s) {
  if (s == "collision_avoided") return ExpectedOutcome::CollisionAvoided;
  if (s == "warning_issued") return ExpectedOutcome::WarningIssued;
  if (s == "stopped") return ExpectedOutcome::Stopped;
  return std::nullopt;
}

std::optional<Section> section_of(std::string_view keyword) {
  if (keyword == "vehicle" || keyword == "sensor") return Section::Vehicle;
  if (keyword == "pre" || keyword == "agent" || keyword == "weather") return Section::Pre;
  if (keyword == "post") return Section::Post;
  return std::nullopt;
}

// Intermediate form: every part optional, so sections parse on their own.
struct Draft {
  std::optional<std::string> id;
  std::vector<ClauseId> sources;
  std::optional<std::string> model;
  std::vector<Sensor> sensors;
  bool pre_seen = false;
  std::optional<std::string> map;
  std::optional<Vec3> ego_pos;
  std::optional<double> ego_speed;
  std::vector<Agent> agents;
  std::map<std::string, double> weather;
  std::vector<TelemetryAssertion> assertions;
  std::set<ExpectedOutcome> outcomes;
  bool post_seen = false;
};

struct LineError {
  ScenarioErrc kind;
  std::string message;
};

class DraftParser {
 public:
  // With `only` set, keywords of other sections are recorded as conflicts
  // (when `conflicts` is non-null) or rejected.
  DraftParser(std::optional<Section> only, std::vector<Finding>* conflicts) : only_(only), conflicts_(conflicts) {}

  Draft parse(std::string_view text) {
    for (const std::string& raw : text::split_lines(text)) {
      ++lineno_;
      auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto words = text::split_ws(line);
      const std::string_view kw = words[0];
      auto section = section_of(kw);
      if (only_ && section && *section != *only_) {
        if (conflicts_ != nullptr) {
          conflicts_->push_back({FindingKind::SectionConflict, std::string(kw),
                                 "'" + std::string(kw) + "' line in the " + std::string(to_string(*only_)) +
                                     " section was ignored"});
          continue;
        }
        fail(ScenarioErrc::SyntaxError, "'" + std::string(kw) + "' is not allowed in the " +
                                            std::string(to_string(*only_)) + " section");
      }
      std::vector<std::string_view> args(words.begin() + 1, words.end());
      if (kw == "scenario") scenario_line(args);
      else if (kw == "source") source_line(args);
      else if (kw == "vehicle") vehicle_line(args);
      else if (kw == "sensor") sensor_line(args);
      else if (kw == "pre") pre_line(args);
      else if (kw == "agent") agent_line(args);
      else if (kw == "weather") weather_line(args);
      else if (kw == "post") post_line(args);
      else fail(ScenarioErrc::UnknownKey, "unknown line keyword '" + std::string(kw) + "'");
    }
    return std::move(d_);
  }

 private:
  [[noreturn]] void fail(ScenarioErrc kind, const std::string& why) const {
    throw ScenarioError(kind, "line " + std::to_string(lineno_) + ": " + why);
  }

  double number(std::string_view s, std::string_view what) const {
    auto v = text::parse_real(s);
    if (!v) fail(ScenarioErrc::SyntaxError, "bad number '" + std::string(s) + "' for " + std::string(what));
    return *v;
  }

  Vec3 vec3(std::string_view s, std::string_view what) const {
    auto parts = text::split(s, ',');
    if (parts.size() != 3) fail(ScenarioErrc::SyntaxError, std::string(what) + " needs x,y,z");
    return {number(parts[0], what), number(parts[1], what), number(parts[2], what)};
  }

  std::vector<std::pair<std::string_view, std::string_view>> pairs(const std::vector<std::string_view>& args,
                                                                   std::size_t from) const {
    std::vector<std::pair<std::string_view, std::string_view>> out;
    std::set<std::string_view> seen;
    for (std::size_t i = from; i < args.size(); ++i) {
      auto eq = args[i].find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 == args[i].size()) {
        fail(ScenarioErrc::SyntaxError, "expected key=value, got '" + std::string(args[i]) + "'");
      }
      auto key = args[i].substr(0, eq);
      if (!seen.insert(key).second) fail(ScenarioErrc::SyntaxError, "duplicate key '" + std::string(key) + "'");
      out.emplace_back(key, args[i].substr(eq + 1));
    }
    return out;
  }

  void scenario_line(const std::vector<std::string_view>& args) {
    if (args.size() != 1) fail(ScenarioErrc::SyntaxError, "expected 'scenario <id>'");
    if (d_.id) fail(ScenarioErrc::SyntaxError, "duplicate scenario line");
    d_.id = std::string(args[0]);
  }

  void source_line(const std::vector<std::string_view>& args) {
    if (args.empty()) fail(ScenarioErrc::SyntaxError, "expected 'source <clause>...'");
    for (auto a : args) {
      auto id = ClauseId::try_parse(a);
      if (!id) fail(ScenarioErrc::SyntaxError, "bad clause id '" + std::string(a) + "'");
      d_.sources.push_back(*id);
    }
  }

  void vehicle_line(const std::vector<std::string_view>& args) {
    if (d_.model) fail(ScenarioErrc::SyntaxError, "duplicate vehicle line");
    for (auto [k, v] : pairs(args, 0)) {
      if (k == "model") d_.model = std::string(v);
      else fail(ScenarioErrc::UnknownKey, "vehicle key '" + std::string(k) + "'");
    }
    if (!d_.model) fail(ScenarioErrc::SyntaxError, "vehicle needs model=");
  }

  void sensor_line(const std::vector<std::string_view>& args) {
    if (args.empty()) fail(ScenarioErrc::SyntaxError, "expected 'sensor <kind> pos=x,y,z ...'");
    auto kind = sensor_kind_from(args[0]);
    if (!kind) fail(ScenarioErrc::RangeError, "sensor kind must be radar, camera or lidar");
    Sensor s{*kind, {}, {}};
    bool have_pos = false;
    for (auto [k, v] : pairs(args, 1)) {
      if (k == "pos") {
        s.mount = vec3(v, "pos");
        have_pos = true;
      } else {
        s.params.emplace(k, v);
      }
    }
    if (!have_pos) fail(ScenarioErrc::SyntaxError, "sensor needs pos=");
    d_.sensors.push_back(std::move(s));
  }

  void pre_line(const std::vector<std::string_view>& args) {
    d_.pre_seen = true;
    for (auto [k, v] : pairs(args, 0)) {
      if (k == "map") {
        if (d_.map) fail(ScenarioErrc::SyntaxError, "duplicate map");
        d_.map = std::string(v);
      } else if (k == "ego_pos") {
        if (d_.ego_pos) fail(ScenarioErrc::SyntaxError, "duplicate ego_pos");
        d_.ego_pos = vec3(v, "ego_pos");
      } else if (k == "ego_speed") {
        if (d_.ego_speed) fail(ScenarioErrc::SyntaxError, "duplicate ego_speed");
        d_.ego_speed = number(v, "ego_speed");
      } else {
        fail(ScenarioErrc::UnknownKey, "pre key '" + std::string(k) + "'");
      }
    }
  }

  void agent_line(const std::vector<std::string_view>& args) {
    if (args.empty()) fail(ScenarioErrc::SyntaxError, "expected 'agent <kind> pos=x,y,z ...'");
    Agent a;
    a.kind = std::string(args[0]);
    bool have_pos = false;
    for (auto [k, v] : pairs(args, 1)) {
      if (k == "id") a.id = std::string(v);
      else if (k == "pos") a.position = vec3(v, "pos"), have_pos = true;
      else if (k == "speed") a.speed = number(v, "speed");
      else if (k == "heading") a.heading = number(v, "heading");
      else fail(ScenarioErrc::UnknownKey, "agent key '" + std::string(k) + "'");
    }
    if (!have_pos) fail(ScenarioErrc::SyntaxError, "agent needs pos=");
    if (a.id.empty()) a.id = a.kind + std::to_string(d_.agents.size() + 1);
    d_.agents.push_back(std::move(a));
  }

  void weather_line(const std::vector<std::string_view>& args) {
    for (auto [k, v] : pairs(args, 0)) {
      if (!d_.weather.emplace(std::string(k), number(v, k)).second) {
        fail(ScenarioErrc::SyntaxError, "duplicate weather key '" + std::string(k) + "'");
      }
    }
  }

  void post_line(const std::vector<std::string_view>& args) {
    d_.post_seen = true;
    if (!args.empty() && args[0] == "assert") {
      if (args.size() != 5) fail(ScenarioErrc::SyntaxError, "expected 'post assert <signal> <cmp> <value> <window>'");
      auto cmp = comparator_from(args[2]);
      if (!cmp) fail(ScenarioErrc::RangeError, "comparator must be one of < <= > >= =");
      auto window = window_from(args[4]);
      if (!window) fail(ScenarioErrc::RangeError, "window must be always, eventually or at_end");
      d_.assertions.push_back({std::string(args[1]), *cmp, number(args[3], "threshold"), *window});
      return;
    }
    if (!args.empty() && args[0] == "outcome") {
      if (args.size() != 2) fail(ScenarioErrc::SyntaxError, "expected 'post outcome <outcome>'");
      auto o = outcome_from(args[1]);
      if (!o) fail(ScenarioErrc::RangeError, "outcome must be collision_avoided, warning_issued or stopped");
      if (!d_.outcomes.insert(*o).second) fail(ScenarioErrc::SyntaxError, "duplicate outcome");
      return;
    }
    fail(ScenarioErrc::UnknownKey, "post line must be 'assert' or 'outcome'");
  }

  std::optional<Section> only_;
  std::vector<Finding>* conflicts_;
  std::size_t lineno_ = 0;
  Draft d_;
};

TestScenario assemble(Draft&& d) {
  const auto missing = [](const std::string& what) {
    throw ScenarioError(ScenarioErrc::SyntaxError, "missing " + what);
  };
  if (!d.id) missing("'scenario <id>' line");
  if (!d.model) missing("'vehicle' line");
  if (!d.pre_seen) missing("'pre' line");
  if (!d.map) missing("pre map=");
  if (!d.ego_pos) missing("pre ego_pos=");
  if (!d.ego_speed) missing("pre ego_speed=");
  TestScenario s;
  s.id = std::move(*d.id);
  s.source_clauses = std::move(d.sources);
  s.vehicle = {std::move(*d.model), std::move(d.sensors)};
  s.pre = {std::move(*d.map), *d.ego_pos, *d.ego_speed, std::move(d.agents), std::move(d.weather)};
  s.post = {std::move(d.assertions), std::move(d.outcomes)};
  return s;
}

std::string vec3_str(const Vec3& v) {
  return text::format_real(v.x) + "," + text::format_real(v.y) + "," + text::format_real(v.z);
}

std::string header_lines(const std::string& id, const std::vector<ClauseId>& sources) {
  std::string out = "scenario " + id + "\n";
  if (!sources.empty()) {
    out += "source";
    for (const auto& c : sources) out += " " + c.str();
    out += "\n";
  }
  return out;
}

std::string vehicle_lines(const VehicleDefinition& v) {
  std::string out = "vehicle model=" + v.model + "\n";
  for (const Sensor& s : v.sensors) {
    out += "sensor " + std::string(to_string(s.kind)) + " pos=" + vec3_str(s.mount);
    for (const auto& [k, val] : s.params) out += " " + k + "=" + val;
    out += "\n";
  }
  return out;
}

std::string pre_lines(const PreConditions& p) {
  std::string out = "pre map=" + p.map_name + " ego_pos=" + vec3_str(p.ego_position) +
                    " ego_speed=" + text::format_real(p.ego_speed) + "\n";
  for (const Agent& a : p.agents) {
    out += "agent " + a.kind + " id=" + a.id + " pos=" + vec3_str(a.position) + " speed=" + text::format_real(a.speed) +
           " heading=" + text::format_real(a.heading) + "\n";
  }
  if (!p.weather.empty()) {
    out += "weather";
    for (const auto& [k, v] : p.weather) out += " " + k + "=" + text::format_real(v);
    out += "\n";
  }
  return out;
}

std::string post_lines(const PostConditions& p) {
  std::string out;
  for (const auto& a : p.assertions) {
    out += "post assert " + a.signal + " " + std::string(to_string(a.comparator)) + " " +
           text::format_real(a.threshold) + " " + std::string(to_string(a.window)) + "\n";
  }
  for (ExpectedOutcome o : p.outcomes) out += "post outcome " + std::string(to_string(o)) + "\n";
  return out;
}

bool malformed_token(std::string_view s) {
  if (s.empty()) return true;
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '=' || c == '#' || c == ',';
  });
}

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

}  // namespace

TestScenario parse_scenario(std::string_view text) {
  TestScenario s = assemble(DraftParser(std::nullopt, nullptr).parse(text));
  auto findings = validate_scenario(s);
  if (!findings.empty()) {
    throw ScenarioError(ScenarioErrc::RangeError, format_findings(findings));
  }
  return s;
}

std::vector<Finding> validate_scenario(const TestScenario& s, const regdoc::RegDocument* doc) {
  std::vector<Finding> out;
  const auto add = [&](FindingKind k, std::string subject, std::string msg) {
    out.push_back({k, std::move(subject), std::move(msg)});
  };
  const auto token = [&](std::string_view value, const std::string& subject) {
    if (malformed_token(value)) add(FindingKind::MalformedValue, subject, "'" + std::string(value) + "' is not a single token");
  };

  if (s.id.empty()) add(FindingKind::EmptyId, "scenario", "scenario id is empty");
  else token(s.id, "scenario");

  token(s.vehicle.model, "vehicle.model");
  if (s.vehicle.sensors.empty()) add(FindingKind::NoSensors, "vehicle", "ADAS scenario needs at least one sensor");
  for (std::size_t i = 0; i < s.vehicle.sensors.size(); ++i) {
    const Sensor& sensor = s.vehicle.sensors[i];
    const std::string subject = "sensor[" + std::to_string(i + 1) + "]";
    if (!finite(sensor.mount)) add(FindingKind::NonFinitePosition, subject, "mount position is not finite");
    for (const auto& [k, v] : sensor.params) {
      token(k, subject + "." + k);
      token(v, subject + "." + k);
      if (k == "pos") add(FindingKind::MalformedValue, subject, "'pos' is reserved");
    }
  }

  token(s.pre.map_name, "pre.map");
  if (!finite(s.pre.ego_position)) add(FindingKind::NonFinitePosition, "ego", "ego position is not finite");
  if (!(s.pre.ego_speed >= 0) || !std::isfinite(s.pre.ego_speed)) {
    add(FindingKind::NegativeSpeed, "ego", "ego speed must be a finite value >= 0 km/h");
  }
  std::set<std::string> agent_ids;
  for (const Agent& a : s.pre.agents) {
    const std::string subject = "agent " + a.id;
    token(a.id, subject + ".id");
    token(a.kind, subject + ".kind");
    if (!agent_ids.insert(a.id).second) add(FindingKind::DuplicateAgent, subject, "agent id '" + a.id + "' repeated");
    if (!finite(a.position)) add(FindingKind::NonFinitePosition, subject, "position is not finite");
    if (!(a.speed >= 0) || !std::isfinite(a.speed)) add(FindingKind::NegativeSpeed, subject, "speed must be >= 0 km/h");
    if (!(a.heading >= 0 && a.heading < 360)) add(FindingKind::HeadingOutOfRange, subject, "heading must be in [0, 360)");
  }
  for (const auto& [k, v] : s.pre.weather) {
    token(k, "weather." + k);
    if (!std::isfinite(v) || (kPercentWeather.count(k) && (v < 0 || v > 100))) {
      add(FindingKind::WeatherOutOfRange, "weather." + k, "value " + text::format_real(v) + " out of range");
    }
  }

  if (s.post.assertions.empty() && s.post.outcomes.empty()) {
    add(FindingKind::EmptyPostConditions, "post", "no telemetry assertion or expected outcome");
  }
  for (std::size_t i = 0; i < s.post.assertions.size(); ++i) {
    const auto& a = s.post.assertions[i];
    const std::string subject = "assert[" + std::to_string(i + 1) + "]";
    token(a.signal, subject + ".signal");
    if (!std::isfinite(a.threshold)) add(FindingKind::NonFiniteThreshold, subject, "threshold is not finite");
  }

  if (doc != nullptr) {
    for (const auto& c : s.source_clauses) {
      if (!doc->contains(c)) add(FindingKind::UnknownClause, c.str(), "clause " + c.str() + " is not in the regulation");
    }
  }
  return out;
}

std::string format_findings(const std::vector<Finding>& findings) {
  std::string out;
  for (const auto& f : findings) {
    out += std::string(to_string(f.kind)) + "\t" + f.subject + "\t" + f.message + "\n";
  }
  return out;
}

std::string emit_sim_config(const TestScenario& s) {
  return header_lines(s.id, s.source_clauses) + vehicle_lines(s.vehicle) + pre_lines(s.pre) + post_lines(s.post);
}

const std::vector<std::string>& sim_placeholders() {
  static const std::vector<std::string> kNames = {"scenario_id", "map", "vehicle_model", "ego_spawn", "ego_speed",
                                                  "sensors", "agents", "weather", "assertions"};
  return kNames;
}

std::string_view default_sim_template() {
  return R"(#!/usr/bin/env python3
# CARLA scenario {{scenario_id}} (generated)
import carla

from scenario_runtime import OutcomeCheck, TelemetryCheck, attach_sensor, run_checks, spawn_agent


def main():
    client = carla.Client("localhost", 2000)
    client.set_timeout(10.0)
    world = client.load_world("{{map}}")
    world.set_weather({{weather}})

    blueprint = world.get_blueprint_library().filter("{{vehicle_model}}")[0]
    ego = world.spawn_actor(blueprint, {{ego_spawn}})
    ego_speed_kmh = {{ego_speed}}
    {{sensors}}

    agents = []
    {{agents}}

    checks = []
    {{assertions}}
    return run_checks(world, ego, ego_speed_kmh, agents, checks)


if __name__ == "__main__":
    main()
)";
}

namespace {

std::string location(const Vec3& v) {
  return "carla.Location(x=" + text::format_real(v.x) + ", y=" + text::format_real(v.y) +
         ", z=" + text::format_real(v.z) + ")";
}

std::string_view blueprint(SensorKind k) {
  switch (k) {
    case SensorKind::Radar: return "sensor.other.radar";
    case SensorKind::Camera: return "sensor.camera.rgb";
    case SensorKind::Lidar: return "sensor.lidar.ray_cast";
  }
  return "sensor.other.radar";
}

std::string py_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string emit_sim_script(const TestScenario& s, std::string_view tmpl) {
  auto findings = validate_scenario(s);
  if (!findings.empty()) throw ScenarioError(ScenarioErrc::InvalidScenario, format_findings(findings));

  std::map<std::string, std::string, std::less<>> b;
  b["scenario_id"] = s.id;
  b["map"] = s.pre.map_name;
  b["vehicle_model"] = s.vehicle.model;
  b["ego_spawn"] = "carla.Transform(" + location(s.pre.ego_position) + ")";
  b["ego_speed"] = text::format_real(s.pre.ego_speed);

  std::string sensors;
  for (std::size_t i = 0; i < s.vehicle.sensors.size(); ++i) {
    const Sensor& sensor = s.vehicle.sensors[i];
    std::string params = "{";
    bool first = true;
    for (const auto& [k, v] : sensor.params) {
      params += (first ? "" : ", ") + py_string(k) + ": " + py_string(v);
      first = false;
    }
    params += "}";
    if (!sensors.empty()) sensors += "\n";
    sensors += "attach_sensor(world, ego, " + py_string(blueprint(sensor.kind)) + ", " + location(sensor.mount) + ", " +
               params + ")  # sensor:" + std::to_string(i + 1) + ":" + std::string(to_string(sensor.kind));
  }
  b["sensors"] = sensors;

  std::string agents;
  for (const Agent& a : s.pre.agents) {
    if (!agents.empty()) agents += "\n";
    agents += "agents.append(spawn_agent(world, " + py_string(a.kind) + ", " + location(a.position) +
              ", speed_kmh=" + text::format_real(a.speed) + ", heading_deg=" + text::format_real(a.heading) +
              "))  # agent:" + a.id;
  }
  b["agents"] = agents.empty() ? "# no agents" : agents;

  std::string weather = "carla.WeatherParameters(";
  bool first = true;
  for (const auto& [k, v] : s.pre.weather) {
    weather += (first ? "" : ", ") + k + "=" + text::format_real(v);
    first = false;
  }
  b["weather"] = weather + ")";

  std::string checks;
  for (std::size_t i = 0; i < s.post.assertions.size(); ++i) {
    const auto& a = s.post.assertions[i];
    if (!checks.empty()) checks += "\n";
    checks += "checks.append(TelemetryCheck(" + py_string(a.signal) + ", " + py_string(to_string(a.comparator)) + ", " +
              text::format_real(a.threshold) + ", " + py_string(to_string(a.window)) + "))  # assert:" +
              std::to_string(i + 1);
  }
  for (ExpectedOutcome o : s.post.outcomes) {
    if (!checks.empty()) checks += "\n";
    checks += "checks.append(OutcomeCheck(" + py_string(to_string(o)) + "))  # outcome:" + std::string(to_string(o));
  }
  b["assertions"] = checks;

  try {
    return text::render_template(tmpl, b);
  } catch (const text::TemplateError& e) {
    throw ScenarioError(ScenarioErrc::UnresolvedPlaceholder, e.what());
  }
}

std::string canonical_section(Section section, std::string_view text) {
  Draft d = DraftParser(section, nullptr).parse(text);
  std::string out;
  if (d.id) out += "scenario " + *d.id + "\n";
  if (!d.sources.empty()) {
    out += "source";
    for (const auto& c : d.sources) out += " " + c.str();
    out += "\n";
  }
  switch (section) {
    case Section::Vehicle:
      if (!d.model) throw ScenarioError(ScenarioErrc::SyntaxError, "vehicle section needs a 'vehicle' line");
      out += vehicle_lines({*d.model, d.sensors});
      break;
    case Section::Pre:
      if (!d.map || !d.ego_pos || !d.ego_speed) {
        throw ScenarioError(ScenarioErrc::SyntaxError, "pre section needs map=, ego_pos= and ego_speed=");
      }
      out += pre_lines({*d.map, *d.ego_pos, *d.ego_speed, d.agents, d.weather});
      break;
    case Section::Post:
      if (!d.post_seen) throw ScenarioError(ScenarioErrc::SyntaxError, "post section needs 'post' lines");
      out += post_lines({d.assertions, d.outcomes});
      break;
  }
  return out;
}

MergeResult merge_sections(std::string_view vehicle, std::string_view pre, std::string_view post) {
  MergeResult result;
  Draft v = DraftParser(Section::Vehicle, &result.findings).parse(vehicle);
  Draft p = DraftParser(Section::Pre, &result.findings).parse(pre);
  Draft q = DraftParser(Section::Post, &result.findings).parse(post);

  Draft merged;
  for (Draft* part : {&v, &p, &q}) {
    if (!part->id) continue;
    if (!merged.id) merged.id = part->id;
    else if (*merged.id != *part->id) {
      result.findings.push_back({FindingKind::SectionConflict, "scenario",
                                 "sections disagree on scenario id ('" + *merged.id + "' vs '" + *part->id + "')"});
    }
  }
  for (Draft* part : {&v, &p, &q}) {
    for (const auto& c : part->sources) {
      if (std::find(merged.sources.begin(), merged.sources.end(), c) == merged.sources.end()) {
        merged.sources.push_back(c);
      }
    }
  }
  merged.model = v.model;
  merged.sensors = std::move(v.sensors);
  merged.pre_seen = p.pre_seen;
  merged.map = p.map;
  merged.ego_pos = p.ego_pos;
  merged.ego_speed = p.ego_speed;
  merged.agents = std::move(p.agents);
  merged.weather = std::move(p.weather);
  merged.assertions = std::move(q.assertions);
  merged.outcomes = std::move(q.outcomes);
  merged.post_seen = q.post_seen;

  try {
    TestScenario s = assemble(std::move(merged));
    auto findings = validate_scenario(s);
    result.findings.insert(result.findings.end(), findings.begin(), findings.end());
    result.scenario = std::move(s);
  } catch (const ScenarioError& e) {
    result.findings.push_back({FindingKind::SectionConflict, "scenario", e.what()});
  }
  return result;
}

}  // namespace scenario
}  // namespace regpipe
