#include "regpipe/vehiclecode.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "regpipe/smartchunk.hpp"
#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(vehiclecode::VehicleErrc kind) noexcept {
  using vehiclecode::VehicleErrc;
  switch (kind) {
    case VehicleErrc::SyntaxError: return "SyntaxError";
    case VehicleErrc::DuplicatePath: return "DuplicatePath";
    case VehicleErrc::BadRange: return "BadRange";
    case VehicleErrc::NoMatch: return "NoMatch";
    case VehicleErrc::AmbiguousMapping: return "AmbiguousMapping";
    case VehicleErrc::UnresolvedPlaceholder: return "UnresolvedPlaceholder";
    case VehicleErrc::UnmappedSignalInRule: return "UnmappedSignalInRule";
    case VehicleErrc::InvalidRule: return "InvalidRule";
    case VehicleErrc::UnsortedEvents: return "UnsortedEvents";
  }
  return "VehicleError";
}

namespace vehiclecode {

using scenario::Comparator;

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::Boolean: return "boolean";
    case DataType::Int: return "int";
    case DataType::Float: return "float";
    case DataType::String: return "string";
  }
  return "float";
}

std::string_view to_string(ActionRole r) { return r == ActionRole::Actuation ? "actuation" : "telemetry"; }

std::string_view to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::Exact: return "exact";
    case MatchMethod::Alias: return "alias";
    case MatchMethod::Fuzzy: return "fuzzy";
  }
  return "exact";
}

const VssEntry* VssCatalog::find(std::string_view path) const {
  auto it = entries.find(path);
  return it == entries.end() ? nullptr : &it->second;
}

namespace {

[[noreturn]] void syntax(std::size_t line, const std::string& why) {
  throw VehicleError(VehicleErrc::SyntaxError, "line " + std::to_string(line) + ": " + why);
}

bool valid_path(std::string_view path) {
  if (path.empty()) return false;
  for (auto seg : text::split(path, '.')) {
    if (seg.empty()) return false;
    for (char c : seg) {
      if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == '=') return false;
    }
  }
  return true;
}

std::optional<DataType> data_type_from(std::string_view s) {
  if (s == "boolean") return DataType::Boolean;
  if (s == "int") return DataType::Int;
  if (s == "float") return DataType::Float;
  if (s == "string") return DataType::String;
  return std::nullopt;
}

std::optional<double> parse_value(std::string_view s) {
  if (s == "true") return 1.0;
  if (s == "false") return 0.0;
  return text::parse_real(s);
}

// Each non-comment line, paired with its 1-based number.
template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t n = 0;
  for (const std::string& raw : text::split_lines(text)) {
    ++n;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    f(n, line);
  }
}

std::set<std::string> token_set(std::string_view s) {
  auto toks = smartchunk::tokenize(s);
  return {toks.begin(), toks.end()};
}

std::string identifier(std::string_view path) {
  std::string out = "kSig_";
  for (char c : path) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

VssCatalog parse_vss_catalog(std::string_view text) {
  VssCatalog cat;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    auto fields = text::split(line, ';');
    for (auto& f : fields) f = text::trim(f);
    if (fields.size() != 2 && fields.size() != 3 && fields.size() != 5) {
      syntax(n, "expected path;datatype[;unit[;min;max]]");
    }
    if (!valid_path(fields[0])) syntax(n, "bad signal path '" + std::string(fields[0]) + "'");
    auto type = data_type_from(fields[1]);
    if (!type) syntax(n, "unknown datatype '" + std::string(fields[1]) + "'");
    VssEntry e;
    e.type = *type;
    if (fields.size() >= 3 && !fields[2].empty()) e.unit = std::string(fields[2]);
    if (fields.size() == 5) {
      const auto bound = [&](std::string_view s) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        auto v = text::parse_real(s);
        if (!v) syntax(n, "bad bound '" + std::string(s) + "'");
        return v;
      };
      e.min = bound(fields[3]);
      e.max = bound(fields[4]);
      if (e.min && e.max && *e.min > *e.max) {
        throw VehicleError(VehicleErrc::BadRange, std::string(fields[0]) + ": min " + text::format_real(*e.min) +
                                                      " > max " + text::format_real(*e.max));
      }
    }
    if (!cat.entries.emplace(std::string(fields[0]), std::move(e)).second) {
      throw VehicleError(VehicleErrc::DuplicatePath, std::string(fields[0]));
    }
  });
  return cat;
}

std::string format_catalog(const VssCatalog& catalog) {
  std::string out;
  for (const auto& [path, e] : catalog.entries) {
    out += path + ";" + std::string(to_string(e.type));
    if (e.unit || e.min || e.max) out += ";" + e.unit.value_or("");
    if (e.min || e.max) {
      out += ";" + (e.min ? text::format_real(*e.min) : "") + ";" + (e.max ? text::format_real(*e.max) : "");
    }
    out += "\n";
  }
  return out;
}

ExperimentModel derive_experiment(const scenario::TestScenario& s, const std::vector<Action>& extras) {
  ExperimentModel exp{s, {}};
  std::set<std::string> seen;
  const auto add = [&](std::string phrase, ActionRole role) {
    if (seen.insert(phrase).second) exp.actions.push_back({std::move(phrase), role});
  };
  for (const auto& a : s.post.assertions) add(a.signal, ActionRole::Telemetry);
  for (auto o : s.post.outcomes) {
    add(o == scenario::ExpectedOutcome::WarningIssued ? "warning" : "brake", ActionRole::Actuation);
  }
  for (const auto& a : extras) add(a.phrase, a.role);
  return exp;
}

AliasTable parse_aliases(std::string_view text) {
  AliasTable out;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    auto eq = line.find('=');
    if (eq == std::string_view::npos) syntax(n, "expected phrase=path");
    auto phrase = text::trim(line.substr(0, eq));
    auto path = text::trim(line.substr(eq + 1));
    if (phrase.empty() || !valid_path(path)) syntax(n, "expected phrase=path");
    if (!out.emplace(std::string(phrase), std::string(path)).second) {
      syntax(n, "duplicate alias '" + std::string(phrase) + "'");
    }
  });
  return out;
}

SignalMapping map_phrase(std::string_view phrase, ActionRole role, const VssCatalog& catalog,
                         const AliasTable& aliases, double threshold) {
  if (catalog.contains(phrase)) return {std::string(phrase), std::string(phrase), 1.0, MatchMethod::Exact, role};
  if (auto it = aliases.find(phrase); it != aliases.end()) {
    if (!catalog.contains(it->second)) {
      throw VehicleError(VehicleErrc::NoMatch,
                         "'" + std::string(phrase) + "': alias target " + it->second + " is not in the catalog");
    }
    return {std::string(phrase), it->second, 1.0, MatchMethod::Alias, role};
  }

  const auto wanted = token_set(phrase);
  double best = 0.0;
  std::vector<std::string> at_best;
  if (!wanted.empty()) {
    for (const auto& [path, entry] : catalog.entries) {
      std::set<std::string> have;
      for (auto seg : text::split(path, '.')) {
        auto t = token_set(seg);
        have.insert(t.begin(), t.end());
      }
      std::size_t common = 0;
      for (const auto& t : wanted) common += have.count(t);
      const double score = static_cast<double>(common) / static_cast<double>(wanted.size());
      if (score > best) {
        best = score;
        at_best.assign(1, path);
      } else if (score == best && score > 0) {
        at_best.push_back(path);
      }
    }
  }
  const auto listing = [&] {
    std::string s;
    for (const auto& p : at_best) s += (s.empty() ? "" : ", ") + p;
    return s.empty() ? std::string("none") : s;
  };
  if (at_best.empty() || best < threshold) {
    throw VehicleError(VehicleErrc::NoMatch, "'" + std::string(phrase) + "': best score " + text::format_real(best) +
                                                 " below " + text::format_real(threshold) + " (candidates: " +
                                                 listing() + ")");
  }
  if (at_best.size() > 1) {
    throw VehicleError(VehicleErrc::AmbiguousMapping, "'" + std::string(phrase) + "': tie at score " +
                                                          text::format_real(best) + " between " + listing());
  }
  return {std::string(phrase), at_best.front(), best, MatchMethod::Fuzzy, role};
}

std::vector<SignalMapping> map_signals(const ExperimentModel& exp, const VssCatalog& catalog,
                                       const AliasTable& aliases, double threshold) {
  if (catalog.entries.empty()) throw VehicleError(VehicleErrc::NoMatch, "signal catalog is empty");
  std::vector<SignalMapping> out;
  out.reserve(exp.actions.size());
  for (const auto& a : exp.actions) out.push_back(map_phrase(a.phrase, a.role, catalog, aliases, threshold));
  return out;
}

std::string format_mappings(const std::vector<SignalMapping>& mappings) {
  std::string out;
  for (const auto& m : mappings) {
    out += m.phrase + "\t" + m.path + "\t" + text::format_real(m.score) + "\t" + std::string(to_string(m.method)) +
           "\t" + std::string(to_string(m.role)) + "\n";
  }
  return out;
}

std::vector<ControlRule> parse_rules(std::string_view text) {
  std::vector<ControlRule> out;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    auto w = text::split_ws(line);
    if (w.size() != 8 || w[0] != "when" || w[4] != "then" || w[6] != "=") {
      syntax(n, "expected 'when <path> <cmp> <threshold> then <path> = <value>'");
    }
    ControlRule r;
    r.when_path = std::string(w[1]);
    r.then_path = std::string(w[5]);
    if (!valid_path(r.when_path) || !valid_path(r.then_path)) syntax(n, "bad signal path");
    auto cmp = scenario::comparator_from(w[2]);
    if (!cmp) syntax(n, "bad comparator '" + std::string(w[2]) + "'");
    r.comparator = *cmp;
    auto threshold = parse_value(w[3]);
    auto value = parse_value(w[7]);
    if (!threshold || !value) syntax(n, "bad number");
    r.threshold = *threshold;
    r.value = *value;
    out.push_back(std::move(r));
  });
  return out;
}

std::string format_rule(const ControlRule& r) {
  return "when " + r.when_path + " " + std::string(scenario::to_string(r.comparator)) + " " +
         text::format_real(r.threshold) + " then " + r.then_path + " = " + text::format_real(r.value);
}

void check_rules(const std::vector<ControlRule>& rules, const VssCatalog& catalog) {
  for (const auto& r : rules) {
    const auto bad = [&](const std::string& why) {
      throw VehicleError(VehicleErrc::InvalidRule, format_rule(r) + ": " + why);
    };
    const VssEntry* when = catalog.find(r.when_path);
    const VssEntry* then = catalog.find(r.then_path);
    if (when == nullptr) bad(r.when_path + " is not in the catalog");
    if (then == nullptr) bad(r.then_path + " is not in the catalog");
    if (when->type == DataType::String || then->type == DataType::String) bad("string signals are not supported");
    if (then->min && r.value < *then->min) bad("value below catalog minimum");
    if (then->max && r.value > *then->max) bad("value above catalog maximum");
    if (then->type == DataType::Int && r.value != std::trunc(r.value)) bad("value must be an integer");
    if (then->type == DataType::Boolean && r.value != 0.0 && r.value != 1.0) bad("value must be boolean");
  }
}

std::string_view default_control_template() {
  return R"(// Control logic for the target platform (generated).
#include "comapi.h"

namespace control {

{{signal_declarations}}

{{handlers}}

void setup(comapi::Client& api) {
  {{subscriptions}}
}

}  // namespace control
)";
}

std::string emit_control_code(const ExperimentModel& exp, const std::vector<SignalMapping>& mappings,
                              const std::vector<ControlRule>& rules, std::string_view tmpl) {
  std::map<std::string, const SignalMapping*> mapped;
  for (const auto& m : mappings) mapped.emplace(m.path, &m);
  for (const auto& r : rules) {
    for (const auto* path : {&r.when_path, &r.then_path}) {
      if (!mapped.count(*path)) {
        throw VehicleError(VehicleErrc::UnmappedSignalInRule, *path + " in rule '" + format_rule(r) + "'");
      }
    }
  }

  std::string decls = "// scenario " + exp.scenario.id;
  for (const auto& [path, m] : mapped) {
    decls += "\nstatic const comapi::Signal " + identifier(path) + "{\"" + path + "\"};  // " +
             std::string(to_string(m->role)) + ": " + m->phrase;
  }

  std::string handlers;
  std::vector<std::string> telemetry;
  std::map<std::string, std::vector<std::size_t>> by_path;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const std::string name = "rule_" + std::to_string(i + 1);
    if (by_path[r.when_path].empty()) telemetry.push_back(r.when_path);
    by_path[r.when_path].push_back(i);
    if (!handlers.empty()) handlers += "\n\n";
    handlers += "// " + format_rule(r) + "\n";
    handlers += "void " + name + "(comapi::Client& api, double value) {\n";
    handlers += "  static bool armed = true;\n";
    handlers += "  const bool hit = value " + std::string(r.comparator == Comparator::Eq ? "==" : scenario::to_string(r.comparator)) +
                " " + text::format_real(r.threshold) + ";\n";
    handlers += "  if (hit && armed) api.set(" + identifier(r.then_path) + ", " + text::format_real(r.value) + ");\n";
    handlers += "  armed = !hit;\n";
    handlers += "}";
  }
  if (handlers.empty()) handlers = "// no control rules";

  std::string subs;
  for (const auto& path : telemetry) {
    if (!subs.empty()) subs += "\n";
    subs += "api.subscribe(" + identifier(path) + ", [&api](double value) {";
    for (std::size_t i : by_path[path]) subs += " rule_" + std::to_string(i + 1) + "(api, value);";
    subs += " });";
  }

  std::map<std::string, std::string, std::less<>> b{
      {"signal_declarations", decls}, {"subscriptions", subs}, {"handlers", handlers}};
  try {
    return text::render_template(tmpl, b);
  } catch (const text::TemplateError& e) {
    throw VehicleError(VehicleErrc::UnresolvedPlaceholder, e.what());
  }
}

std::vector<Event> parse_events(std::string_view text) {
  std::vector<Event> out;
  for_each_line(text, [&](std::size_t n, std::string_view line) {
    auto f = text::split(line, ';');
    if (f.size() != 3) syntax(n, "expected time;path;value");
    auto t = text::parse_real(text::trim(f[0]));
    auto v = parse_value(text::trim(f[2]));
    auto path = text::trim(f[1]);
    if (!t || !v || !valid_path(path)) syntax(n, "expected time;path;value");
    out.push_back({*t, std::string(path), *v});
  });
  return out;
}

std::string format_trace(const CommandTrace& trace) {
  std::string out;
  for (const auto& c : trace) out += text::format_real(c.time) + ";" + c.path + ";" + text::format_real(c.value) + "\n";
  return out;
}

CommandTrace simulate_bridge(const std::vector<ControlRule>& rules, const std::vector<Event>& events) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time) {
      throw VehicleError(VehicleErrc::UnsortedEvents, "event " + std::to_string(i + 1) + " at t=" +
                                                          text::format_real(events[i].time) + " precedes t=" +
                                                          text::format_real(events[i - 1].time));
    }
  }
  // Condition last observed per rule; unknown counts as not holding.
  std::vector<char> holding(rules.size(), 0);
  CommandTrace trace;
  for (const Event& e : events) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const ControlRule& r = rules[i];
      if (r.when_path != e.path) continue;
      const bool now = scenario::compare(e.value, r.comparator, r.threshold);
      if (now && !holding[i]) trace.push_back({e.time, r.then_path, r.value});
      holding[i] = now;
    }
  }
  return trace;
}

}  // namespace vehiclecode
}  // namespace regpipe
