#include "regpipe/genconsensus.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "regpipe/ocl.hpp"
#include "regpipe/scenario.hpp"
#include "regpipe/text.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(gen::GenErrc kind) noexcept {
  switch (kind) {
    case gen::GenErrc::GenerationFailed: return "GenerationFailed";
    case gen::GenErrc::BadBackend: return "BadBackend";
    case gen::GenErrc::BadPolicy: return "BadPolicy";
  }
  return "GenError";
}

namespace gen {

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::Metamodel, "metamodel"},
    {Stage::Instance, "instance"},
    {Stage::Ocl, "ocl"},
    {Stage::ScenarioVehicle, "scenario_vehicle"},
    {Stage::ScenarioPre, "scenario_pre"},
    {Stage::ScenarioPost, "scenario_post"},
    {Stage::ControlCode, "control_code"},
};

const std::vector<std::string> kControlPlaceholders = {"handlers", "signal_declarations", "subscriptions"};

// Trailing blanks per line and trailing empty lines do not distinguish templates.
std::string normalize_lines(std::string_view text) {
  std::string out;
  for (const auto& line : text::split_lines(text)) {
    std::string_view l = line;
    while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.remove_suffix(1);
    out.append(l);
    out.push_back('\n');
  }
  while (out.size() >= 2 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') out.pop_back();
  return out;
}

std::string canonicalize(std::string_view text, Stage stage, const ValidationContext& ctx) {
  switch (stage) {
    case Stage::Metamodel:
      return mm::to_canonical(mm::load_metamodel(text));
    case Stage::Instance: {
      if (ctx.metamodel == nullptr) throw std::runtime_error("no metamodel available to check the instance");
      auto inst = mm::parse_instance(text);
      auto report = mm::check_conformance(inst, *ctx.metamodel);
      if (!report.conforms()) throw std::runtime_error("instance does not conform:\n" + mm::format_report(report));
      return mm::serialize_instance(inst);
    }
    case Stage::Ocl: {
      auto constraints = ocl::parse_ocl(text);
      if (constraints.empty()) throw std::runtime_error("no constraints");
      return ocl::to_string(constraints);
    }
    case Stage::ScenarioVehicle:
      return scenario::canonical_section(scenario::Section::Vehicle, text);
    case Stage::ScenarioPre:
      return scenario::canonical_section(scenario::Section::Pre, text);
    case Stage::ScenarioPost:
      return scenario::canonical_section(scenario::Section::Post, text);
    case Stage::ControlCode: {
      for (const auto& name : text::template_placeholders(text)) {
        bool known = false;
        for (const auto& k : kControlPlaceholders) known = known || k == name;
        if (!known) throw std::runtime_error("unknown placeholder {{" + name + "}}");
      }
      return normalize_lines(text);
    }
  }
  throw std::runtime_error("unknown stage");
}

std::string failure_message(const std::vector<Candidate>& candidates, const ConsensusPolicy& policy) {
  std::size_t valid = 0;
  for (const auto& c : candidates) valid += c.valid ? 1 : 0;
  std::string msg = std::to_string(valid) + " valid candidate(s) of " + std::to_string(candidates.size()) + ", " +
                    std::to_string(policy.min_valid) + " required";
  for (const auto& c : candidates) {
    if (!c.valid) msg += "\n  candidate " + std::to_string(c.index) + ": " + c.diagnostic;
  }
  return msg;
}

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "metamodel";
}

std::optional<Stage> stage_from(std::string_view name) {
  for (const auto& [stage, n] : kStageNames) {
    if (n == name) return stage;
  }
  return std::nullopt;
}

Candidate validate_candidate(Candidate c, Stage stage, const ValidationContext& ctx) {
  try {
    c.canonical = canonicalize(c.text, stage, ctx);
    c.valid = true;
    c.diagnostic.clear();
  } catch (const std::exception& e) {
    c.valid = false;
    c.canonical.reset();
    c.diagnostic = e.what();
  }
  return c;
}

Candidate select(const std::vector<Candidate>& candidates, const ConsensusPolicy& policy) {
  if (policy.n < 1 || policy.min_valid < 1) throw GenError(GenErrc::BadPolicy, "n and min_valid must be >= 1");
  struct Group {
    std::size_t count = 0;
    const Candidate* first = nullptr;
  };
  std::map<std::string_view, Group> groups;
  std::size_t valid = 0;
  for (const auto& c : candidates) {
    if (!c.valid || !c.canonical) continue;
    ++valid;
    Group& g = groups[*c.canonical];
    ++g.count;
    if (g.first == nullptr || c.index < g.first->index) g.first = &c;
  }
  if (valid < policy.min_valid) throw GenError(GenErrc::GenerationFailed, failure_message(candidates, policy));
  const Group* best = nullptr;
  for (const auto& [canon, g] : groups) {
    if (best == nullptr || g.count > best->count || (g.count == best->count && g.first->index < best->first->index)) {
      best = &g;
    }
  }
  return *best->first;
}

MockBackend::MockBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw GenError(GenErrc::BadBackend, "mock directory not found: " + dir_.string());
  }
}

std::vector<std::string> MockBackend::generate(const Prompt& prompt, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) {
    auto file = dir_ / (std::string(to_string(prompt.stage)) + "." + prompt.key + "." + std::to_string(i) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) continue;
    std::ostringstream buf;
    buf << in.rdbuf();
    out.push_back(std::move(buf).str());
  }
  return out;
}

std::unique_ptr<GeneratorBackend> make_backend(std::string_view selector) {
  constexpr std::string_view kMock = "mock:";
  if (selector.substr(0, kMock.size()) == kMock && selector.size() > kMock.size()) {
    return std::make_unique<MockBackend>(std::filesystem::path(std::string(selector.substr(kMock.size()))));
  }
  throw GenError(GenErrc::BadBackend, "unsupported backend '" + std::string(selector) + "' (expected mock:<dir>)");
}

ConsensusResult generate_with_consensus(GeneratorBackend& backend, const Prompt& prompt,
                                        const ConsensusPolicy& policy, const ValidationContext& ctx) {
  if (policy.n < 1 || policy.min_valid < 1) throw GenError(GenErrc::BadPolicy, "n and min_valid must be >= 1");
  auto texts = backend.generate(prompt, policy.n);
  ConsensusResult result;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    result.candidates.push_back(validate_candidate({i, std::move(texts[i]), false, std::nullopt, {}}, prompt.stage, ctx));
  }
  std::size_t valid = 0;
  for (const auto& c : result.candidates) valid += c.valid ? 1 : 0;
  if (valid < policy.min_valid) {
    throw GenError(GenErrc::GenerationFailed, std::string(to_string(prompt.stage)) + "." + prompt.key + ": " +
                                                  failure_message(result.candidates, policy));
  }
  result.chosen = select(result.candidates, policy);
  return result;
}

}  // namespace gen
}  // namespace regpipe
