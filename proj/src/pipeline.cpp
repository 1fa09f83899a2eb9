#include "regpipe/pipeline.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "regpipe/genconsensus.hpp"
#include "regpipe/mmcore.hpp"
#include "regpipe/ocl.hpp"
#include "regpipe/regdoc.hpp"
#include "regpipe/retrieve.hpp"
#include "regpipe/scenario.hpp"
#include "regpipe/smartchunk.hpp"
#include "regpipe/text.hpp"
#include "regpipe/vehiclecode.hpp"

namespace regpipe {

template <>
std::string_view error_kind_name(pipeline::PipelineErrc kind) noexcept {
  switch (kind) {
    case pipeline::PipelineErrc::ConfigError: return "ConfigError";
    case pipeline::PipelineErrc::MissingInput: return "MissingInput";
  }
  return "PipelineError";
}

namespace pipeline {

namespace fs = std::filesystem;

std::string_view to_string(StageStatus s) {
  switch (s) {
    case StageStatus::Ok: return "ok";
    case StageStatus::Failed: return "failed";
    case StageStatus::Skipped: return "skipped";
  }
  return "skipped";
}

std::vector<std::string> ConfigFile::values(std::string_view section, std::string_view key) const {
  std::vector<std::string> out;
  auto it = sections.find(std::string(section));
  if (it == sections.end()) return out;
  for (const auto& [k, v] : it->second) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::optional<std::string> ConfigFile::value(std::string_view section, std::string_view key) const {
  auto all = values(section, key);
  if (all.empty()) return std::nullopt;
  return all.back();
}

namespace {

[[noreturn]] void config_error(const std::string& why) { throw PipelineError(PipelineErrc::ConfigError, why); }

struct KeySpec {
  std::string_view section;
  std::string_view key;
  bool repeatable;
};

constexpr KeySpec kKeys[] = {
    {"pipeline", "workspace", false},   {"pipeline", "backend", false},
    {"inputs", "regulation", false},    {"inputs", "metamodel", false},
    {"inputs", "instance", false},      {"inputs", "constraints", false},
    {"inputs", "vss_catalog", false},   {"inputs", "aliases", false},
    {"inputs", "rules", false},         {"inputs", "events", false},
    {"inputs", "sim_template", false},  {"inputs", "control_template", false},
    {"chunking", "granularity", false}, {"chunking", "depth", false},
    {"chunking", "budget", false},      {"retrieval", "k", false},
    {"retrieval", "query", true},       {"retrieval", "w_bm25", false},
    {"retrieval", "w_ref", false},      {"retrieval", "w_num", false},
    {"generation", "n", false},         {"generation", "min_valid", false},
    {"generation", "scenario_key", false}, {"generation", "metamodel_key", false},
    {"generation", "instance_key", false}, {"generation", "constraints_key", false},
    {"mapping", "threshold", false},    {"mapping", "telemetry", true},
    {"mapping", "actuation", true},
};

const KeySpec* find_key(std::string_view section, std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.section == section && k.key == key) return &k;
  }
  return nullptr;
}

std::size_t count_value(const std::string& key, const std::string& v, std::size_t min) {
  auto n = text::parse_int(v);
  if (!n || *n < static_cast<long long>(min)) config_error(key + " must be an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(*n);
}

double real_value(const std::string& key, const std::string& v) {
  auto r = text::parse_real(v);
  if (!r) config_error(key + " must be a number");
  return *r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PipelineError(PipelineErrc::MissingInput, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_atomic(const fs::path& target, std::string_view content) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError(PipelineErrc::MissingInput, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw PipelineError(PipelineErrc::MissingInput, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

ConfigFile parse_config_text(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  std::size_t n = 0;
  for (const std::string& raw : text::split_lines(text)) {
    ++n;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(n) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) config_error(where + "bad section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      cfg.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error(where + "expected key = value");
    if (section.empty()) config_error(where + "key outside of a section");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    const KeySpec* spec = find_key(section, key);
    if (spec == nullptr) config_error(where + "unknown key [" + section + "] " + key);
    auto& entries = cfg.sections[section];
    if (!spec->repeatable) {
      for (const auto& e : entries) {
        if (e.first == key) config_error(where + "duplicate key " + key);
      }
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  for (const auto& [name, entries] : cfg.sections) {
    bool known = false;
    for (const auto& k : kKeys) known = known || k.section == name;
    if (!known) config_error("unknown section [" + name + "]");
  }
  return cfg;
}

PipelineConfig load_config(std::string_view text, const fs::path& base_dir) {
  const ConfigFile file = parse_config_text(text);
  PipelineConfig c;
  const auto path = [&](std::string_view section, std::string_view key) -> std::optional<fs::path> {
    auto v = file.value(section, key);
    if (!v) return std::nullopt;
    if (v->empty()) config_error(std::string(key) + " is empty");
    fs::path p(*v);
    return p.is_absolute() ? p : base_dir / p;
  };
  const auto required = [&](std::string_view section, std::string_view key) {
    auto p = path(section, key);
    if (!p) config_error("missing [" + std::string(section) + "] " + std::string(key));
    return *p;
  };

  c.workspace = path("pipeline", "workspace").value_or(base_dir / "workspace");
  if (auto b = file.value("pipeline", "backend")) {
    constexpr std::string_view kMock = "mock:";
    if (b->rfind(kMock, 0) == 0 && b->size() > kMock.size() && !fs::path(b->substr(kMock.size())).is_absolute()) {
      c.backend = std::string(kMock) + (base_dir / b->substr(kMock.size())).string();
    } else {
      c.backend = *b;
    }
  }

  c.regulation = required("inputs", "regulation");
  c.metamodel = path("inputs", "metamodel");
  c.instance = path("inputs", "instance");
  c.constraints = path("inputs", "constraints");
  c.vss_catalog = required("inputs", "vss_catalog");
  c.aliases = path("inputs", "aliases");
  c.rules = required("inputs", "rules");
  c.events = required("inputs", "events");
  c.sim_template = path("inputs", "sim_template");
  c.control_template = path("inputs", "control_template");

  if (auto v = file.value("chunking", "granularity")) c.granularity = count_value("granularity", *v, 0);
  if (auto v = file.value("chunking", "depth")) c.depth = count_value("depth", *v, 0);
  if (auto v = file.value("chunking", "budget")) c.budget = count_value("budget", *v, 1);
  if (auto v = file.value("retrieval", "k")) c.k = count_value("k", *v, 1);
  c.queries = file.values("retrieval", "query");
  if (auto v = file.value("retrieval", "w_bm25")) c.w_bm25 = real_value("w_bm25", *v);
  if (auto v = file.value("retrieval", "w_ref")) c.w_ref = real_value("w_ref", *v);
  if (auto v = file.value("retrieval", "w_num")) c.w_num = real_value("w_num", *v);
  if (auto v = file.value("generation", "n")) c.consensus_n = count_value("n", *v, 1);
  if (auto v = file.value("generation", "min_valid")) c.min_valid = count_value("min_valid", *v, 1);
  if (auto v = file.value("generation", "scenario_key")) c.scenario_key = *v;
  if (auto v = file.value("generation", "metamodel_key")) c.metamodel_key = *v;
  if (auto v = file.value("generation", "instance_key")) c.instance_key = *v;
  if (auto v = file.value("generation", "constraints_key")) c.constraints_key = *v;
  if (auto v = file.value("mapping", "threshold")) c.threshold = real_value("threshold", *v);
  c.extra_telemetry = file.values("mapping", "telemetry");
  c.extra_actuation = file.values("mapping", "actuation");
  return c;
}

PipelineConfig load_config_file(const fs::path& file) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) throw PipelineError(PipelineErrc::MissingInput, "config not found: " + file.string());
  return load_config(read_file(file), file.parent_path());
}

std::string_view config_reference() {
  return R"(Pipeline config: `[section]` headers, `key = value` lines, `#` comments.
Relative paths resolve against the config file's directory.

[pipeline]
  workspace = DIR          artifact directory (default: workspace)
  backend = mock:DIR       generator backend; --backend and REGPIPE_MOCK_DIR override
[inputs]
  regulation = FILE        regulation plain text (required)
  metamodel = FILE         PlantUML or canonical metamodel; generated when absent
  instance = FILE          XMI-subset instance; generated when absent
  constraints = FILE       OCL constraints; generated when absent and a backend is set
  vss_catalog = FILE       signal catalog (required)
  aliases = FILE           phrase=path lines
  rules = FILE             control rules (required)
  events = FILE            bridge event trace (required)
  sim_template = FILE      simulation script template (default: built-in CARLA template)
  control_template = FILE  control code template (default: built-in comAPI template)
[chunking]
  granularity = 1   depth = 2   budget = 512
[retrieval]
  k = 5   w_bm25 = 0.7   w_ref = 0.2   w_num = 0.1
  query = TEXT             repeatable
[generation]
  n = 5   min_valid = 1
  scenario_key = scenario  metamodel_key = metamodel  instance_key = instance  constraints_key = constraints
[mapping]
  threshold = 0.5
  telemetry = PHRASE       extra telemetry action, repeatable
  actuation = PHRASE       extra actuation action, repeatable

Exit codes: 0 all stages ok, 1 validation failure, 2 input error, 3 generation failure.
)";
}

namespace {

struct StageFailure {
  FailureKind kind;
  std::string message;
};

// Carries a stage's artifact even when the stage itself fails.
struct StageOutput {
  std::string content;
  std::optional<StageFailure> failure;
};

[[noreturn]] void fail(FailureKind kind, std::string message) { throw StageFailure{kind, std::move(message)}; }

template <class F>
auto as_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(FailureKind::Input, e.what());
  }
}

class Run {
 public:
  explicit Run(const PipelineConfig& cfg) : cfg_(cfg) {}

  RunReport execute() {
    RunReport report;
    if (!preflight(report)) return report;

    results_.resize(kArtifactNames.size());
    static constexpr std::array<std::string_view, 11> kNames = {
        "regdoc",      "chunk",     "retrieve",   "scenario_extract", "scenario_validate", "metamodel",
        "consistency", "sim_emit",  "signal_map", "control_code",     "bridge"};
    for (std::size_t i = 0; i < results_.size(); ++i) {
      results_[i].number = static_cast<int>(i + 1);
      results_[i].name = std::string(kNames[i]);
    }

    // Regulation and model branches share no data until stage 8.
    std::thread model_branch([this] {
      stage(6, {}, [this] { return metamodel(); });
      stage(7, {6}, [this] { return consistency(); });
    });
    stage(1, {}, [this] { return regdoc(); });
    stage(2, {1}, [this] { return chunk(); });
    stage(3, {2}, [this] { return retrieval(); });
    stage(4, {3}, [this] { return extract_scenario(); });
    stage(5, {1, 4}, [this] { return validate_scenario(); });
    model_branch.join();
    stage(8, {5, 7}, [this] { return sim_emit(); });
    stage(9, {8}, [this] { return signal_map(); });
    stage(10, {9}, [this] { return control_code(); });
    stage(11, {10}, [this] { return bridge(); });

    report.stages = results_;
    bool input = false, generation = false, validation = false;
    for (const auto& r : results_) {
      input = input || r.failure == FailureKind::Input;
      generation = generation || r.failure == FailureKind::Generation;
      validation = validation || r.failure == FailureKind::Validation;
    }
    report.exit_code = input ? 2 : generation ? 3 : validation ? 1 : 0;
    return report;
  }

 private:
  bool preflight(RunReport& report) {
    std::vector<fs::path> inputs = {cfg_.regulation, cfg_.vss_catalog, cfg_.rules, cfg_.events};
    for (const auto* opt : {&cfg_.metamodel, &cfg_.instance, &cfg_.constraints, &cfg_.aliases, &cfg_.sim_template,
                            &cfg_.control_template}) {
      if (*opt) inputs.push_back(**opt);
    }
    for (const auto& p : inputs) {
      std::error_code ec;
      if (!fs::is_regular_file(p, ec)) report.diagnostics.push_back("input not found: " + p.string());
    }
    std::string backend = cfg_.backend;
    if (backend.empty()) {
      report.diagnostics.push_back("no generator backend configured (use --backend mock:DIR)");
    } else {
      try {
        backend_ = gen::make_backend(backend);
      } catch (const Error& e) {
        report.diagnostics.push_back(e.what());
      }
    }
    std::error_code ec;
    fs::create_directories(cfg_.workspace, ec);
    if (ec || !fs::is_directory(cfg_.workspace)) {
      report.diagnostics.push_back("workspace not writable: " + cfg_.workspace.string());
    } else {
      for (auto name : kArtifactNames) {
        fs::remove(cfg_.workspace / name, ec);
        fs::remove(cfg_.workspace / (std::string(name) + ".tmp"), ec);
      }
    }
    if (!report.diagnostics.empty()) {
      report.exit_code = 2;
      return false;
    }
    return true;
  }

  void stage(int number, std::vector<int> deps, const std::function<StageOutput()>& body) {
    StageResult& r = results_[static_cast<std::size_t>(number - 1)];
    for (int d : deps) {
      if (results_[static_cast<std::size_t>(d - 1)].status != StageStatus::Ok) {
        r.status = StageStatus::Skipped;
        r.diagnostics.push_back("upstream stage " + std::to_string(d) + " did not complete");
        return;
      }
    }
    StageOutput out;
    try {
      out = body();
    } catch (const StageFailure& f) {
      out.failure = f;
    } catch (const gen::GenError& e) {
      out.failure = StageFailure{e.kind() == gen::GenErrc::GenerationFailed ? FailureKind::Generation
                                                                             : FailureKind::Input,
                                 e.what()};
    } catch (const PipelineError& e) {
      out.failure = StageFailure{FailureKind::Input, e.what()};
    } catch (const Error& e) {
      out.failure = StageFailure{FailureKind::Validation, e.what()};
    } catch (const std::exception& e) {
      out.failure = StageFailure{FailureKind::Input, e.what()};
    }
    if (!out.content.empty() || !out.failure) {
      const fs::path target = cfg_.workspace / kArtifactNames[static_cast<std::size_t>(number - 1)];
      try {
        write_atomic(target, out.content);
        r.artifacts.push_back(target);
      } catch (const std::exception& e) {
        if (!out.failure) out.failure = StageFailure{FailureKind::Input, e.what()};
      }
    }
    if (out.failure) {
      r.status = StageStatus::Failed;
      r.failure = out.failure->kind;
      r.diagnostics.push_back(out.failure->message);
    } else {
      r.status = StageStatus::Ok;
    }
  }

  gen::ConsensusResult generate(gen::Stage stage, const std::string& key, std::string prompt,
                                const gen::ValidationContext& ctx = {}) {
    gen::Prompt p{stage, key, std::move(prompt)};
    return gen::generate_with_consensus(*backend_, p, {cfg_.consensus_n, cfg_.min_valid}, ctx);
  }

  StageOutput regdoc() {
    const std::string text = as_input([&] { return read_file(cfg_.regulation); });
    doc_ = as_input([&] { return regdoc::parse_document(text); });
    graph_ = regdoc::build_reference_graph(doc_);
    return {regdoc::dump_clauses(doc_) + "\n" + regdoc::dump_references(graph_), {}};
  }

  StageOutput chunk() {
    auto base = smartchunk::base_chunks(doc_, cfg_.granularity);
    chunks_.clear();
    for (const auto& c : base) {
      chunks_.push_back(smartchunk::expand_chunk(c, graph_, doc_, cfg_.depth, {cfg_.budget}));
    }
    return {smartchunk::dump_chunks(chunks_), {}};
  }

  StageOutput retrieval() {
    auto index = retrieve::build_index(chunks_);
    auto lookup = retrieve::make_lookup(chunks_);
    std::string out;
    std::set<std::string> seen;
    excerpts_.clear();
    for (const auto& q : cfg_.queries) {
      auto hits = retrieve::retrieve(index, q, cfg_.k);
      hits = retrieve::rerank(std::move(hits), q, graph_, lookup, {cfg_.w_bm25, cfg_.w_ref, cfg_.w_num});
      out += "query " + q + "\n" + retrieve::format_results(hits) + "\n";
      for (const auto& h : hits) {
        if (seen.insert(h.id).second) excerpts_ += lookup.at(h.id)->text + "\n";
      }
    }
    if (cfg_.queries.empty()) out = "no queries configured\n";
    return {out, {}};
  }

  StageOutput extract_scenario() {
    const auto section = [&](gen::Stage st, std::string_view what) {
      std::string prompt = "Write the " + std::string(what) +
                           " section of a simulation test scenario for these regulation excerpts:\n" + excerpts_;
      return generate(st, cfg_.scenario_key, std::move(prompt)).chosen.canonical.value();
    };
    const std::string vehicle = section(gen::Stage::ScenarioVehicle, "vehicle definition");
    const std::string pre = section(gen::Stage::ScenarioPre, "pre-conditions");
    const std::string post = section(gen::Stage::ScenarioPost, "post-conditions");
    auto merged = scenario::merge_sections(vehicle, pre, post);
    for (const auto& f : merged.findings) {
      if (f.kind == scenario::FindingKind::SectionConflict) conflicts_.push_back(f);
    }
    if (!merged.scenario) {
      return {"", StageFailure{FailureKind::Validation, scenario::format_findings(merged.findings)}};
    }
    scenario_ = std::move(merged.scenario);
    return {scenario::emit_sim_config(*scenario_), {}};
  }

  StageOutput validate_scenario() {
    auto findings = conflicts_;
    auto more = scenario::validate_scenario(*scenario_, &doc_);
    findings.insert(findings.end(), more.begin(), more.end());
    std::string out = "scenario " + scenario_->id + ": " + std::to_string(findings.size()) + " finding(s)\n" +
                      scenario::format_findings(findings);
    if (findings.empty()) return {out, {}};
    return {out, StageFailure{FailureKind::Validation, "scenario has findings"}};
  }

  StageOutput metamodel() {
    if (cfg_.metamodel) {
      const std::string text = as_input([&] { return read_file(*cfg_.metamodel); });
      metamodel_ = as_input([&] { return mm::load_metamodel(text); });
    } else {
      auto r = generate(gen::Stage::Metamodel, cfg_.metamodel_key, "Write a PlantUML class diagram for the vehicle domain.");
      metamodel_ = mm::load_metamodel(r.chosen.text);
    }
    return {mm::to_canonical(*metamodel_), {}};
  }

  StageOutput consistency() {
    const gen::ValidationContext ctx{&*metamodel_};
    mm::ModelInstance inst;
    if (cfg_.instance) {
      const std::string text = as_input([&] { return read_file(*cfg_.instance); });
      inst = as_input([&] { return mm::parse_instance(text); });
    } else {
      auto r = generate(gen::Stage::Instance, cfg_.instance_key, "Write a model instance.\n" + mm::to_canonical(*metamodel_), ctx);
      inst = mm::parse_instance(r.chosen.text);
    }
    std::vector<ocl::Constraint> constraints;
    if (cfg_.constraints) {
      const std::string text = as_input([&] { return read_file(*cfg_.constraints); });
      constraints = as_input([&] { return ocl::parse_ocl(text); });
    } else {
      auto r = generate(gen::Stage::Ocl, cfg_.constraints_key, "Write OCL invariants.\n" + mm::to_canonical(*metamodel_), ctx);
      constraints = ocl::parse_ocl(r.chosen.text);
    }

    const auto conformance = mm::check_conformance(inst, *metamodel_);
    std::string out = "conformance: " + std::to_string(conformance.violations.size()) + " violation(s)\n" +
                      mm::format_report(conformance);
    bool ok = conformance.conforms();
    if (!constraints.empty()) {
      try {
        const auto checked = ocl::check_all(constraints, inst, *metamodel_);
        out += "constraints:\n" + ocl::format_report_text(checked);
        ok = ok && checked.all_pass();
      } catch (const Error& e) {
        out += "constraints: " + std::string(e.what()) + "\n";
        ok = false;
      }
    }
    if (ok) return {out, {}};
    return {out, StageFailure{FailureKind::Validation, "model instance is not consistent"}};
  }

  StageOutput sim_emit() {
    std::string tmpl = cfg_.sim_template ? as_input([&] { return read_file(*cfg_.sim_template); })
                                         : std::string(scenario::default_sim_template());
    return {scenario::emit_sim_script(*scenario_, tmpl), {}};
  }

  StageOutput signal_map() {
    catalog_ = as_input([&] { return vehiclecode::parse_vss_catalog(read_file(cfg_.vss_catalog)); });
    const auto aliases = cfg_.aliases ? as_input([&] { return vehiclecode::parse_aliases(read_file(*cfg_.aliases)); })
                                      : vehiclecode::AliasTable{};
    std::vector<vehiclecode::Action> extras;
    for (const auto& p : cfg_.extra_telemetry) extras.push_back({p, vehiclecode::ActionRole::Telemetry});
    for (const auto& p : cfg_.extra_actuation) extras.push_back({p, vehiclecode::ActionRole::Actuation});
    experiment_ = vehiclecode::derive_experiment(*scenario_, extras);
    mappings_ = vehiclecode::map_signals(*experiment_, catalog_, aliases, cfg_.threshold);
    return {vehiclecode::format_mappings(mappings_), {}};
  }

  StageOutput control_code() {
    rules_ = as_input([&] { return vehiclecode::parse_rules(read_file(cfg_.rules)); });
    vehiclecode::check_rules(rules_, catalog_);
    std::string tmpl = cfg_.control_template ? as_input([&] { return read_file(*cfg_.control_template); })
                                             : std::string(vehiclecode::default_control_template());
    return {vehiclecode::emit_control_code(*experiment_, mappings_, rules_, tmpl), {}};
  }

  StageOutput bridge() {
    auto events = as_input([&] { return vehiclecode::parse_events(read_file(cfg_.events)); });
    for (const auto& e : events) {
      if (!catalog_.contains(e.path)) fail(FailureKind::Input, "event signal not in catalog: " + e.path);
    }
    return {vehiclecode::format_trace(vehiclecode::simulate_bridge(rules_, events)), {}};
  }

  const PipelineConfig& cfg_;
  std::unique_ptr<gen::GeneratorBackend> backend_;
  std::vector<StageResult> results_;

  regdoc::RegDocument doc_;
  regdoc::RefGraph graph_;
  std::vector<smartchunk::Chunk> chunks_;
  std::string excerpts_;
  std::vector<scenario::Finding> conflicts_;
  std::optional<scenario::TestScenario> scenario_;
  std::optional<mm::MetaModel> metamodel_;
  vehiclecode::VssCatalog catalog_;
  std::optional<vehiclecode::ExperimentModel> experiment_;
  std::vector<vehiclecode::SignalMapping> mappings_;
  std::vector<vehiclecode::ControlRule> rules_;
};

}  // namespace

RunReport run_pipeline(const PipelineConfig& config) { return Run(config).execute(); }

std::string format_summary(const RunReport& report) {
  std::string out;
  for (const auto& d : report.diagnostics) out += "error: " + d + "\n";
  for (const auto& s : report.stages) {
    std::string num = (s.number < 10 ? "0" : "") + std::to_string(s.number);
    out += num + " " + s.name + " " + std::string(to_string(s.status));
    for (const auto& a : s.artifacts) out += " " + a.filename().string();
    out += "\n";
    for (const auto& d : s.diagnostics) {
      for (const auto& line : text::split_lines(d)) out += "    " + line + "\n";
    }
  }
  out += "exit " + std::to_string(report.exit_code) + "\n";
  return out;
}

}  // namespace pipeline
}  // namespace regpipe
