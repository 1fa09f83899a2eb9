#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "regpipe/genconsensus.hpp"
#include "regpipe/mmcore.hpp"
#include "regpipe/ocl.hpp"
#include "regpipe/pipeline.hpp"
#include "regpipe/regdoc.hpp"
#include "regpipe/retrieve.hpp"
#include "regpipe/scenario.hpp"
#include "regpipe/smartchunk.hpp"
#include "regpipe/text.hpp"
#include "regpipe/vehiclecode.hpp"

namespace {

using namespace regpipe;
using json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

struct Options {
  std::string format = "text";
  bool json() const { return format == "json"; }
};

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json()) std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

json clause_json(const regdoc::RegDocument& doc) {
  json arr = json::array();
  for (const auto& id : regdoc::preorder(doc)) {
    const auto& c = doc.clauses.at(id);
    json children = json::array();
    for (const auto& ch : c.children) children.push_back(ch.str());
    arr.push_back({{"id", id.str()}, {"text", c.text}, {"children", children}});
  }
  return arr;
}

json refs_json(const regdoc::RefGraph& g) {
  json arr = json::array();
  for (const auto& [src, refs] : g.adjacency) {
    for (const auto& r : refs) {
      arr.push_back({{"source", r.source.str()},
                     {"target", r.target.str()},
                     {"kind", r.kind == regdoc::RefKind::Paragraph ? "paragraph" : "annex"},
                     {"resolved", r.resolved}});
    }
  }
  return arr;
}

json chunks_json(const std::vector<smartchunk::Chunk>& chunks) {
  json arr = json::array();
  for (const auto& c : chunks) {
    json members = json::array();
    for (const auto& m : c.member_clauses) members.push_back(m.str());
    arr.push_back({{"id", c.id},
                   {"expansion_depth", c.expansion_depth},
                   {"token_count", c.token_count},
                   {"members", members},
                   {"text", c.text}});
  }
  return arr;
}

json findings_json(const std::vector<scenario::Finding>& findings) {
  json arr = json::array();
  for (const auto& f : findings) {
    arr.push_back({{"kind", scenario::to_string(f.kind)}, {"subject", f.subject}, {"message", f.message}});
  }
  return arr;
}

json violations_json(const mm::ConformanceReport& r) {
  json arr = json::array();
  for (const auto& v : r.violations) {
    arr.push_back({{"object", v.object_id}, {"feature", v.feature}, {"kind", mm::to_string(v.kind)}, {"message", v.message}});
  }
  return arr;
}

json mappings_json(const std::vector<vehiclecode::SignalMapping>& ms) {
  json arr = json::array();
  for (const auto& m : ms) {
    arr.push_back({{"phrase", m.phrase},
                   {"path", m.path},
                   {"score", m.score},
                   {"method", vehiclecode::to_string(m.method)},
                   {"role", vehiclecode::to_string(m.role)}});
  }
  return arr;
}

json trace_json(const vehiclecode::CommandTrace& t) {
  json arr = json::array();
  for (const auto& c : t) arr.push_back({{"time", c.time}, {"path", c.path}, {"value", c.value}});
  return arr;
}

struct ChunkArgs {
  std::size_t granularity = smartchunk::ChunkingDefaults::granularity;
  std::size_t depth = smartchunk::ChunkingDefaults::depth_limit;
  std::size_t budget = smartchunk::ChunkingDefaults::max_tokens;
};

std::vector<smartchunk::Chunk> build_chunks(const regdoc::RegDocument& doc, const regdoc::RefGraph& g,
                                            const ChunkArgs& a, bool expand) {
  auto base = smartchunk::base_chunks(doc, a.granularity);
  if (!expand) return base;
  std::vector<smartchunk::Chunk> out;
  for (const auto& c : base) out.push_back(smartchunk::expand_chunk(c, g, doc, a.depth, {a.budget}));
  return out;
}

struct MappingArgs {
  std::string scenario_file;
  std::string catalog_file;
  std::string aliases_file;
  double threshold = vehiclecode::kDefaultMatchThreshold;
  std::vector<std::string> telemetry;
  std::vector<std::string> actuation;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_file, "Scenario file")->required();
    cmd->add_option("--catalog", catalog_file, "VSS catalog file")->required();
    cmd->add_option("--aliases", aliases_file, "Alias file (phrase=path lines)");
    cmd->add_option("--threshold", threshold, "Fuzzy match threshold")->capture_default_str();
    cmd->add_option("--telemetry", telemetry, "Extra telemetry phrase (repeatable)");
    cmd->add_option("--actuation", actuation, "Extra actuation phrase (repeatable)");
  }

  std::pair<vehiclecode::ExperimentModel, std::vector<vehiclecode::SignalMapping>> run(
      vehiclecode::VssCatalog& catalog) const {
    auto s = scenario::parse_scenario(read_file(scenario_file));
    catalog = vehiclecode::parse_vss_catalog(read_file(catalog_file));
    auto aliases = aliases_file.empty() ? vehiclecode::AliasTable{} : vehiclecode::parse_aliases(read_file(aliases_file));
    std::vector<vehiclecode::Action> extras;
    for (const auto& p : telemetry) extras.push_back({p, vehiclecode::ActionRole::Telemetry});
    for (const auto& p : actuation) extras.push_back({p, vehiclecode::ActionRole::Actuation});
    auto exp = vehiclecode::derive_experiment(s, extras);
    auto mappings = vehiclecode::map_signals(exp, catalog, aliases, threshold);
    return {std::move(exp), std::move(mappings)};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regpipe: regulation-to-vehicle-code pipeline tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  std::function<int()> action;
  std::string file, file2, file3, query, tmpl, backend, workspace;
  ChunkArgs chunk_args;
  std::size_t k = 5;
  bool with_rerank = false;
  MappingArgs mapping;

  // reg
  auto* reg = app.add_subcommand("reg", "Regulation documents");
  reg->require_subcommand(1);
  auto* reg_parse = reg->add_subcommand("parse", "Print the clause tree");
  reg_parse->add_option("file", file, "Regulation text")->required();
  reg_parse->callback([&] {
    action = [&] {
      auto doc = regdoc::parse_document(read_file(file));
      emit(opt, clause_json(doc), regdoc::dump_clauses(doc));
      return kOk;
    };
  });
  auto* reg_refs = reg->add_subcommand("refs", "Print the cross-reference list");
  reg_refs->add_option("file", file, "Regulation text")->required();
  reg_refs->callback([&] {
    action = [&] {
      auto doc = regdoc::parse_document(read_file(file));
      auto g = regdoc::build_reference_graph(doc);
      emit(opt, refs_json(g), regdoc::dump_references(g));
      return kOk;
    };
  });

  // chunk
  auto* chunk = app.add_subcommand("chunk", "Clause chunking");
  chunk->require_subcommand(1);
  auto* chunk_build = chunk->add_subcommand("build", "Base chunks at a granularity");
  auto* chunk_expand = chunk->add_subcommand("expand", "Base chunks expanded over the reference graph");
  for (auto* c : {chunk_build, chunk_expand}) {
    c->add_option("file", file, "Regulation text")->required();
    c->add_option("--granularity", chunk_args.granularity, "Seed depth")->capture_default_str();
  }
  chunk_expand->add_option("--depth", chunk_args.depth, "Expansion depth")->capture_default_str();
  chunk_expand->add_option("--budget", chunk_args.budget, "Token budget")->capture_default_str()->check(CLI::PositiveNumber);
  const auto chunk_action = [&](bool expand) {
    return [&, expand] {
      action = [&, expand] {
        auto doc = regdoc::parse_document(read_file(file));
        auto g = regdoc::build_reference_graph(doc);
        auto chunks = build_chunks(doc, g, chunk_args, expand);
        emit(opt, chunks_json(chunks), smartchunk::dump_chunks(chunks));
        return kOk;
      };
    };
  };
  chunk_build->callback(chunk_action(false));
  chunk_expand->callback(chunk_action(true));

  // retrieve
  auto* ret = app.add_subcommand("retrieve", "Ranked retrieval over expanded chunks");
  ret->add_option("file", file, "Regulation text")->required();
  ret->add_option("--query", query, "Query text")->required();
  ret->add_option("--k", k, "Results to return")->capture_default_str()->check(CLI::PositiveNumber);
  ret->add_flag("--rerank", with_rerank, "Apply the rerank stage");
  ret->add_option("--granularity", chunk_args.granularity)->capture_default_str();
  ret->add_option("--depth", chunk_args.depth)->capture_default_str();
  ret->add_option("--budget", chunk_args.budget)->capture_default_str();
  ret->callback([&] {
    action = [&] {
      auto doc = regdoc::parse_document(read_file(file));
      auto g = regdoc::build_reference_graph(doc);
      auto chunks = build_chunks(doc, g, chunk_args, true);
      auto index = retrieve::build_index(chunks);
      auto hits = retrieve::retrieve(index, query, k);
      if (with_rerank) hits = retrieve::rerank(std::move(hits), query, g, retrieve::make_lookup(chunks));
      json arr = json::array();
      for (const auto& h : hits) {
        arr.push_back({{"id", h.id},
                       {"bm25", h.bm25},
                       {"rerank", h.rerank},
                       {"components",
                        {{"bm25_norm", h.components.bm25_norm},
                         {"ref_proximity", h.components.ref_proximity},
                         {"numeric_overlap", h.components.numeric_overlap}}}});
      }
      emit(opt, arr, retrieve::format_results(hits));
      return kOk;
    };
  });

  // mm
  auto* mmc = app.add_subcommand("mm", "Metamodels");
  mmc->require_subcommand(1);
  auto* mm_from = mmc->add_subcommand("from-plantuml", "Transform a PlantUML class diagram to the canonical metamodel");
  auto* mm_validate = mmc->add_subcommand("validate", "Check a PlantUML or canonical metamodel");
  for (auto* c : {mm_from, mm_validate}) c->add_option("file", file, "Metamodel source")->required();
  mm_from->callback([&] {
    action = [&] {
      auto mm = mm::parse_plantuml(read_file(file));
      emit(opt, json{{"canonical", mm::to_canonical(mm)}}, mm::to_canonical(mm));
      return kOk;
    };
  });
  mm_validate->callback([&] {
    action = [&] {
      auto mm = mm::load_metamodel(read_file(file));
      emit(opt, json{{"valid", true}, {"classes", mm.classes().size()}},
           "valid: " + std::to_string(mm.classes().size()) + " class(es)\n");
      return kOk;
    };
  });

  // inst
  auto* inst = app.add_subcommand("inst", "Model instances");
  inst->require_subcommand(1);
  auto* inst_validate = inst->add_subcommand("validate", "Conformance check against a metamodel");
  inst_validate->add_option("file", file, "Instance document")->required();
  inst_validate->add_option("--metamodel", file2, "Metamodel")->required();
  inst_validate->callback([&] {
    action = [&] {
      auto mm = mm::load_metamodel(read_file(file2));
      auto instance = mm::parse_instance(read_file(file));
      auto report = mm::check_conformance(instance, mm);
      emit(opt, json{{"conforms", report.conforms()}, {"violations", violations_json(report)}},
           report.conforms() ? "conforms\n" : mm::format_report(report));
      return report.conforms() ? kOk : kFailed;
    };
  });

  // ocl
  auto* oclc = app.add_subcommand("ocl", "OCL constraints");
  oclc->require_subcommand(1);
  auto* ocl_parse = oclc->add_subcommand("parse", "Parse and pretty-print constraints");
  ocl_parse->add_option("file", file, "Constraint file")->required();
  ocl_parse->callback([&] {
    action = [&] {
      auto cs = ocl::parse_ocl(read_file(file));
      json arr = json::array();
      for (std::size_t i = 0; i < cs.size(); ++i) {
        arr.push_back({{"label", ocl::constraint_label(cs[i], i)}, {"text", ocl::to_string(cs[i])}});
      }
      emit(opt, arr, ocl::to_string(cs));
      return kOk;
    };
  });
  auto* ocl_check = oclc->add_subcommand("check", "Evaluate constraints on an instance");
  ocl_check->add_option("--metamodel", file, "Metamodel")->required();
  ocl_check->add_option("--instance", file2, "Instance document")->required();
  ocl_check->add_option("--constraints", file3, "Constraint file")->required();
  ocl_check->callback([&] {
    action = [&] {
      auto mm = mm::load_metamodel(read_file(file));
      auto instance = mm::parse_instance(read_file(file2));
      auto cs = ocl::parse_ocl(read_file(file3));
      auto report = ocl::check_all(cs, instance, mm);
      if (opt.json()) std::cout << ocl::format_report_json(report);
      else std::cout << ocl::format_report_text(report);
      return report.all_pass() ? kOk : kFailed;
    };
  });

  // scenario
  auto* scen = app.add_subcommand("scenario", "Test scenarios");
  scen->require_subcommand(1);
  auto* scen_validate = scen->add_subcommand("validate", "Validate a scenario, optionally against a regulation");
  scen_validate->add_option("file", file, "Scenario file")->required();
  scen_validate->add_option("--regulation", file2, "Regulation text for the provenance check");
  scen_validate->callback([&] {
    action = [&] {
      auto s = scenario::parse_scenario(read_file(file));
      std::optional<regdoc::RegDocument> doc;
      if (!file2.empty()) doc = regdoc::parse_document(read_file(file2));
      auto findings = scenario::validate_scenario(s, doc ? &*doc : nullptr);
      emit(opt, json{{"scenario", s.id}, {"findings", findings_json(findings)}},
           findings.empty() ? "valid\n" : scenario::format_findings(findings));
      return findings.empty() ? kOk : kFailed;
    };
  });
  auto* scen_config = scen->add_subcommand("emit-config", "Print the canonical scenario config");
  scen_config->add_option("file", file, "Scenario file")->required();
  scen_config->callback([&] {
    action = [&] {
      auto text = scenario::emit_sim_config(scenario::parse_scenario(read_file(file)));
      emit(opt, json{{"config", text}}, text);
      return kOk;
    };
  });
  auto* scen_sim = scen->add_subcommand("emit-sim", "Render a simulation script");
  scen_sim->add_option("file", file, "Scenario file")->required();
  scen_sim->add_option("--template", tmpl, "Script template (default: built-in CARLA template)");
  scen_sim->callback([&] {
    action = [&] {
      auto s = scenario::parse_scenario(read_file(file));
      auto text = scenario::emit_sim_script(s, tmpl.empty() ? std::string(scenario::default_sim_template()) : read_file(tmpl));
      emit(opt, json{{"script", text}}, text);
      return kOk;
    };
  });

  // vss
  auto* vss = app.add_subcommand("vss", "Vehicle signal catalogs");
  vss->require_subcommand(1);
  auto* vss_parse = vss->add_subcommand("parse", "Parse and print a catalog");
  vss_parse->add_option("file", file, "Catalog file")->required();
  vss_parse->callback([&] {
    action = [&] {
      auto cat = vehiclecode::parse_vss_catalog(read_file(file));
      json arr = json::array();
      for (const auto& [path, e] : cat.entries) {
        json j{{"path", path}, {"datatype", vehiclecode::to_string(e.type)}};
        if (e.unit) j["unit"] = *e.unit;
        if (e.min) j["min"] = *e.min;
        if (e.max) j["max"] = *e.max;
        arr.push_back(j);
      }
      emit(opt, arr, vehiclecode::format_catalog(cat));
      return kOk;
    };
  });

  // map-signals
  auto* map_cmd = app.add_subcommand("map-signals", "Map scenario actions to catalog signals");
  mapping.add_to(map_cmd);
  map_cmd->callback([&] {
    action = [&] {
      vehiclecode::VssCatalog cat;
      auto [exp, mappings] = mapping.run(cat);
      emit(opt, mappings_json(mappings), vehiclecode::format_mappings(mappings));
      return kOk;
    };
  });

  // emit-code
  auto* code_cmd = app.add_subcommand("emit-code", "Render control code for mapped rules");
  mapping.add_to(code_cmd);
  code_cmd->add_option("--rules", file, "Rule file")->required();
  code_cmd->add_option("--template", tmpl, "Code template (default: built-in comAPI template)");
  code_cmd->callback([&] {
    action = [&] {
      vehiclecode::VssCatalog cat;
      auto [exp, mappings] = mapping.run(cat);
      auto rules = vehiclecode::parse_rules(read_file(file));
      vehiclecode::check_rules(rules, cat);
      auto code = vehiclecode::emit_control_code(
          exp, mappings, rules, tmpl.empty() ? std::string(vehiclecode::default_control_template()) : read_file(tmpl));
      emit(opt, json{{"code", code}}, code);
      return kOk;
    };
  });

  // bridge
  auto* bridge = app.add_subcommand("bridge", "Event bridge");
  bridge->require_subcommand(1);
  auto* bridge_sim = bridge->add_subcommand("simulate", "Replay events through the control rules");
  bridge_sim->add_option("--rules", file, "Rule file")->required();
  bridge_sim->add_option("--events", file2, "Event file (time;path;value)")->required();
  bridge_sim->callback([&] {
    action = [&] {
      auto rules = vehiclecode::parse_rules(read_file(file));
      auto trace = vehiclecode::simulate_bridge(rules, vehiclecode::parse_events(read_file(file2)));
      emit(opt, trace_json(trace), vehiclecode::format_trace(trace));
      return kOk;
    };
  });

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "End-to-end stage runner");
  pipe->require_subcommand(1);
  auto* pipe_run = pipe->add_subcommand("run", "Run all stages");
  pipe_run->footer(std::string(pipeline::config_reference()));
  pipe_run->add_option("--config", file, "Pipeline config file")->required();
  pipe_run->add_option("--backend", backend, "Generator backend, e.g. mock:DIR");
  pipe_run->add_option("--workspace", workspace, "Artifact directory (overrides the config)");
  pipe_run->callback([&] {
    action = [&] {
      pipeline::PipelineConfig cfg;
      try {
        cfg = pipeline::load_config_file(file);
      } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kInputError;
      }
      if (!backend.empty()) cfg.backend = backend;
      else if (const char* env = std::getenv("REGPIPE_MOCK_DIR"); env != nullptr && *env != '\0') {
        cfg.backend = std::string("mock:") + env;
      }
      if (!workspace.empty()) cfg.workspace = workspace;
      auto report = pipeline::run_pipeline(cfg);
      if (opt.json()) {
        json stages = json::array();
        for (const auto& s : report.stages) {
          json artifacts = json::array();
          for (const auto& a : s.artifacts) artifacts.push_back(a.string());
          stages.push_back({{"stage", s.number},
                            {"name", s.name},
                            {"status", pipeline::to_string(s.status)},
                            {"artifacts", artifacts},
                            {"diagnostics", s.diagnostics}});
        }
        std::cout << json{{"exit_code", report.exit_code}, {"errors", report.diagnostics}, {"stages", stages}}.dump(2)
                  << "\n";
      } else {
        std::cout << pipeline::format_summary(report);
      }
      return report.exit_code;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }
  if (!action) {
    std::cerr << app.help();
    return kInputError;
  }
  try {
    return action();
  } catch (const vehiclecode::VehicleError& e) {
    std::cerr << e.what() << "\n";
    const auto k = e.kind();
    const bool validation = k == vehiclecode::VehicleErrc::NoMatch || k == vehiclecode::VehicleErrc::AmbiguousMapping ||
                            k == vehiclecode::VehicleErrc::UnmappedSignalInRule ||
                            k == vehiclecode::VehicleErrc::InvalidRule;
    return validation ? kFailed : kInputError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
}
