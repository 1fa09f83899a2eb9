#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regpipe/genconsensus.hpp"
#include "regpipe/mmcore.hpp"
#include "regpipe/ocl.hpp"
#include "regpipe/pipeline.hpp"
#include "regpipe/regdoc.hpp"
#include "regpipe/retrieve.hpp"
#include "regpipe/scenario.hpp"
#include "regpipe/smartchunk.hpp"
#include "regpipe/vehiclecode.hpp"

namespace py = pybind11;
using namespace regpipe;

namespace {

py::dict chunk_dict(const smartchunk::Chunk& c) {
  py::list members;
  for (const auto& m : c.member_clauses) members.append(m.str());
  py::dict d;
  d["id"] = c.id;
  d["members"] = members;
  d["text"] = c.text;
  d["token_count"] = c.token_count;
  d["expansion_depth"] = c.expansion_depth;
  return d;
}

std::vector<smartchunk::Chunk> make_chunks(const regdoc::RegDocument& doc, const regdoc::RefGraph& g,
                                           std::size_t granularity, std::size_t depth, std::size_t budget,
                                           bool expand) {
  auto chunks = smartchunk::base_chunks(doc, granularity);
  if (expand) {
    for (auto& c : chunks) c = smartchunk::expand_chunk(c, g, doc, depth, {budget});
  }
  return chunks;
}

vehiclecode::ExperimentModel experiment(const std::string& scenario_text, const std::vector<std::string>& telemetry,
                                        const std::vector<std::string>& actuation) {
  std::vector<vehiclecode::Action> extras;
  for (const auto& p : telemetry) extras.push_back({p, vehiclecode::ActionRole::Telemetry});
  for (const auto& p : actuation) extras.push_back({p, vehiclecode::ActionRole::Actuation});
  return vehiclecode::derive_experiment(scenario::parse_scenario(scenario_text), extras);
}

py::list mapping_list(const std::vector<vehiclecode::SignalMapping>& ms) {
  py::list out;
  for (const auto& m : ms) {
    py::dict d;
    d["phrase"] = m.phrase;
    d["path"] = m.path;
    d["score"] = m.score;
    d["method"] = std::string(vehiclecode::to_string(m.method));
    d["role"] = std::string(vehiclecode::to_string(m.role));
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regulation parsing, model checking and vehicle code emission";
  py::register_exception<Error>(m, "RegpipeError");

  m.def("dump_clauses", [](const std::string& text) { return regdoc::dump_clauses(regdoc::parse_document(text)); },
        py::arg("text"));
  m.def(
      "references",
      [](const std::string& text) {
        auto doc = regdoc::parse_document(text);
        py::list out;
        for (const auto& [id, refs] : regdoc::build_reference_graph(doc).adjacency) {
          for (const auto& r : refs) out.append(py::make_tuple(r.source.str(), r.target.str(), r.resolved));
        }
        return out;
      },
      py::arg("text"), "(source, target, resolved) per cross-reference, in document order.");

  m.def(
      "chunks",
      [](const std::string& text, std::size_t granularity, std::size_t depth, std::size_t budget, bool expand) {
        auto doc = regdoc::parse_document(text);
        auto g = regdoc::build_reference_graph(doc);
        py::list out;
        for (const auto& c : make_chunks(doc, g, granularity, depth, budget, expand)) out.append(chunk_dict(c));
        return out;
      },
      py::arg("text"), py::arg("granularity") = 1, py::arg("depth") = 2, py::arg("budget") = 512,
      py::arg("expand") = true);

  m.def(
      "retrieve",
      [](const std::string& text, const std::string& query, std::size_t k, bool rerank) {
        auto doc = regdoc::parse_document(text);
        auto g = regdoc::build_reference_graph(doc);
        auto chunks = make_chunks(doc, g, 1, 2, 512, true);
        auto index = retrieve::build_index(chunks);
        auto hits = retrieve::retrieve(index, query, k);
        if (rerank) hits = retrieve::rerank(std::move(hits), query, g, retrieve::make_lookup(chunks));
        py::list out;
        for (const auto& h : hits) out.append(py::make_tuple(h.id, h.bm25, h.rerank));
        return out;
      },
      py::arg("text"), py::arg("query"), py::arg("k") = 5, py::arg("rerank") = false,
      "(id, bm25, rerank) over chunks expanded with the default settings.");

  m.def("metamodel_canonical", [](const std::string& text) { return mm::to_canonical(mm::load_metamodel(text)); },
        py::arg("text"), "Canonical form of a PlantUML or canonical metamodel.");
  m.def("instance_canonical", [](const std::string& text) { return mm::serialize_instance(mm::parse_instance(text)); },
        py::arg("text"));
  m.def(
      "check_conformance",
      [](const std::string& instance, const std::string& metamodel) {
        auto report = mm::check_conformance(mm::parse_instance(instance), mm::load_metamodel(metamodel));
        py::list out;
        for (const auto& v : report.violations) {
          out.append(py::make_tuple(v.object_id, v.feature, std::string(mm::to_string(v.kind)), v.message));
        }
        return out;
      },
      py::arg("instance"), py::arg("metamodel"));

  m.def("ocl_canonical", [](const std::string& text) { return ocl::to_string(ocl::parse_ocl(text)); },
        py::arg("text"));
  m.def(
      "ocl_check",
      [](const std::string& metamodel, const std::string& instance, const std::string& constraints) {
        auto report = ocl::check_all(ocl::parse_ocl(constraints), mm::parse_instance(instance),
                                     mm::load_metamodel(metamodel));
        py::list out;
        for (const auto& v : report.verdicts) {
          out.append(py::make_tuple(v.constraint, v.object_id, std::string(ocl::to_string(v.outcome)), v.diagnostic));
        }
        return out;
      },
      py::arg("metamodel"), py::arg("instance"), py::arg("constraints"));

  m.def("scenario_config", [](const std::string& text) { return scenario::emit_sim_config(scenario::parse_scenario(text)); },
        py::arg("text"));
  m.def(
      "validate_scenario",
      [](const std::string& text, std::optional<std::string> regulation) {
        auto s = scenario::parse_scenario(text);
        std::optional<regdoc::RegDocument> doc;
        if (regulation) doc = regdoc::parse_document(*regulation);
        py::list out;
        for (const auto& f : scenario::validate_scenario(s, doc ? &*doc : nullptr)) {
          out.append(py::make_tuple(std::string(scenario::to_string(f.kind)), f.subject, f.message));
        }
        return out;
      },
      py::arg("text"), py::arg("regulation") = py::none());
  m.def(
      "emit_sim_script",
      [](const std::string& text, std::optional<std::string> tmpl) {
        return scenario::emit_sim_script(scenario::parse_scenario(text),
                                         tmpl ? *tmpl : std::string(scenario::default_sim_template()));
      },
      py::arg("text"), py::arg("template") = py::none());

  m.def(
      "parse_vss",
      [](const std::string& text) {
        py::dict out;
        for (const auto& [path, e] : vehiclecode::parse_vss_catalog(text).entries) {
          out[py::str(path)] = py::make_tuple(std::string(vehiclecode::to_string(e.type)), e.unit, e.min, e.max);
        }
        return out;
      },
      py::arg("text"), "path -> (datatype, unit, min, max).");
  m.def(
      "map_signals",
      [](const std::string& scenario_text, const std::string& catalog, const std::string& aliases, double threshold,
         const std::vector<std::string>& telemetry, const std::vector<std::string>& actuation) {
        auto exp = experiment(scenario_text, telemetry, actuation);
        return mapping_list(vehiclecode::map_signals(exp, vehiclecode::parse_vss_catalog(catalog),
                                                     vehiclecode::parse_aliases(aliases), threshold));
      },
      py::arg("scenario"), py::arg("catalog"), py::arg("aliases") = "", py::arg("threshold") = 0.5,
      py::arg("telemetry") = std::vector<std::string>{}, py::arg("actuation") = std::vector<std::string>{});
  m.def(
      "emit_control_code",
      [](const std::string& scenario_text, const std::string& catalog_text, const std::string& rules_text,
         const std::string& aliases, const std::vector<std::string>& telemetry,
         const std::vector<std::string>& actuation, std::optional<std::string> tmpl) {
        auto exp = experiment(scenario_text, telemetry, actuation);
        auto catalog = vehiclecode::parse_vss_catalog(catalog_text);
        auto mappings = vehiclecode::map_signals(exp, catalog, vehiclecode::parse_aliases(aliases));
        auto rules = vehiclecode::parse_rules(rules_text);
        vehiclecode::check_rules(rules, catalog);
        return vehiclecode::emit_control_code(exp, mappings, rules,
                                              tmpl ? *tmpl : std::string(vehiclecode::default_control_template()));
      },
      py::arg("scenario"), py::arg("catalog"), py::arg("rules"), py::arg("aliases") = "",
      py::arg("telemetry") = std::vector<std::string>{}, py::arg("actuation") = std::vector<std::string>{},
      py::arg("template") = py::none());
  m.def(
      "simulate_bridge",
      [](const std::string& rules, const std::string& events) {
        py::list out;
        for (const auto& c : vehiclecode::simulate_bridge(vehiclecode::parse_rules(rules), vehiclecode::parse_events(events))) {
          out.append(py::make_tuple(c.time, c.path, c.value));
        }
        return out;
      },
      py::arg("rules"), py::arg("events"), "(time, path, value) commands.");

  m.def(
      "validate_candidate",
      [](const std::string& text, const std::string& stage, std::optional<std::string> metamodel) {
        auto st = gen::stage_from(stage);
        if (!st) throw py::value_error("unknown stage: " + stage);
        std::optional<mm::MetaModel> model;
        if (metamodel) model = mm::load_metamodel(*metamodel);
        auto c = gen::validate_candidate({0, text, false, std::nullopt, {}}, *st,
                                         gen::ValidationContext{model ? &*model : nullptr});
        return py::make_tuple(c.valid, c.canonical, c.diagnostic);
      },
      py::arg("text"), py::arg("stage"), py::arg("metamodel") = py::none(), "(valid, canonical, diagnostic).");
  m.def(
      "select",
      [](const std::vector<std::optional<std::string>>& canonicals, std::size_t min_valid) {
        std::vector<gen::Candidate> cs;
        for (std::size_t i = 0; i < canonicals.size(); ++i) {
          cs.push_back({i, {}, canonicals[i].has_value(), canonicals[i], canonicals[i] ? "" : "invalid"});
        }
        return gen::select(cs, {std::max<std::size_t>(1, canonicals.size()), min_valid}).index;
      },
      py::arg("canonicals"), py::arg("min_valid") = 1,
      "Index of the consensus winner; None entries are invalid candidates.");

  m.def(
      "run_pipeline",
      [](const std::string& config, std::optional<std::string> workspace, std::optional<std::string> backend) {
        auto cfg = pipeline::load_config_file(config);
        if (workspace) cfg.workspace = *workspace;
        if (backend) cfg.backend = *backend;
        pipeline::RunReport report;
        {
          py::gil_scoped_release release;
          report = pipeline::run_pipeline(cfg);
        }
        py::list stages;
        for (const auto& s : report.stages) {
          stages.append(py::make_tuple(s.number, s.name, std::string(pipeline::to_string(s.status))));
        }
        return py::make_tuple(report.exit_code, stages, report.diagnostics);
      },
      py::arg("config"), py::arg("workspace") = py::none(), py::arg("backend") = py::none(),
      "(exit_code, [(number, name, status)], errors).");
}
