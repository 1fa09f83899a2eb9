import pytest

import regpipe


def test_clause_tree_and_references(read):
    text = read("F1.txt")
    assert "6.4" in regpipe.dump_clauses(text)
    edges = {(s, t) for s, t, _ in regpipe.references(text)}
    assert {("5.1", "5.2"), ("5.2", "6.4"), ("6.4", "5.1")} <= edges


def test_expansion_follows_layers(read):
    chunks = regpipe.chunks(read("F1.txt"), granularity=2, depth=2, budget=10000)
    seed = next(c for c in chunks if c["id"] == "6.4")
    assert seed["members"] == ["6.4", "5.1", "6", "5.2", "5"]


def test_retrieve_is_ranked(read):
    hits = regpipe.retrieve(read("F1.txt"), "collision warning", k=3)
    assert 0 < len(hits) <= 3
    scores = [bm25 for _, bm25, _ in hits]
    assert scores == sorted(scores, reverse=True)


def test_metamodel_and_instance(read):
    canonical = regpipe.metamodel_canonical(read("P1.puml"))
    assert canonical.startswith("metamodel")
    assert regpipe.metamodel_canonical(canonical) == canonical
    assert regpipe.check_conformance(read("I1.xml"), read("P1.puml")) == []
    found = regpipe.check_conformance(read("I1_no_sensors.xml"), read("P1.puml"))
    assert [(o, f, k) for o, f, k, _ in found] == [("v1", "sensors", "MultiplicityViolation")]


def test_ocl_check_all_pass(read):
    verdicts = regpipe.ocl_check(read("P1.puml"), read("I1.xml"), read("C1.ocl"))
    assert len(verdicts) == 5
    assert {outcome for _, _, outcome, _ in verdicts} == {"Pass"}


def test_scenario_round_trip(read):
    config = regpipe.scenario_config(read("S1.scn"))
    assert regpipe.scenario_config(config) == config
    assert regpipe.validate_scenario(read("S1.scn"), read("F1.txt")) == []


def test_bridge_rearm(read):
    trace = regpipe.simulate_bridge(read("R1.rules"), read("events_rearm.txt"))
    assert [t for t, _, _ in trace] == [1.0, 3.0]
    assert {p for _, p, _ in trace} == {"Vehicle.Chassis.Brake.PedalPosition"}


def test_select():
    assert regpipe.select([None, "A", "B", None, "A"]) == 1
    assert regpipe.select(["A", "B", "B", "A"]) == 0
    with pytest.raises(regpipe.RegpipeError, match="GenerationFailed"):
        regpipe.select([None, None, None])


def test_validate_candidate_reports_diagnostic():
    valid, canonical, diagnostic = regpipe.validate_candidate("not a metamodel", "metamodel")
    assert not valid and canonical is None and diagnostic
    with pytest.raises(ValueError):
        regpipe.validate_candidate("x", "nonsense")


def test_errors_carry_kind():
    with pytest.raises(regpipe.RegpipeError, match="UnknownKey|SyntaxError"):
        regpipe.scenario_config("bogus = 1\n")


def test_pipeline_run(fixtures, tmp_path):
    code, stages, errors = regpipe.run_pipeline(str(fixtures / "pipeline.cfg"), workspace=str(tmp_path))
    assert code == 0 and errors == []
    assert [s for _, _, s in stages] == ["ok"] * 11
    assert (tmp_path / "11_trace.txt").read_text() == "1;Vehicle.Chassis.Brake.PedalPosition;100\n"
