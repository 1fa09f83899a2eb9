"""Python bindings for the regpipe C++ core."""

from ._core import (
    RegpipeError,
    check_conformance,
    chunks,
    dump_clauses,
    emit_control_code,
    emit_sim_script,
    instance_canonical,
    map_signals,
    metamodel_canonical,
    ocl_canonical,
    ocl_check,
    parse_vss,
    references,
    retrieve,
    run_pipeline,
    scenario_config,
    select,
    simulate_bridge,
    validate_candidate,
    validate_scenario,
)

__all__ = [
    "RegpipeError",
    "check_conformance",
    "chunks",
    "dump_clauses",
    "emit_control_code",
    "emit_sim_script",
    "instance_canonical",
    "map_signals",
    "metamodel_canonical",
    "ocl_canonical",
    "ocl_check",
    "parse_vss",
    "references",
    "retrieve",
    "run_pipeline",
    "scenario_config",
    "select",
    "simulate_bridge",
    "validate_candidate",
    "validate_scenario",
]
