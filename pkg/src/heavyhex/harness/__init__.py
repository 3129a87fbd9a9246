"""Spec-driven sweeps, result files and the command-line interface."""

from .runner import (
    RESULT_SCHEMA,
    Comparison,
    ResultRecord,
    SweepPoint,
    compare_decoders,
    read_results,
    run_badsite_sweep,
    run_decoder_comparison,
    run_point,
    run_sigma_sweep,
    run_sweep,
    run_threshold_sweep,
    software_version,
    sweep_points,
    write_results,
)
from .specfile import SPEC_HEADER, SWEEPS, ExperimentSpec, SpecError, load_spec, parse_spec

__all__ = [
    "RESULT_SCHEMA",
    "SPEC_HEADER",
    "SWEEPS",
    "Comparison",
    "ExperimentSpec",
    "ResultRecord",
    "SpecError",
    "SweepPoint",
    "compare_decoders",
    "load_spec",
    "parse_spec",
    "read_results",
    "run_badsite_sweep",
    "run_decoder_comparison",
    "run_point",
    "run_sigma_sweep",
    "run_sweep",
    "run_threshold_sweep",
    "software_version",
    "sweep_points",
    "write_results",
]
