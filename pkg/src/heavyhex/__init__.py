"""Stabilizer simulation and matching decoding of subsystem codes on heavy-hex lattices."""

from .circuits import Schedule, ScheduledCircuit, build_memory_experiment
from .codes import SubsystemCode, build_code, validate_code
from .decoder import DetectorGraph, MatchingDecoder, build_detector_graph, decode_batch
from .engine import ShotBatch, run_shots
from .lattice import HeavyHexLattice, build_heavy_hex, build_hhc_lattice
from .noise import DistributionSpec, NoiseAssignment, assign_uniform, sample_assignment
from .pauli import PauliOperator

__version__ = "0.1.0"

__all__ = [
    "DetectorGraph",
    "DistributionSpec",
    "HeavyHexLattice",
    "MatchingDecoder",
    "NoiseAssignment",
    "PauliOperator",
    "Schedule",
    "ScheduledCircuit",
    "ShotBatch",
    "SubsystemCode",
    "assign_uniform",
    "build_code",
    "build_detector_graph",
    "build_heavy_hex",
    "build_hhc_lattice",
    "build_memory_experiment",
    "decode_batch",
    "run_shots",
    "sample_assignment",
    "validate_code",
]
