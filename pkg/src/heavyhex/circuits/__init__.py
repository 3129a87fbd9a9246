"""Syndrome-extraction circuits and memory experiments."""

from .core import (
    GATE_KINDS,
    OP_KINDS,
    CircuitBuilder,
    Detector,
    Feedback,
    Op,
    ScheduledCircuit,
    enumerate_fault_locations,
)
from .hhc import build_hhc_cycle
from .memory import Schedule, build_cycle_sequence, build_memory_experiment, lattice_for
from .rssc import CycleFragment, build_x_gauge_cycle, build_z_gauge_cycle

__all__ = [
    "GATE_KINDS",
    "OP_KINDS",
    "CircuitBuilder",
    "Detector",
    "Feedback",
    "Op",
    "ScheduledCircuit",
    "enumerate_fault_locations",
    "CycleFragment",
    "build_x_gauge_cycle",
    "build_z_gauge_cycle",
    "build_hhc_cycle",
    "Schedule",
    "build_memory_experiment",
    "build_cycle_sequence",
    "lattice_for",
]
