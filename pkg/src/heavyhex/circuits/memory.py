"""Memory experiments with the schedule ``(Z^s X^s)^t``.

Detectors follow the gauge fixing induced by the schedule. Inside a block of
``s`` same-type cycles each gauge outcome is compared with the previous cycle.
The first cycle of a later block can only compare stabilizer values, formed
as products of gauge outcomes, with the last cycle of the previous block of
the same type, since the other type's cycles scramble individual gauges.
Cycles whose outcomes are random under the initial product state get no
detector. The final transversal readout closes the record the same way.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from ..codes import SubsystemCode
from ..lattice import HeavyHexLattice, build_heavy_hex, build_hhc_lattice
from .core import CircuitBuilder, Detector, ScheduledCircuit
from .hhc import check_deflag, emit_hhc_x_cycle, emit_hhc_z_cycle
from .rssc import emit_rssc_x_cycle, emit_rssc_z_cycle

__all__ = ["Schedule", "build_memory_experiment", "build_cycle_sequence", "lattice_for"]

DEFAULT_ROUNDS = 12


@dataclass(frozen=True)
class Schedule:
    """Gauge-cycle schedule ``(Z^s X^s)^t`` for a memory in ``basis``.

    The X-basis memory runs the mirrored string ``(X^s Z^s)^t`` so it starts
    with the cycles that are deterministic on ``|+>^n``.
    """

    s: int
    t: int
    basis: str = "Z"
    total: int = DEFAULT_ROUNDS

    def __post_init__(self):
        if self.basis not in ("X", "Z"):
            raise ValueError(f"basis must be X or Z, got {self.basis!r}")
        if self.s not in (1, 2, 3, 4):
            raise ValueError(f"s must be in 1..4, got {self.s}")
        if self.t < 1 or self.s * self.t != self.total:
            raise ValueError(f"s*t = {self.s * self.t} does not match the round count {self.total}")

    @classmethod
    def from_total(cls, s: int, basis: str = "Z", total: int = DEFAULT_ROUNDS) -> Schedule:
        if total % s:
            raise ValueError(f"s={s} does not divide {total}")
        return cls(s, total // s, basis, total)

    def cycles(self) -> str:
        other = "X" if self.basis == "Z" else "Z"
        return (self.basis * self.s + other * self.s) * self.t

    def __str__(self) -> str:
        other = "X" if self.basis == "Z" else "Z"
        return f"({self.basis}^{self.s} {other}^{self.s})^{self.t}"


def lattice_for(code: SubsystemCode) -> HeavyHexLattice:
    return build_heavy_hex(code.d) if code.kind == "RSSC" else build_hhc_lattice(code.d)


def _emitters(code: SubsystemCode, deflag):
    if code.kind == "RSSC":
        return {"X": emit_rssc_x_cycle, "Z": emit_rssc_z_cycle}
    if code.kind == "HHC":
        return {"X": emit_hhc_x_cycle,
                "Z": lambda b, c, lat: emit_hhc_z_cycle(b, c, lat, deflag)}
    raise ValueError(f"unknown code kind {code.kind!r}")


def build_memory_experiment(
    code: SubsystemCode,
    schedule: Schedule,
    lattice: HeavyHexLattice | None = None,
    deflag="decoder",
    idle_noise: bool = True,
) -> ScheduledCircuit:
    """Prepare, run ``schedule`` and read out a logical memory.

    ``deflag`` selects how HHC flags are used (see :mod:`.hhc`).
    """
    name = f"{code.kind.lower()}-d{code.d}-{schedule.basis}-s{schedule.s}t{schedule.t}"
    return build_cycle_sequence(code, schedule.cycles(), schedule.basis, lattice, deflag,
                                idle_noise, name)


def build_cycle_sequence(
    code: SubsystemCode,
    cycles: Sequence[str],
    basis: str,
    lattice: HeavyHexLattice | None = None,
    deflag="decoder",
    idle_noise: bool = True,
    name: str = "",
) -> ScheduledCircuit:
    """Memory circuit for an arbitrary string of ``"X"``/``"Z"`` cycles.

    Flag readouts annotated by the cycles become ``F`` detectors.
    """
    if basis not in ("X", "Z"):
        raise ValueError(f"basis must be X or Z, got {basis!r}")
    if any(c not in ("X", "Z") for c in cycles):
        raise ValueError("cycles must be a string over X and Z")
    lat = lattice if lattice is not None else lattice_for(code)
    emit = _emitters(code, check_deflag(deflag))
    b = CircuitBuilder(lat.n_vertices, idle_noise=idle_noise)
    for q in range(code.n):
        b.initialize(q, basis)
    detectors: list[Detector] = []
    last: dict[str, dict | None] = {"X": None, "Z": None}
    prev_type = None
    stab_of = {p: code.stabilizers_of(p) for p in "XZ"}
    n_flags = 0
    for c, kind in enumerate(cycles):
        got = emit[kind](b, code, lat)
        for k, fl in enumerate(b.flags[n_flags:]):
            detectors.append(Detector((fl.meas,), "F", (c, k)))
        n_flags = len(b.flags)
        before = last[kind]
        if before is None:
            if kind == basis:
                for k in code.gauges_of(kind):
                    detectors.append(Detector((got[k],), kind, (c, k)))
        elif prev_type == kind:
            for k in code.gauges_of(kind):
                detectors.append(Detector((got[k], before[k]), kind, (c, k)))
        else:
            for si in stab_of[kind]:
                parts = code.stabilizer_gauges[si]
                meas = tuple(got[k] for k in parts) + tuple(before[k] for k in parts)
                detectors.append(Detector(meas, kind, (c, si)))
        last[kind] = got
        prev_type = kind
    final = [b.measure(q, basis) for q in range(code.n)]
    end = len(cycles)
    before = last[basis]
    if before is not None and prev_type == basis:
        for k in code.gauges_of(basis):
            meas = tuple(final[q] for q in sorted(code.gauges[k].support)) + (before[k],)
            detectors.append(Detector(meas, basis, (end, k)))
    else:
        for si in stab_of[basis]:
            meas = tuple(final[q] for q in sorted(code.stabilizers[si].support))
            if before is not None:
                meas += tuple(before[k] for k in code.stabilizer_gauges[si])
            detectors.append(Detector(meas, basis, (end, si)))
    logical = code.logical_z if basis == "Z" else code.logical_x
    observable = tuple(final[q] for q in sorted(logical.support))
    return b.build(detectors, observable, basis=basis, name=name, qubit_roles=lat.roles)
