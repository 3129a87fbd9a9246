"""Syndrome-extraction cycles of the rotated subsystem surface code.

X cycle: every X triangle has its own auxiliary qubit ``("xa", r, j)`` on the
horizontal edge. The auxiliary is prepared in ``|+>``, acts as CX control on
its two or three data qubits in three layers, and is read out in the X basis.
Layer order depends on whether the edge is the top or the bottom edge of its
face; it is chosen so that neighbouring triangles never compete for a data
qubit and a fault on the auxiliary spreads to at most one data qubit modulo
the triangle itself.

Z cycle: two stages. Stage 1 measures the triangles on the left edges of their
faces together with the boundary pairs of column ``d``; stage 2 measures the
right-edge triangles and the boundary pairs of column 1. A triangle uses the
two X auxiliaries of its face, ``m1`` above and ``m2`` below; ``m1`` ends up
holding the parity and ``m2`` returns to ``|0>``. A boundary pair uses three
auxiliaries ``c1, c2, c3``, with ``c3`` holding the parity.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..codes import SubsystemCode
from ..lattice import HeavyHexLattice, build_heavy_hex
from .core import CircuitBuilder, ScheduledCircuit

__all__ = [
    "CycleFragment",
    "build_x_gauge_cycle",
    "build_z_gauge_cycle",
    "emit_rssc_x_cycle",
    "emit_rssc_z_cycle",
    "rssc_z_stages",
]


@dataclass(frozen=True)
class CycleFragment:
    """A standalone gauge-measurement cycle.

    ``gauge_meas`` maps gauge index to the measurement recording it.
    ``stages`` lists, per stage, the gauges measured in it.
    """

    circuit: ScheduledCircuit
    gauge_meas: dict
    stages: tuple[tuple[int, ...], ...]
    lattice: HeavyHexLattice


def _require(code: SubsystemCode, kind: str) -> None:
    if code.kind != kind:
        raise ValueError(f"this cycle needs a {kind} code, got {code.kind}")


def _x_layers(code: SubsystemCode, lat: HeavyHexLattice):
    """Per X gauge: (aux, [layer-1, layer-2, layer-3] data qubit or None)."""
    out = {}
    for k in code.gauges_of("X"):
        _, _, r, j, fi, fj = code.gauge_labels[k]
        aux = lat[("xa", r, j)]
        left, right = code.qubit(r, j), code.qubit(r, j + 1)
        t = code.index.get(("t", fi, fj))
        if (fi, fj) == (r, j):  # top edge of its face
            out[k] = (aux, [t, left, right])
        else:
            out[k] = (aux, [left, t, right])
    return out


def emit_rssc_x_cycle(b: CircuitBuilder, code: SubsystemCode, lat: HeavyHexLattice) -> dict:
    layers = _x_layers(code, lat)
    for aux, _ in layers.values():
        b.reset(aux, "X")
    for step in range(3):
        for aux, seq in layers.values():
            if seq[step] is not None:
                b.cx(aux, seq[step])
    return {k: b.measure(aux, "X") for k, (aux, _) in layers.items()}


def rssc_z_stages(code: SubsystemCode) -> tuple[list[int], list[int]]:
    """Z gauges of stage 1 and stage 2."""
    d = code.d
    first, second = [], []
    for k in code.gauges_of("Z"):
        _, _, i, c, fi, fj = code.gauge_labels[k]
        if fj in (0, d):  # boundary pair
            (first if c == d else second).append(k)
        else:
            (first if c == fj else second).append(k)
    return first, second


def _emit_z_stage(b: CircuitBuilder, code: SubsystemCode, lat: HeavyHexLattice, gauges) -> dict:
    d = code.d
    tri, pairs = [], []
    for k in gauges:
        _, _, i, c, fi, fj = code.gauge_labels[k]
        a, low = code.qubit(i, c), code.qubit(i + 1, c)
        if fj in (0, d):
            pairs.append((k, a, low, lat[("c1", i, c)], lat[("c2", i, c)], lat[("c3", i, c)]))
        else:
            t = code.index[("t", fi, fj)]
            tri.append((k, a, low, t, lat[("xa", i, fj)], lat[("xa", i + 1, fj)]))
    for _, _, _, _, m1, m2 in tri:
        b.reset(m1)
        b.reset(m2)
    for _, _, _, c1, c2, c3 in pairs:
        b.reset(c1)
        b.reset(c2)
        b.reset(c3)
    tri_steps = [
        lambda a, low, t, m1, m2: [(a, m1), (low, m2)],
        lambda a, low, t, m1, m2: [(m2, t)],
        lambda a, low, t, m1, m2: [(t, m1)],
        lambda a, low, t, m1, m2: [(m2, t)],
        lambda a, low, t, m1, m2: [(low, m2)],
    ]
    pair_steps = [
        lambda a, low, c1, c2, c3: [(a, c1), (low, c2)],
        lambda a, low, c1, c2, c3: [(c1, c3)],
        lambda a, low, c1, c2, c3: [(c2, c3)],
        lambda a, low, c1, c2, c3: [(a, c1), (low, c2)],
    ]
    for step in range(5):
        for _, a, low, t, m1, m2 in tri:
            for c, tg in tri_steps[step](a, low, t, m1, m2):
                b.cx(c, tg)
        if step < 4:
            for _, a, low, c1, c2, c3 in pairs:
                for c, tg in pair_steps[step](a, low, c1, c2, c3):
                    b.cx(c, tg)
    out = {k: b.measure(m1) for k, _, _, _, m1, _ in tri}
    out.update({k: b.measure(c3) for k, _, _, _, _, c3 in pairs})
    return out


def emit_rssc_z_cycle(b: CircuitBuilder, code: SubsystemCode, lat: HeavyHexLattice) -> dict:
    first, second = rssc_z_stages(code)
    out = _emit_z_stage(b, code, lat, first)
    out.update(_emit_z_stage(b, code, lat, second))
    return out


def _fragment(code, lattice, emit, stages, name) -> CycleFragment:
    lat = lattice if lattice is not None else build_heavy_hex(code.d)
    b = CircuitBuilder(lat.n_vertices)
    gauge_meas = emit(b, code, lat)
    circuit = b.build(name=name, qubit_roles=lat.roles)
    return CycleFragment(circuit, gauge_meas, stages, lat)


def build_x_gauge_cycle(code: SubsystemCode, lattice: HeavyHexLattice | None = None) -> CycleFragment:
    """One X-gauge cycle of the RSSC as a standalone circuit."""
    _require(code, "RSSC")
    return _fragment(code, lattice, emit_rssc_x_cycle, (tuple(code.gauges_of("X")),),
                     f"rssc-d{code.d}-x-cycle")


def build_z_gauge_cycle(code: SubsystemCode, lattice: HeavyHexLattice | None = None) -> CycleFragment:
    """One two-stage Z-gauge cycle of the RSSC as a standalone circuit."""
    _require(code, "RSSC")
    first, second = rssc_z_stages(code)
    return _fragment(code, lattice, emit_rssc_z_cycle, (tuple(first), tuple(second)),
                     f"rssc-d{code.d}-z-cycle")
