"""Single-fault enumeration and propagation.

A *basis fault* is one non-identity outcome of a location's channel: X, Y or
Z after a one-qubit gate, one of the 15 two-qubit Paulis after a CX, or a flip
of a measurement or preparation. Codes follow :mod:`heavyhex.frame`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits.core import ScheduledCircuit
from .codes import SubsystemCode
from .frame import LOC_CX, FrameSimulator, location_classes, unpack_shots
from .gf2 import RowBasis

__all__ = [
    "fault_codes",
    "single_faults",
    "FaultEffects",
    "propagate_faults",
    "fault_signatures",
    "within_one_mod_gauge",
    "gauge_basis",
    "hook_violations",
]

CHUNK = 8192


def fault_codes(cls: int) -> tuple[int, ...]:
    if cls == LOC_CX:
        return tuple(range(1, 16))
    if cls in (3, 4):  # measure, prep
        return (1,)
    return (1, 2, 3)


def single_faults(circuit: ScheduledCircuit, locations=None) -> tuple[np.ndarray, np.ndarray]:
    """All basis faults as parallel ``(location, code)`` arrays, location-major."""
    cls = location_classes(circuit)["cls"]
    locs = range(circuit.n_locations) if locations is None else locations
    out_l, out_c = [], []
    for loc in locs:
        for c in fault_codes(int(cls[loc])):
            out_l.append(loc)
            out_c.append(c)
    return np.asarray(out_l, dtype=np.int64), np.asarray(out_c, dtype=np.int64)


@dataclass(frozen=True)
class FaultEffects:
    """Per-fault measurement flips and the frame left at the end (booleans)."""

    locations: np.ndarray
    codes: np.ndarray
    flips: np.ndarray  # (faults, n_measurements)
    x: np.ndarray      # (faults, n_qubits)
    z: np.ndarray


def propagate_faults(circuit: ScheduledCircuit, locs, codes,
                     simulator: FrameSimulator | None = None) -> FaultEffects:
    """Propagate each ``(locs[i], codes[i])`` alone as shot ``i``."""
    sim = simulator or FrameSimulator(circuit)
    locs = np.asarray(locs, dtype=np.int64)
    codes = np.asarray(codes, dtype=np.int64)
    parts = []
    for lo in range(0, max(len(locs), 1), CHUNK):
        l, c = locs[lo:lo + CHUNK], codes[lo:lo + CHUNK]
        parts.append(_run_singles(sim, l, c))
    return FaultEffects(locs, codes, *(np.concatenate(p) for p in zip(*parts)))


def _run_singles(sim, locs, codes):
    n = len(locs)
    order = np.argsort(locs, kind="stable")
    sl, ss, sc = locs[order], order.astype(np.int64), codes[order]

    def source(a, b, _n):
        lo, hi = np.searchsorted(sl, [a, b])
        return sl[lo:hi], ss[lo:hi], sc[lo:hi]

    rec, X, Z = sim.run(max(n, 1), source, final_frame=True)
    return (unpack_shots(rec, n).T, unpack_shots(X, n).T, unpack_shots(Z, n).T)


def fault_signatures(circuit: ScheduledCircuit, locs=None, codes=None,
                     simulator: FrameSimulator | None = None):
    """Detector signatures and observable flips of single faults.

    Returns ``(locs, codes, dets, obs)`` with ``dets`` a boolean matrix
    ``(faults, n_detectors)``; defaults to every basis fault of the circuit.
    """
    if locs is None:
        locs, codes = single_faults(circuit)
    sim = simulator or FrameSimulator(circuit)
    n_det = len(circuit.detectors)
    det_rows = [np.asarray(d.meas, dtype=np.int64) for d in circuit.detectors]
    obs_rows = np.asarray(circuit.observable, dtype=np.int64)
    dets = np.zeros((len(locs), n_det), dtype=bool)
    obs = np.zeros(len(locs), dtype=bool)
    for lo in range(0, len(locs), CHUNK):
        flips, _, _ = _run_singles(sim, locs[lo:lo + CHUNK], codes[lo:lo + CHUNK])
        block = dets[lo:lo + CHUNK]
        for k, rows in enumerate(det_rows):
            block[:, k] = np.bitwise_xor.reduce(flips[:, rows], axis=1)
        if obs_rows.size:
            obs[lo:lo + CHUNK] = np.bitwise_xor.reduce(flips[:, obs_rows], axis=1)
    return locs, codes, dets, obs


def within_one_mod_gauge(code: SubsystemCode, mask: int, pauli: str,
                         basis: RowBasis | None = None) -> bool:
    """True if the ``pauli``-type error on data ``mask`` is equivalent to an
    error of weight at most 1 modulo the gauge group."""
    if basis is None:
        basis = gauge_basis(code, pauli)
    if basis.contains(mask):
        return True
    return any(basis.contains(mask ^ (1 << q)) for q in range(code.n))


def gauge_basis(code: SubsystemCode, pauli: str) -> RowBasis:
    basis = RowBasis()
    for k in code.gauges_of(pauli):
        g = code.gauges[k]
        basis.add(g.x if pauli == "X" else g.z)
    return basis


def _mask(row: np.ndarray) -> int:
    return sum(1 << int(q) for q in np.flatnonzero(row))


def hook_violations(code: SubsystemCode, circuit: ScheduledCircuit) -> tuple[int, list]:
    """Scan every single fault of a syndrome-extraction circuit.

    Returns ``(n_faults, violations)``; a violation is a fault whose final
    data error is not within one X and one Z error modulo the gauge group.
    Data qubits are the first ``code.n`` circuit qubits.
    """
    locs, codes = single_faults(circuit)
    eff = propagate_faults(circuit, locs, codes)
    bx, bz = gauge_basis(code, "X"), gauge_basis(code, "Z")
    bad = []
    for i in range(len(locs)):
        xm, zm = _mask(eff.x[i, :code.n]), _mask(eff.z[i, :code.n])
        if not (within_one_mod_gauge(code, xm, "X", bx) and within_one_mod_gauge(code, zm, "Z", bz)):
            bad.append((int(locs[i]), int(codes[i])))
    return len(locs), bad
