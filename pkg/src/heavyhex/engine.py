"""Monte Carlo sampling of noisy memory experiments.

One noiseless tableau run fixes a reference measurement record. Each shot is
then a Pauli frame propagated with sampled faults; detector values are parities
of measurement flips because every detector is 0 on the reference.

Shots are processed in blocks of :data:`BLOCK_SHOTS`. Block ``b`` draws from a
generator seeded by ``SeedSequence([seed, b])``, so results do not depend on
how blocks are distributed over threads.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits.core import ScheduledCircuit
from .frame import (
    LOC_CX,
    LOC_GATE1,
    FrameSimulator,
    PauliFrame,
    frame_propagate,
    location_classes,
    unpack_shots,
)
from .noise import NoiseAssignment
from .pauli import PauliOperator, bits_of
from .tableau import StabilizerTableau

__all__ = [
    "BLOCK_SHOTS",
    "ReferenceSample",
    "ShotBatch",
    "NondeterministicDetectorError",
    "tableau_execute",
    "reference_sample",
    "run_shots",
    "run_injected",
    "detector_flips",
    "logical_error_estimate",
    "default_threads",
]

BLOCK_SHOTS = 1024


class NondeterministicDetectorError(RuntimeError):
    """A detector or the observable depends on a random measurement outcome."""


def default_threads() -> int:
    value = os.environ.get("HEAVYHEX_THREADS", "")
    return max(1, int(value)) if value.strip().isdigit() else 1


def _code_pauli(kind: str, qubits: tuple[int, ...], code: int, basis: str) -> PauliOperator:
    if kind == "cx":
        a, b = qubits
        x = ((code & 1) << a) | (((code >> 2) & 1) << b)
        z = (((code >> 1) & 1) << a) | (((code >> 3) & 1) << b)
        return PauliOperator(x, z)
    (q,) = qubits
    if kind in ("reset", "initialize"):
        return PauliOperator(z=(code & 1) << q) if basis == "X" else PauliOperator(x=(code & 1) << q)
    return PauliOperator((code & 1) << q, ((code >> 1) & 1) << q)


def tableau_execute(
    circuit: ScheduledCircuit,
    faults: dict[int, int] | None = None,
    rng: np.random.Generator | None = None,
    forced=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the circuit on a full stabilizer tableau.

    Args:
        faults: location id -> fault code (see :mod:`heavyhex.frame`).
        rng: drives intrinsically random outcomes.
        forced: optional callable ``meas -> bit`` fixing random outcomes.

    Returns:
        ``(record, random)``: measured bits and a mask of random measurements.
    """
    faults = faults or {}
    tab = StabilizerTableau(circuit.n_qubits)
    record = np.zeros(circuit.n_measurements, dtype=np.uint8)
    random = np.zeros(circuit.n_measurements, dtype=bool)
    fb_by_meas: dict[int, list] = {}
    for fb in circuit.feedback:
        fb_by_meas.setdefault(fb.meas, []).append(fb.pauli)
    ops = circuit.ops
    i = 0
    while i < len(ops):
        tick = ops[i].tick
        j = i
        measured: list[int] = []
        while j < len(ops) and ops[j].tick == tick:
            op = ops[j]
            kind = op.kind
            if kind == "cx":
                tab.apply_cx(*op.qubits)
            elif kind == "h":
                tab.apply_h(op.qubits[0])
            elif kind == "s":
                tab.apply_s(op.qubits[0])
            elif kind in ("x", "y", "z"):
                tab.apply_pauli(PauliOperator.single(kind.upper(), op.qubits[0]))
            elif kind == "measure":
                q = op.qubits[0]
                obs = PauliOperator(z=1 << q) if op.basis == "Z" else PauliOperator(x=1 << q)
                f = forced(op.meas) if forced is not None else None
                bit, det = tab.measure_pauli(obs, rng, f)
                record[op.meas] = bit
                random[op.meas] = not det
                measured.append(op.meas)
            elif kind in ("reset", "initialize"):
                q = op.qubits[0]
                if op.basis == "Z":
                    tab.reset_z(q)
                else:
                    tab.reset_x(q)
            j += 1
        for loc in range(i, j):
            code = faults.get(loc, 0)
            if not code:
                continue
            op = ops[loc]
            if op.kind == "measure":
                record[op.meas] ^= code & 1
            else:
                tab.apply_pauli(_code_pauli(op.kind, op.qubits, code, op.basis))
        for m in measured:
            if record[m]:
                for p in fb_by_meas.get(m, ()):
                    tab.apply_pauli(p)
        i = j
    return record, random


@dataclass(frozen=True)
class ReferenceSample:
    bits: np.ndarray
    random: np.ndarray
    basis: str
    seed: int


def _destabilizer_hook(circuit: ScheduledCircuit, seed: int):
    """Tableau run that also records, for each random measurement, the Pauli
    that maps one outcome branch to the other (its paired destabilizer).

    The branch Pauli is moved to the end of its tick through the remaining
    operations of that tick, collecting the measurements it would flip.
    """
    rng = np.random.default_rng(seed)
    tab = StabilizerTableau(circuit.n_qubits)
    record = np.zeros(circuit.n_measurements, dtype=np.uint8)
    random = np.zeros(circuit.n_measurements, dtype=bool)
    branch: dict[int, tuple[PauliOperator, tuple[int, ...]]] = {}
    ops = circuit.ops
    for k, op in enumerate(ops):
        kind = op.kind
        if kind == "cx":
            tab.apply_cx(*op.qubits)
        elif kind == "h":
            tab.apply_h(op.qubits[0])
        elif kind == "s":
            tab.apply_s(op.qubits[0])
        elif kind in ("x", "y", "z"):
            tab.apply_pauli(PauliOperator.single(kind.upper(), op.qubits[0]))
        elif kind == "measure":
            q = op.qubits[0]
            obs = PauliOperator(z=1 << q) if op.basis == "Z" else PauliOperator(x=1 << q)
            bit, det = tab.measure_pauli(obs, rng)
            record[op.meas] = bit
            random[op.meas] = not det
            if not det:
                d = tab.destabilizer(tab.last_pivot)
                frame = PauliFrame(circuit.n_qubits, d.x, d.z)
                later = []
                for nxt in ops[k + 1:]:
                    if nxt.tick != op.tick:
                        break
                    frame = frame_propagate(frame, nxt)
                    if nxt.kind == "measure" and frame.record and frame.record[-1]:
                        later.append(nxt.meas)
                branch[op.meas] = (PauliOperator(frame.x_flips, frame.z_flips), (op.meas, *later))
        elif kind in ("reset", "initialize"):
            (tab.reset_z if op.basis == "Z" else tab.reset_x)(op.qubits[0])
    return record, random, branch


def reference_sample(circuit: ScheduledCircuit, seed: int = 0) -> ReferenceSample:
    """Noiseless reference record; verifies every detector and the observable
    are deterministic and 0.

    Determinism is checked exactly: for each random outcome the branch Pauli is
    propagated as a frame; any detector it flips would be random.
    """
    record, random, branch = _destabilizer_hook(circuit, seed)
    for fb in circuit.feedback:
        if random[fb.meas] or record[fb.meas]:
            raise NondeterministicDetectorError(f"feedback measurement m_{fb.meas} is not deterministic 0")
    if branch:
        order = sorted(branch)
        tick_of = {op.meas: op.tick for op in circuit.ops if op.kind == "measure"}
        by_tick: dict[int, list[tuple[int, int]]] = {}
        for shot, m in enumerate(order):
            by_tick.setdefault(tick_of[m], []).append((shot, m))
        sim = FrameSimulator(circuit)

        def hook(tick, X, Z, rec):
            for shot, m in by_tick.get(tick, ()):
                p, flipped = branch[m]
                w, b = shot >> 6, np.uint64(1 << (shot & 63))
                for q in bits_of(p.x):
                    X[q, w] ^= b
                for q in bits_of(p.z):
                    Z[q, w] ^= b
                for mm in flipped:
                    rec[mm, w] ^= b

        flips = sim.run(len(order), hook=hook)
        dets = detector_flips(circuit, flips)
        bad = np.flatnonzero(dets.any(axis=1))
        if bad.size:
            raise NondeterministicDetectorError(f"detectors {bad[:10].tolist()} depend on random outcomes")
        if _parity_rows(flips, circuit.observable).any():
            raise NondeterministicDetectorError("observable depends on random outcomes")
    for k, det in enumerate(circuit.detectors):
        if np.bitwise_xor.reduce(record[list(det.meas)]) if det.meas else 0:
            raise NondeterministicDetectorError(f"detector {k} is 1 on the reference")
    if circuit.observable and np.bitwise_xor.reduce(record[list(circuit.observable)]):
        raise NondeterministicDetectorError("observable is 1 on the reference")
    return ReferenceSample(record, random, circuit.basis, seed)


def _parity_rows(flips: np.ndarray, rows) -> np.ndarray:
    rows = list(rows)
    if not rows:
        return np.zeros(flips.shape[1], dtype=np.uint64)
    return np.bitwise_xor.reduce(flips[rows], axis=0)


def detector_flips(circuit: ScheduledCircuit, flips: np.ndarray) -> np.ndarray:
    """Detector words ``(n_detectors, words)`` from measurement-flip words."""
    out = np.zeros((len(circuit.detectors), flips.shape[1]), dtype=np.uint64)
    for k, det in enumerate(circuit.detectors):
        out[k] = _parity_rows(flips, det.meas)
    return out


@dataclass(frozen=True)
class ShotBatch:
    """Detector samples and observed logical flips for ``n_shots`` shots."""

    n_shots: int
    n_detectors: int
    detectors: np.ndarray  # (n_shots, ceil(n_detectors / 8)) uint8, little bit order
    flips: np.ndarray  # (n_shots,) bool
    seed: int
    circuit_hash: str = ""
    assignment_hash: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def detector_bits(self, columns=None) -> np.ndarray:
        bits = np.unpackbits(self.detectors, axis=1, count=self.n_detectors, bitorder="little").astype(bool)
        return bits if columns is None else bits[:, columns]

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.detectors.tobytes())
        h.update(np.packbits(self.flips).tobytes())
        return h.hexdigest()[:16]

    def export(self, path: str | Path) -> None:
        """Write ``<path>.bits`` (one row per shot: detectors then flip) and ``<path>.json``."""
        path = Path(path)
        rows = np.concatenate([self.detector_bits(), self.flips[:, None]], axis=1)
        packed = np.packbits(rows, axis=1, bitorder="little")
        path.with_suffix(".bits").write_bytes(packed.tobytes())
        side = {
            "schema": "heavyhex-shots v1",
            "n_shots": self.n_shots,
            "n_detectors": self.n_detectors,
            "row_bytes": int(packed.shape[1]),
            "bit_order": "little",
            "seed": self.seed,
            "circuit_hash": self.circuit_hash,
            "assignment_hash": self.assignment_hash,
            "digest": self.digest(),
        }
        path.with_suffix(".json").write_text(json.dumps(side, indent=1, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> ShotBatch:
        path = Path(path)
        side = json.loads(path.with_suffix(".json").read_text())
        raw = np.frombuffer(path.with_suffix(".bits").read_bytes(), dtype=np.uint8)
        rows = raw.reshape(side["n_shots"], side["row_bytes"])
        bits = np.unpackbits(rows, axis=1, count=side["n_detectors"] + 1, bitorder="little").astype(bool)
        dets = np.packbits(bits[:, :-1], axis=1, bitorder="little")
        return cls(side["n_shots"], side["n_detectors"], dets, bits[:, -1].copy(), side["seed"],
                   side["circuit_hash"], side["assignment_hash"])


def circuit_digest(circuit: ScheduledCircuit) -> str:
    return hashlib.sha256(circuit.to_text().encode()).hexdigest()[:16]


class _Sampler:
    """Per-tick fault events drawn from an assignment."""

    def __init__(self, circuit: ScheduledCircuit, assignment: NoiseAssignment):
        if assignment.n_locations != circuit.n_locations:
            raise ValueError("assignment does not match the circuit's locations")
        self.rates = np.asarray(assignment.rates, dtype=float)
        self.bias = np.asarray(assignment.bias)
        self.base = np.asarray(assignment.base, dtype=float)
        self.cls = location_classes(circuit)["cls"]
        self._active: dict[tuple[int, int], np.ndarray] = {}

    def source(self, rng: np.random.Generator):
        empty = (np.zeros(0, np.int64),) * 3

        def draw(a: int, b: int, n_shots: int):
            key = (a, b)
            if key not in self._active:
                self._active[key] = (a + np.flatnonzero(self.rates[a:b] > 0),
                                     a + np.flatnonzero(self.base[a:b] > 0))
            nz, nb = self._active[key]
            out = empty
            if nz.size:
                li, shot = np.nonzero(rng.random((nz.size, n_shots)) < self.rates[nz, None])
                loc = nz[li]
                out = (loc, shot.astype(np.int64), self._codes(loc, rng, self.bias[loc]))
            if nb.size:
                # the second channel's events compose with the first by XOR
                li, shot = np.nonzero(rng.random((nb.size, n_shots)) < self.base[nb, None])
                loc = nb[li]
                extra = (loc, shot.astype(np.int64), self._codes(loc, rng, np.zeros(loc.size, np.int8)))
                out = tuple(np.concatenate(pair) for pair in zip(out, extra))
            return out

        return draw

    def _codes(self, loc: np.ndarray, rng: np.random.Generator, bias: np.ndarray) -> np.ndarray:
        n = loc.size
        r1 = rng.integers(1, 4, size=n)
        r2 = rng.integers(1, 16, size=n)
        r3 = rng.integers(0, 3, size=n)
        cls = self.cls[loc]
        code = np.ones(n, dtype=np.int64)  # measure / prep flips
        g1 = cls == LOC_GATE1
        cx = cls == LOC_CX
        code[g1] = np.where(bias[g1] == 1, 2, np.where(bias[g1] == 2, 1, r1[g1]))
        z2 = np.array([2, 8, 10])[r3]
        x2 = np.array([1, 4, 5])[r3]
        code[cx] = np.where(bias[cx] == 1, z2[cx], np.where(bias[cx] == 2, x2[cx], r2[cx]))
        return code


def run_shots(
    circuit: ScheduledCircuit,
    assignment: NoiseAssignment,
    n_shots: int,
    seed: int,
    threads: int | None = None,
    simulator: FrameSimulator | None = None,
) -> ShotBatch:
    """Sample ``n_shots`` noisy shots; bit-identical for any ``threads``."""
    if n_shots < 0:
        raise ValueError("n_shots must be non-negative")
    sim = simulator or FrameSimulator(circuit)
    sampler = _Sampler(circuit, assignment)
    n_blocks = math.ceil(n_shots / BLOCK_SHOTS)

    def block(b: int):
        size = min(BLOCK_SHOTS, n_shots - b * BLOCK_SHOTS)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, b])))
        flips = sim.run(size, sampler.source(rng))
        dets = unpack_shots(detector_flips(circuit, flips), size).T
        obs = unpack_shots(_parity_rows(flips, circuit.observable)[None, :], size)[0]
        return dets, obs

    threads = threads or default_threads()
    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, range(n_blocks)))
    else:
        parts = [block(b) for b in range(n_blocks)]
    n_det = len(circuit.detectors)
    if parts:
        dets = np.concatenate([p[0] for p in parts], axis=0)
        obs = np.concatenate([p[1] for p in parts])
    else:
        dets = np.zeros((0, n_det), dtype=bool)
        obs = np.zeros(0, dtype=bool)
    packed = np.packbits(dets, axis=1, bitorder="little") if n_det else np.zeros((n_shots, 0), np.uint8)
    return ShotBatch(n_shots, n_det, packed, obs, seed, circuit_digest(circuit), assignment.digest())


def run_injected(circuit: ScheduledCircuit, faults: list[dict[int, int]],
                 simulator: FrameSimulator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Propagate explicit fault sets, one per shot.

    Returns ``(detectors, flips)`` as boolean arrays of shape
    ``(len(faults), n_detectors)`` and ``(len(faults),)``.
    """
    sim = simulator or FrameSimulator(circuit)
    locs, shots, codes = [], [], []
    for s, fs in enumerate(faults):
        for loc, code in fs.items():
            locs.append(loc)
            shots.append(s)
            codes.append(code)
    locs = np.asarray(locs, dtype=np.int64)
    shots = np.asarray(shots, dtype=np.int64)
    codes = np.asarray(codes, dtype=np.int64)
    order = np.argsort(locs, kind="stable")
    locs, shots, codes = locs[order], shots[order], codes[order]

    def source(a, b, n):
        lo, hi = np.searchsorted(locs, [a, b])
        return locs[lo:hi], shots[lo:hi], codes[lo:hi]

    n = len(faults)
    flips = sim.run(n, source)
    dets = unpack_shots(detector_flips(circuit, flips), n).T
    obs = unpack_shots(_parity_rows(flips, circuit.observable)[None, :], n)[0]
    return dets, obs


def logical_error_estimate(fail_z: int, shots_z: int, fail_x: int, shots_x: int) -> dict[str, float]:
    """Total logical error ``p_z_basis + p_x_basis`` with its binomial standard error.

    The Z-basis memory estimates ``p_x + p_y`` and the X-basis memory
    ``p_z + p_y``, so the sum estimates ``p_x + p_z + 2 p_y``.
    """
    if shots_z <= 0 or shots_x <= 0:
        raise ValueError("shot counts must be positive")
    rz, rx = fail_z / shots_z, fail_x / shots_x
    se_z = math.sqrt(rz * (1 - rz) / shots_z)
    se_x = math.sqrt(rx * (1 - rx) / shots_x)
    return {"rate_z": rz, "rate_x": rx, "se_z": se_z, "se_x": se_x,
            "total": rz + rx, "se_total": math.hypot(se_z, se_x)}
