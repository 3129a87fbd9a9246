"""Pauli-frame propagation, single-frame and bit-packed over many shots.

A frame records the Pauli error carried by each qubit relative to a noiseless
reference execution, plus the measurement outcomes it flipped. Clifford gates
act on frames by conjugation (signs do not matter), measurements copy the
anticommuting component into the record and resets clear the qubit.

:class:`FrameSimulator` runs up to thousands of frames at once, storing them
as ``uint64`` words with one shot per bit. Faults are supplied as *events*
``(location, shot, code)`` by a noise source; the code is a small bit set
whose meaning depends on the location kind:

========== =====================================================
kind       code bits
========== =====================================================
1q gate    1: X on the qubit, 2: Z on the qubit
cx         1: X control, 2: Z control, 4: X target, 8: Z target
measure    1: flip the recorded outcome
prep       1: flip the prepared state (X after a Z-basis prep)
========== =====================================================
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .circuits.core import Op, ScheduledCircuit
from .pauli import bits_of

__all__ = [
    "PauliFrame",
    "frame_propagate",
    "LOC_GATE1",
    "LOC_CX",
    "LOC_MEASURE",
    "LOC_PREP",
    "location_classes",
    "FrameSimulator",
    "pack_shots",
    "unpack_shots",
]

LOC_GATE1, LOC_CX, LOC_MEASURE, LOC_PREP = 1, 2, 3, 4


@dataclass(frozen=True)
class PauliFrame:
    """Frame of a single shot: X/Z flip bit sets and the measurement record."""

    n: int
    x_flips: int = 0
    z_flips: int = 0
    record: tuple[int, ...] = field(default=())

    def with_error(self, x: int = 0, z: int = 0) -> PauliFrame:
        if (x | z) >> self.n:
            raise IndexError("error acts outside the frame")
        return PauliFrame(self.n, self.x_flips ^ x, self.z_flips ^ z, self.record)


def frame_propagate(frame: PauliFrame, op: Op) -> PauliFrame:
    """Propagate ``frame`` through one operation.

    Measurements append the flip bit to the record (the record is indexed by
    order of propagation; measurement indices in ``op.meas`` are not used).
    """
    for q in op.qubits:
        if not 0 <= q < frame.n:
            raise IndexError(f"qubit {q} outside a frame of {frame.n} qubits")
    x, z, rec = frame.x_flips, frame.z_flips, frame.record
    kind = op.kind
    if kind == "cx":
        c, t = op.qubits
        x ^= ((x >> c) & 1) << t
        z ^= ((z >> t) & 1) << c
    elif kind == "h":
        (q,) = op.qubits
        xb, zb = (x >> q) & 1, (z >> q) & 1
        x ^= (xb ^ zb) << q
        z ^= (xb ^ zb) << q
    elif kind == "s":
        (q,) = op.qubits
        z ^= ((x >> q) & 1) << q
    elif kind == "measure":
        (q,) = op.qubits
        src = x if op.basis == "Z" else z
        rec = rec + (((src >> q) & 1),)
    elif kind in ("reset", "initialize"):
        (q,) = op.qubits
        x &= ~(1 << q)
        z &= ~(1 << q)
    elif kind not in ("id", "x", "y", "z"):
        raise ValueError(f"unsupported operation {kind!r}")
    return PauliFrame(frame.n, x, z, rec)


def location_classes(circuit: ScheduledCircuit) -> dict[str, np.ndarray]:
    """Per-location arrays describing how a fault code is applied."""
    n = circuit.n_locations
    cls = np.zeros(n, dtype=np.int8)
    qa = np.zeros(n, dtype=np.int64)
    qb = np.zeros(n, dtype=np.int64)
    meas = np.full(n, -1, dtype=np.int64)
    prep_z = np.zeros(n, dtype=bool)  # prep flip acts as Z (X-basis prep)
    for i, op in enumerate(circuit.ops):
        qa[i] = op.qubits[0]
        if op.kind == "cx":
            cls[i] = LOC_CX
            qb[i] = op.qubits[1]
        elif op.kind == "measure":
            cls[i] = LOC_MEASURE
            meas[i] = op.meas
        elif op.kind in ("reset", "initialize"):
            cls[i] = LOC_PREP
            prep_z[i] = op.basis == "X"
        else:
            cls[i] = LOC_GATE1
    return {"cls": cls, "qa": qa, "qb": qb, "meas": meas, "prep_z": prep_z}


@dataclass
class _Tick:
    cx_c: np.ndarray
    cx_t: np.ndarray
    h: np.ndarray
    s: np.ndarray
    mz_q: np.ndarray
    mz_m: np.ndarray
    mx_q: np.ndarray
    mx_m: np.ndarray
    resets: np.ndarray
    tick: int
    loc_start: int
    loc_stop: int
    feedback: list[tuple[int, np.ndarray, np.ndarray]]


def _ints(v) -> np.ndarray:
    return np.asarray(v, dtype=np.int64)


# events for one tick: (location ids, shot ids, codes)
Events = tuple[np.ndarray, np.ndarray, np.ndarray]
NoiseSource = Callable[[int, int, int], Events]


class FrameSimulator:
    """Batched frame propagation through a fixed circuit.

    Args:
        circuit: the scheduled circuit; operations must be sorted by tick.
    """

    def __init__(self, circuit: ScheduledCircuit):
        self.circuit = circuit
        self.classes = location_classes(circuit)
        fb_by_meas: dict[int, list] = {}
        for fb in circuit.feedback:
            fb_by_meas.setdefault(fb.meas, []).append(fb)
        self.ticks: list[_Tick] = []
        ops = circuit.ops
        i = 0
        while i < len(ops):
            t = ops[i].tick
            j = i
            cx_c, cx_t, h, s, mzq, mzm, mxq, mxm, resets, fbs = ([] for _ in range(10))
            while j < len(ops) and ops[j].tick == t:
                op = ops[j]
                if op.kind == "cx":
                    cx_c.append(op.qubits[0])
                    cx_t.append(op.qubits[1])
                elif op.kind == "h":
                    h.append(op.qubits[0])
                elif op.kind == "s":
                    s.append(op.qubits[0])
                elif op.kind == "measure":
                    (mzq if op.basis == "Z" else mxq).append(op.qubits[0])
                    (mzm if op.basis == "Z" else mxm).append(op.meas)
                    for fb in fb_by_meas.get(op.meas, ()):
                        fbs.append((op.meas, _ints(bits_of(fb.pauli.x)), _ints(bits_of(fb.pauli.z))))
                elif op.kind in ("reset", "initialize"):
                    resets.append(op.qubits[0])
                j += 1
            self.ticks.append(_Tick(_ints(cx_c), _ints(cx_t), _ints(h), _ints(s), _ints(mzq),
                                    _ints(mzm), _ints(mxq), _ints(mxm), _ints(resets), t, i, j, fbs))
            i = j

    def run(self, n_shots: int, noise: NoiseSource | None = None, hook=None,
            final_frame: bool = False):
        """Propagate ``n_shots`` frames; returns measurement flips ``(n_meas, words)``.

        With ``final_frame`` the result is ``(rec, X, Z)``, the last two being
        the frame words left on each qubit at the end.

        ``noise(loc_start, loc_stop, n_shots)`` is called once per tick and
        returns the fault events whose locations fall in that tick.
        ``hook(tick, X, Z, rec)`` may edit the frame words after the noise of
        each tick and before feedback.
        """
        words = max(1, (n_shots + 63) // 64)
        nq = self.circuit.n_qubits
        X = np.zeros((nq, words), dtype=np.uint64)
        Z = np.zeros((nq, words), dtype=np.uint64)
        rec = np.zeros((self.circuit.n_measurements, words), dtype=np.uint64)
        cls = self.classes
        for tk in self.ticks:
            if tk.h.size:
                tmp = X[tk.h].copy()
                X[tk.h] = Z[tk.h]
                Z[tk.h] = tmp
            if tk.s.size:
                Z[tk.s] ^= X[tk.s]
            if tk.cx_c.size:
                X[tk.cx_t] ^= X[tk.cx_c]
                Z[tk.cx_c] ^= Z[tk.cx_t]
            if tk.mz_q.size:
                rec[tk.mz_m] = X[tk.mz_q]
            if tk.mx_q.size:
                rec[tk.mx_m] = Z[tk.mx_q]
            if tk.resets.size:
                X[tk.resets] = 0
                Z[tk.resets] = 0
            if noise is not None:
                loc, shot, code = noise(tk.loc_start, tk.loc_stop, n_shots)
                if loc.size:
                    _apply_events(X, Z, rec, cls, loc, shot, code)
            if hook is not None:
                hook(tk.tick, X, Z, rec)
            for m, xq, zq in tk.feedback:
                if xq.size:
                    X[xq] ^= rec[m]
                if zq.size:
                    Z[zq] ^= rec[m]
        if final_frame:
            return rec, X, Z
        return rec


def _apply_events(X, Z, rec, cls, loc, shot, code) -> None:
    word = shot >> 6
    bit = np.left_shift(np.uint64(1), (shot & 63).astype(np.uint64))
    kind = cls["cls"][loc]
    qa = cls["qa"][loc]
    qb = cls["qb"][loc]
    gate = (kind == LOC_GATE1) | (kind == LOC_CX)
    sel = gate & ((code & 1) > 0)
    np.bitwise_xor.at(X, (qa[sel], word[sel]), bit[sel])
    sel = gate & ((code & 2) > 0)
    np.bitwise_xor.at(Z, (qa[sel], word[sel]), bit[sel])
    sel = (kind == LOC_CX) & ((code & 4) > 0)
    np.bitwise_xor.at(X, (qb[sel], word[sel]), bit[sel])
    sel = (kind == LOC_CX) & ((code & 8) > 0)
    np.bitwise_xor.at(Z, (qb[sel], word[sel]), bit[sel])
    prep = (kind == LOC_PREP) & ((code & 1) > 0)
    pz = cls["prep_z"][loc]
    sel = prep & ~pz
    np.bitwise_xor.at(X, (qa[sel], word[sel]), bit[sel])
    sel = prep & pz
    np.bitwise_xor.at(Z, (qa[sel], word[sel]), bit[sel])
    sel = (kind == LOC_MEASURE) & ((code & 1) > 0)
    np.bitwise_xor.at(rec, (cls["meas"][loc][sel], word[sel]), bit[sel])


def pack_shots(bits: np.ndarray) -> np.ndarray:
    """``(rows, shots)`` booleans -> ``(rows, words)`` uint64, shot s at bit s % 64."""
    rows, shots = bits.shape
    words = max(1, (shots + 63) // 64)
    padded = np.zeros((rows, words * 64), dtype=bool)
    padded[:, :shots] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").astype(np.uint64).reshape(rows, words)


def unpack_shots(words: np.ndarray, n_shots: int) -> np.ndarray:
    """Inverse of :func:`pack_shots`."""
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :n_shots].astype(bool)
