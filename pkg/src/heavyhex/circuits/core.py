"""Scheduled Clifford circuits with fault locations, detectors and an observable.

Circuits are assembled with :class:`CircuitBuilder`, which places each
operation at the earliest time step after the previous operation on any of
its qubits. Program order per qubit is kept, so the schedule implements the
same unitary as the written sequence. Idle (``id``) locations are added when
the builder is finalized.

Every operation in :attr:`ScheduledCircuit.ops` is a fault location; its index
in that tuple is the location id.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from ..pauli import PauliOperator

__all__ = [
    "GATE_KINDS",
    "OP_KINDS",
    "Op",
    "Detector",
    "Feedback",
    "ScheduledCircuit",
    "CircuitBuilder",
    "enumerate_fault_locations",
]

GATE_KINDS = ("cx", "h", "s", "id", "x", "y", "z")
OP_KINDS = GATE_KINDS + ("measure", "initialize", "reset")
_ONE_QUBIT = {"h", "s", "id", "x", "y", "z", "measure", "initialize", "reset"}


@dataclass(frozen=True)
class Op:
    """One scheduled operation.

    ``basis`` is ``"X"`` or ``"Z"`` for measure/initialize/reset and empty for
    gates. ``meas`` is the measurement-record index of a measurement, else -1.
    """

    kind: str
    qubits: tuple[int, ...]
    tick: int
    basis: str = ""
    meas: int = -1


@dataclass(frozen=True)
class Detector:
    """Parity of measurement events that is 0 in the noiseless circuit.

    ``pauli`` names the check type (``"X"`` or ``"Z"``); the decoder builds one
    graph per type. ``coord`` is (round, check index) for bookkeeping.
    """

    meas: tuple[int, ...]
    pauli: str
    coord: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Feedback:
    """Pauli tied to measurement ``meas``.

    As circuit feedback it is applied at the end of the tick that records
    ``meas`` whenever the outcome is 1. As a flag hint it is never applied;
    it names the data error a decoder should suspect when the flag fires.
    """

    meas: int
    pauli: PauliOperator


@dataclass(frozen=True)
class ScheduledCircuit:
    n_qubits: int
    ops: tuple[Op, ...]
    n_measurements: int
    detectors: tuple[Detector, ...] = ()
    observable: tuple[int, ...] = ()
    feedback: tuple[Feedback, ...] = ()
    basis: str = "Z"
    flags: tuple[Feedback, ...] = ()
    name: str = ""
    qubit_roles: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n_ticks(self) -> int:
        return (self.ops[-1].tick + 1) if self.ops else 0

    @property
    def n_locations(self) -> int:
        return len(self.ops)

    def measurement_ops(self) -> list[Op]:
        out: list[Op] = [None] * self.n_measurements  # type: ignore[list-item]
        for op in self.ops:
            if op.kind == "measure":
                out[op.meas] = op
        return out

    def detectors_of(self, pauli: str) -> list[int]:
        return [i for i, det in enumerate(self.detectors) if det.pauli == pauli]

    def check_schedule(self) -> None:
        """Raise if some qubit is used twice in one tick or ticks go backwards."""
        last = -1
        busy: set[int] = set()
        for op in self.ops:
            if op.tick < last:
                raise ValueError("operations are not sorted by tick")
            if op.tick != last:
                busy = set()
                last = op.tick
            for q in op.qubits:
                if q in busy:
                    raise ValueError(f"qubit {q} used twice in tick {op.tick}")
                busy.add(q)
        for det in self.detectors:
            if any(m < 0 or m >= self.n_measurements for m in det.meas):
                raise ValueError("detector references a missing measurement")

    def to_text(self) -> str:
        """Serialize to the line-oriented circuit format (see docs/formats.md)."""
        lines = [
            "# heavyhex-circuit v1",
            f"name {self.name or '-'}",
            f"basis {self.basis}",
            f"qubits {self.n_qubits}",
            f"measurements {self.n_measurements}",
        ]
        fb_by_meas: dict[int, list[Feedback]] = {}
        for fb in self.feedback:
            fb_by_meas.setdefault(fb.meas, []).append(fb)
        tick = -1
        pending: list[Feedback] = []
        for op in self.ops:
            if op.tick != tick:
                for fb in pending:
                    lines.append(f"feedback m_{fb.meas} {fb.pauli.to_string(with_phase=False)}")
                pending = []
                tick = op.tick
                lines.append(f"tick {tick}")
            lines.append(_op_text(op))
            if op.kind == "measure":
                pending.extend(fb_by_meas.get(op.meas, []))
        for fb in pending:
            lines.append(f"feedback m_{fb.meas} {fb.pauli.to_string(with_phase=False)}")
        for fl in self.flags:
            lines.append(f"flag m_{fl.meas} {fl.pauli.to_string(with_phase=False)}")
        for det in self.detectors:
            ms = " ".join(f"m_{m}" for m in det.meas)
            lines.append(f"detector {det.pauli} {det.coord[0]} {det.coord[1]} {ms}")
        lines.append("observable " + " ".join(f"m_{m}" for m in self.observable))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ScheduledCircuit:
        header: dict[str, str] = {}
        ops: list[Op] = []
        detectors: list[Detector] = []
        feedback: list[Feedback] = []
        flags: list[Feedback] = []
        observable: tuple[int, ...] = ()
        tick = -1
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, *rest = line.split()
            if head in ("name", "basis", "qubits", "measurements"):
                header[head] = rest[0] if rest else ""
            elif head == "tick":
                tick = int(rest[0])
            elif head == "detector":
                meas = tuple(_meas_ref(t) for t in rest[3:])
                detectors.append(Detector(meas, rest[0], (int(rest[1]), int(rest[2]))))
            elif head == "observable":
                observable = tuple(_meas_ref(t) for t in rest)
            elif head in ("feedback", "flag"):
                entry = Feedback(_meas_ref(rest[0]), PauliOperator.from_string(" ".join(rest[1:])))
                (feedback if head == "feedback" else flags).append(entry)
            else:
                ops.append(_parse_op(head, rest, tick))
        name = header.get("name", "")
        return cls(
            n_qubits=int(header["qubits"]),
            ops=tuple(ops),
            n_measurements=int(header["measurements"]),
            detectors=tuple(detectors),
            observable=observable,
            feedback=tuple(feedback),
            basis=header.get("basis", "Z"),
            flags=tuple(flags),
            name="" if name == "-" else name,
        )


def _op_text(op: Op) -> str:
    kind = op.kind
    if kind in ("measure", "initialize", "reset") and op.basis == "X":
        kind += "_x"
    qs = " ".join(str(q) for q in op.qubits)
    if op.kind == "measure":
        return f"{kind} {qs} -> m_{op.meas}"
    return f"{kind} {qs}"


def _meas_ref(token: str) -> int:
    if not token.startswith("m_"):
        raise ValueError(f"expected a measurement reference, got {token!r}")
    return int(token[2:])


def _parse_op(head: str, rest: list[str], tick: int) -> Op:
    basis = ""
    kind = head
    if head.endswith("_x"):
        kind, basis = head[:-2], "X"
    elif head in ("measure", "initialize", "reset"):
        basis = "Z"
    if kind not in OP_KINDS:
        raise ValueError(f"unknown operation {head!r}")
    if kind == "measure":
        return Op(kind, (int(rest[0]),), tick, basis, _meas_ref(rest[2]))
    return Op(kind, tuple(int(q) for q in rest), tick, basis)


class CircuitBuilder:
    """Accumulates operations in program order and schedules them ASAP.

    Args:
        n_qubits: total qubit count (data and auxiliary).
        idle_noise: insert an ``id`` location for every idle qubit-tick.
    """

    def __init__(self, n_qubits: int, idle_noise: bool = True):
        self.n_qubits = n_qubits
        self.idle_noise = idle_noise
        self._ops: list[Op] = []
        self._free = [0] * n_qubits  # first tick at which each qubit is free
        self._n_meas = 0
        self._feedback: list[Feedback] = []
        self._flags: list[Feedback] = []

    @property
    def n_measurements(self) -> int:
        return self._n_meas

    def _place(self, kind: str, qubits: tuple[int, ...], basis: str = "", meas: int = -1) -> Op:
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"qubit {q} out of range")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"repeated operand in {kind} {qubits}")
        tick = max(self._free[q] for q in qubits)
        op = Op(kind, qubits, tick, basis, meas)
        for q in qubits:
            self._free[q] = tick + 1
        self._ops.append(op)
        return op

    def barrier(self, qubits: Iterable[int] | None = None) -> None:
        """Align ``qubits`` (default: all) so later operations start together."""
        qs = range(self.n_qubits) if qubits is None else list(qubits)
        t = max((self._free[q] for q in qs), default=0)
        for q in qs:
            self._free[q] = t

    def cx(self, control: int, target: int) -> None:
        self._place("cx", (control, target))

    def gate(self, kind: str, qubit: int) -> None:
        if kind not in _ONE_QUBIT or kind in ("measure", "initialize", "reset"):
            raise ValueError(f"not a one-qubit gate: {kind}")
        self._place(kind, (qubit,))

    def h(self, qubit: int) -> None:
        self._place("h", (qubit,))

    def initialize(self, qubit: int, basis: str = "Z") -> None:
        self._place("initialize", (qubit,), _check_basis(basis))

    def reset(self, qubit: int, basis: str = "Z") -> None:
        self._place("reset", (qubit,), _check_basis(basis))

    def measure(self, qubit: int, basis: str = "Z") -> int:
        m = self._n_meas
        self._n_meas += 1
        self._place("measure", (qubit,), _check_basis(basis), m)
        return m

    def feedback(self, meas: int, pauli: PauliOperator) -> None:
        if not 0 <= meas < self._n_meas:
            raise IndexError("feedback refers to a missing measurement")
        self._feedback.append(Feedback(meas, pauli))

    def flag(self, meas: int, pauli: PauliOperator) -> None:
        """Annotate ``meas`` as a flag whose firing suggests ``pauli``."""
        if not 0 <= meas < self._n_meas:
            raise IndexError("flag refers to a missing measurement")
        self._flags.append(Feedback(meas, pauli))

    @property
    def flags(self) -> tuple[Feedback, ...]:
        return tuple(self._flags)

    def build(
        self,
        detectors: Sequence[Detector] = (),
        observable: Sequence[int] = (),
        basis: str = "Z",
        name: str = "",
        qubit_roles: Sequence[str] = (),
    ) -> ScheduledCircuit:
        order = sorted(range(len(self._ops)), key=lambda i: (self._ops[i].tick, i))
        ops = [self._ops[i] for i in order]
        if self.idle_noise:
            ops = _with_idles(ops, self.n_qubits)
        circuit = ScheduledCircuit(
            n_qubits=self.n_qubits,
            ops=tuple(ops),
            n_measurements=self._n_meas,
            detectors=tuple(detectors),
            observable=tuple(observable),
            feedback=tuple(self._feedback),
            basis=basis,
            flags=tuple(self._flags),
            name=name,
            qubit_roles=tuple(qubit_roles),
        )
        circuit.check_schedule()
        return circuit


def _check_basis(basis: str) -> str:
    basis = basis.upper()
    if basis not in ("X", "Z"):
        raise ValueError(f"basis must be X or Z, got {basis!r}")
    return basis


def _with_idles(ops: list[Op], n_qubits: int) -> list[Op]:
    """Insert one ``id`` per qubit per tick in which the qubit is live but idle.

    A qubit is live from its first operation to its last, except between a
    measurement and the next reset or initialization of that qubit.
    """
    by_qubit: list[list[Op]] = [[] for _ in range(n_qubits)]
    for op in ops:
        for q in op.qubits:
            by_qubit[q].append(op)
    idle_at: dict[int, list[int]] = {}
    for q, seq in enumerate(by_qubit):
        for prev, nxt in zip(seq, seq[1:]):
            if prev.kind == "measure" and nxt.kind in ("reset", "initialize"):
                continue
            for t in range(prev.tick + 1, nxt.tick):
                idle_at.setdefault(t, []).append(q)
    out: list[Op] = []
    i = 0
    n_ticks = (ops[-1].tick + 1) if ops else 0
    for t in range(n_ticks):
        while i < len(ops) and ops[i].tick == t:
            out.append(ops[i])
            i += 1
        for q in sorted(idle_at.get(t, ())):
            out.append(Op("id", (q,), t))
    return out


def enumerate_fault_locations(circuit: ScheduledCircuit) -> list[tuple[int, str, tuple[int, ...]]]:
    """``(location id, kind, qubits)`` for every operation, in circuit order."""
    return [(i, op.kind, op.qubits) for i, op in enumerate(circuit.ops)]
