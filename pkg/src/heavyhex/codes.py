"""Subsystem codes on the heavy-hex lattice.

Two CSS subsystem codes of odd distance ``d`` are provided:

* the rotated subsystem surface code (RSSC): weight-3 triangle gauges around
  face centers plus weight-2 boundary gauges; stabilizers of weight 6 in the
  bulk;
* the heavy-hexagon code (HHC): weight-2 X gauges and weight-4 Z plaquettes,
  with surface-code X stabilizers and Bacon-Shor Z stabilizers.

Gauge and stabilizer generators are :class:`~heavyhex.pauli.PauliOperator`
objects over the code's data qubits. Each stabilizer also records the gauge
generators whose product it is, which is what the syndrome circuits measure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .gf2 import RowBasis, independent_subset, rank
from .lattice import check_distance, data_index
from .pauli import PauliOperator, commutes

__all__ = [
    "SubsystemCode",
    "ValidationReport",
    "build_rssc",
    "build_hhc",
    "build_code",
    "validate_code",
    "code_distance_bruteforce",
    "DistanceBudgetExceeded",
    "EXCEEDS",
]

EXCEEDS = "exceeds max_weight"


@dataclass(frozen=True)
class SubsystemCode:
    """A CSS subsystem code with its gauge decomposition of the stabilizers.

    Attributes:
        gauges: gauge generators; ``gauge_labels[k]`` says where generator
            ``k`` lives: ``("X", "edge", r, j, fi, fj)`` for an RSSC triangle on
            edge ``(r, j)`` of face ``(fi, fj)``, ``("Z", "plaquette", i, j)``
            for an HHC plaquette, and so on.
        stabilizers: independent stabilizer generators.
        stabilizer_gauges: for stabilizer ``s``, the gauge indices whose
            product equals it.
        labels: qubit labels, ``("d", i, j)`` for grid data and ``("t", i, j)``
            for face centers.
    """

    kind: str
    d: int
    n: int
    gauges: tuple[PauliOperator, ...]
    gauge_labels: tuple[tuple, ...]
    stabilizers: tuple[PauliOperator, ...]
    stabilizer_gauges: tuple[tuple[int, ...], ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    labels: tuple[tuple, ...]
    gauge_qubits: int = 0
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def qubit(self, i: int, j: int) -> int:
        return self.index[("d", i, j)]

    def gauges_of(self, pauli: str) -> list[int]:
        """Indices of X-type (``"X"``) or Z-type (``"Z"``) gauge generators."""
        if pauli == "X":
            return [k for k, g in enumerate(self.gauges) if g.is_x_type()]
        return [k for k, g in enumerate(self.gauges) if g.is_z_type()]

    def stabilizers_of(self, pauli: str) -> list[int]:
        if pauli == "X":
            return [k for k, s in enumerate(self.stabilizers) if s.is_x_type()]
        return [k for k, s in enumerate(self.stabilizers) if s.is_z_type()]

    def sites(self) -> list[int]:
        """Data qubits of the logical-Z representative in order; site 0 is the
        corner it shares with the logical-X representative."""
        return [self.qubit(1, j) for j in range(1, self.d + 1)]

    def to_text(self) -> str:
        """Plain-text export (see docs/formats.md)."""
        lines = [
            "# heavyhex-code v1",
            f"kind {self.kind}",
            f"d {self.d}",
            f"n {self.n}",
            f"gauges {len(self.gauges)}",
            f"stabilizers {len(self.stabilizers)}",
            f"gauge_qubits {self.gauge_qubits}",
        ]
        for q, lab in enumerate(self.labels):
            lines.append(f"qubit {q} {lab[0]} {lab[1]} {lab[2]}")
        for g in self.gauges:
            lines.append("gauge " + g.to_string(with_phase=False))
        for s, parts in zip(self.stabilizers, self.stabilizer_gauges):
            lines.append("stabilizer " + s.to_string(with_phase=False)
                         + " = " + " ".join(f"g{k}" for k in parts))
        lines.append("logical_x " + self.logical_x.to_string(with_phase=False))
        lines.append("logical_z " + self.logical_z.to_string(with_phase=False))
        return "\n".join(lines) + "\n"


def _symplectic(p: PauliOperator, n: int) -> int:
    return p.x | (p.z << n)


def _finish(kind, d, idx, gauges, glabels, stab_parts) -> SubsystemCode:
    """Multiply out stabilizer candidates, keep an independent subset and
    derive the gauge-qubit count by rank."""
    n = len(idx)
    cands = []
    for parts in stab_parts:
        op = PauliOperator()
        for k in parts:
            op = op * gauges[k]
        cands.append((op.unsigned(), tuple(parts)))
    keep = independent_subset([_symplectic(op, n) for op, _ in cands])
    stabs = tuple(cands[i][0] for i in keep)
    parts = tuple(cands[i][1] for i in keep)
    r_g = rank(_symplectic(g, n) for g in gauges)
    g_count = (r_g - len(stabs)) // 2
    lz = PauliOperator.z_type(idx[("d", 1, j)] for j in range(1, d + 1))
    lx = PauliOperator.x_type(idx[("d", i, 1)] for i in range(1, d + 1))
    return SubsystemCode(kind, d, n, tuple(gauges), tuple(glabels), stabs, parts, lx, lz,
                         tuple(idx), g_count, dict(idx))


def build_rssc(d: int) -> SubsystemCode:
    """Rotated subsystem surface code of distance ``d``.

    Odd faces carry X triangles on their horizontal edges (rows ``i`` and
    ``i+1``) and Z triangles on their vertical edges (columns ``j`` and
    ``j+1``), each including the face center when it exists. Operators with
    fewer than two qubits left inside the grid are dropped. Stabilizers sit on
    even faces: the Z gauges of the two neighbouring vertical edges, and the X
    gauges of the two neighbouring horizontal edges.
    """
    check_distance(d)
    idx = data_index(d, rssc=True)
    gauges: list[PauliOperator] = []
    labels: list[tuple] = []
    where: dict[tuple, int] = {}

    def q(i, j):
        return idx.get(("d", i, j))

    for i in range(0, d + 1):
        for j in range(0, d + 1):
            if (i + j) % 2 == 0:
                continue
            t = idx.get(("t", i, j))
            extra = [t] if t is not None else []
            for r in (i, i + 1):
                pair = [v for v in (q(r, j), q(r, j + 1)) if v is not None]
                if len(pair) == 2:
                    where[("X", r, j)] = len(gauges)  # horizontal edge (r, j)-(r, j+1)
                    gauges.append(PauliOperator.x_type(pair + extra))
                    labels.append(("X", "edge", r, j, i, j))
            for c in (j, j + 1):
                pair = [v for v in (q(i, c), q(i + 1, c)) if v is not None]
                if len(pair) == 2:
                    where[("Z", i, c)] = len(gauges)  # vertical edge (i, c)-(i+1, c)
                    gauges.append(PauliOperator.z_type(pair + extra))
                    labels.append(("Z", "edge", i, c, i, j))
    stab_parts: list[list[int]] = []
    for i in range(0, d + 1):
        for j in range(0, d + 1):
            if (i + j) % 2:
                continue
            zs = [where[k] for k in (("Z", i, j), ("Z", i, j + 1)) if k in where]
            if zs:
                stab_parts.append(zs)
    for i in range(0, d + 1):
        for j in range(0, d + 1):
            if (i + j) % 2:
                continue
            xs = [where[k] for k in (("X", i, j), ("X", i + 1, j)) if k in where]
            if xs:
                stab_parts.append(xs)
    return _finish("RSSC", d, idx, gauges, labels, stab_parts)


def build_hhc(d: int) -> SubsystemCode:
    """Heavy-hexagon code of distance ``d``.

    Gauges: ``X_{i,j} X_{i,j+1}`` for every row ``i = 1..d``; Z plaquettes on
    ``(i, j)`` with ``i + j`` odd; boundary pairs ``Z_{2m-1,1} Z_{2m,1}`` and
    ``Z_{2m,d} Z_{2m+1,d}``. Stabilizers: X plaquettes with ``i + j`` even,
    the boundary X pairs of rows 1 and ``d``, and the Bacon-Shor products
    ``prod_j Z_{i,j} Z_{i+1,j}``.
    """
    check_distance(d)
    idx = data_index(d, rssc=False)
    gauges: list[PauliOperator] = []
    labels: list[tuple] = []
    where: dict[tuple, int] = {}

    def q(i, j):
        return idx[("d", i, j)]

    for i in range(1, d + 1):
        for j in range(1, d):
            where[("X", i, j)] = len(gauges)
            gauges.append(PauliOperator.x_type([q(i, j), q(i, j + 1)]))
            labels.append(("X", "pair", i, j))
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 == 1:
                where[("Z", i, j)] = len(gauges)
                gauges.append(PauliOperator.z_type([q(i, j), q(i, j + 1), q(i + 1, j), q(i + 1, j + 1)]))
                labels.append(("Z", "plaquette", i, j))
    for m in range(1, (d - 1) // 2 + 1):
        for i, c in ((2 * m - 1, 1), (2 * m, d)):
            where[("Zb", i, c)] = len(gauges)
            gauges.append(PauliOperator.z_type([q(i, c), q(i + 1, c)]))
            labels.append(("Z", "boundary", i, c))
    stab_parts: list[list[int]] = []
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 == 0:
                stab_parts.append([where[("X", i, j)], where[("X", i + 1, j)]])
    for m in range(1, (d - 1) // 2 + 1):
        stab_parts.append([where[("X", 1, 2 * m)]])
        stab_parts.append([where[("X", d, 2 * m - 1)]])
    for i in range(1, d):
        parts = [where[("Z", i, j)] for j in range(1, d) if ("Z", i, j) in where]
        parts += [where[k] for k in (("Zb", i, 1), ("Zb", i, d)) if k in where]
        stab_parts.append(parts)
    return _finish("HHC", d, idx, gauges, labels, stab_parts)


def build_code(kind: str, d: int) -> SubsystemCode:
    kind = kind.upper()
    if kind == "RSSC":
        return build_rssc(d)
    if kind == "HHC":
        return build_hhc(d)
    raise ValueError(f"unknown code kind {kind!r}")


@dataclass
class ValidationReport:
    commutation_violations: list[str] = field(default_factory=list)
    rank_deficiencies: list[str] = field(default_factory=list)
    logical_failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.commutation_violations or self.rank_deficiencies or self.logical_failures)

    def __len__(self) -> int:
        return len(self.lines())

    def lines(self) -> list[str]:
        return self.commutation_violations + self.rank_deficiencies + self.logical_failures


def validate_code(code: SubsystemCode) -> ValidationReport:
    """Check commutation, ranks and logical operators; an empty report means valid."""
    rep = ValidationReport()
    n = code.n
    for a, s in enumerate(code.stabilizers):
        for k, g in enumerate(code.gauges):
            if not commutes(s, g):
                rep.commutation_violations.append(f"stabilizer {a} anticommutes with gauge {k}")
        for b in range(a + 1, len(code.stabilizers)):
            if not commutes(s, code.stabilizers[b]):
                rep.commutation_violations.append(f"stabilizers {a} and {b} anticommute")
    lx, lz = code.logical_x, code.logical_z
    if commutes(lx, lz):
        rep.logical_failures.append("logical X and Z commute")
    for name, op in (("X", lx), ("Z", lz)):
        for k, g in enumerate(code.gauges):
            if not commutes(op, g):
                rep.logical_failures.append(f"logical {name} anticommutes with gauge {k}")
        if op.weight != code.d:
            rep.logical_failures.append(f"logical {name} has weight {op.weight}, expected {code.d}")
    stab_vecs = [_symplectic(s, n) for s in code.stabilizers]
    if rank(stab_vecs) != len(stab_vecs):
        rep.rank_deficiencies.append("stabilizer generators are dependent")
    gauge_basis = RowBasis()
    for g in code.gauges:
        gauge_basis.add(_symplectic(g, n))
    for a, s in enumerate(code.stabilizers):
        if not gauge_basis.contains(_symplectic(s, n)):
            rep.rank_deficiencies.append(f"stabilizer {a} is not in the gauge group")
    for a, (s, parts) in enumerate(zip(code.stabilizers, code.stabilizer_gauges)):
        prod = PauliOperator()
        for k in parts:
            prod = prod * code.gauges[k]
        if prod.unsigned() != s.unsigned():
            rep.rank_deficiencies.append(f"stabilizer {a} differs from its gauge product")
    for name, op in (("X", lx), ("Z", lz)):
        if gauge_basis.contains(_symplectic(op, n)):
            rep.logical_failures.append(f"logical {name} lies in the gauge group")
    r_g = len(gauge_basis)
    k = n - len(code.stabilizers) - (r_g - len(code.stabilizers)) // 2
    if (r_g - len(code.stabilizers)) % 2 or k != 1:
        rep.rank_deficiencies.append(f"code does not encode one qubit (k = {k})")
    return rep


class DistanceBudgetExceeded(RuntimeError):
    pass


def code_distance_bruteforce(code: SubsystemCode, max_weight: int, budget: int = 50_000_000):
    """Smallest weight of a dressed logical operator, or :data:`EXCEEDS`.

    A Pauli is a dressed logical when it commutes with every stabilizer and
    anticommutes with the bare logical X or Z (so it is not in the gauge
    group). Weights are enumerated upward; ``budget`` caps the number of
    Paulis examined.
    """
    n = code.n
    n_s = len(code.stabilizers)
    # syndrome bit set: stabilizers, then the two bare-logical bits
    single: list[list[int]] = []
    for q in range(n):
        row = []
        for letter in "XYZ":
            p = PauliOperator.single(letter, q)
            syn = 0
            for a, s in enumerate(code.stabilizers):
                if not commutes(p, s):
                    syn |= 1 << a
            if not commutes(p, code.logical_x):
                syn |= 1 << n_s
            if not commutes(p, code.logical_z):
                syn |= 1 << (n_s + 1)
            row.append(syn)
        single.append(row)
    stab_mask = (1 << n_s) - 1
    seen = 0
    for w in range(1, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            rows = [single[q] for q in support]
            for choice in itertools.product(*rows):
                seen += 1
                if seen > budget:
                    raise DistanceBudgetExceeded(f"more than {budget} Paulis examined")
                syn = 0
                for v in choice:
                    syn ^= v
                if syn & stab_mask == 0 and syn >> n_s:
                    return w
    return EXCEEDS
