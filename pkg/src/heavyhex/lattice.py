"""Heavy-hex qubit layouts for the two codes.

Data qubits of a distance-``d`` code sit on a ``d x d`` grid ``(i, j)`` with
``1 <= i, j <= d``. A *face* ``(i, j)`` (``0 <= i, j <= d``) has corners
``(i, j), (i+1, j), (i, j+1), (i+1, j+1)``; in the rotated subsystem surface
code faces with ``i + j`` odd carry the gauge triangles and, when all four
corners exist, a center data qubit ``t(i, j)``.

Vertices are indexed data qubits first (the code's own order), then auxiliary
qubits. Plot coordinates use a grid four times finer than the data grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "HeavyHexLattice",
    "check_distance",
    "data_index",
    "build_heavy_hex",
    "build_hhc_lattice",
]


def check_distance(d: int) -> None:
    if not isinstance(d, int) or d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be an odd integer >= 3, got {d!r}")


@dataclass(frozen=True)
class HeavyHexLattice:
    """Qubit graph with role tags.

    ``labels[v]`` names the vertex: ``("d", i, j)`` grid data, ``("t", i, j)``
    face centers, and code-specific auxiliary labels (see the builders).
    """

    d: int
    kind: str
    coords: tuple[tuple[int, int], ...]
    roles: tuple[str, ...]
    labels: tuple[tuple, ...]
    edges: tuple[tuple[int, int], ...]
    index: dict = field(compare=False, repr=False, default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def n_data(self) -> int:
        return sum(r == "data" for r in self.roles)

    def degree(self) -> list[int]:
        deg = [0] * self.n_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def neighbors(self, v: int) -> list[int]:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._edge_set()

    def _edge_set(self) -> set[tuple[int, int]]:
        cache = self.index.get("_edges")
        if cache is None:
            cache = {(min(a, b), max(a, b)) for a, b in self.edges}
            self.index["_edges"] = cache
        return cache

    def __getitem__(self, label) -> int:
        return self.index[label]

    def get(self, label, default=None):
        return self.index.get(label, default)


def data_index(d: int, rssc: bool) -> dict[tuple, int]:
    """Row-major grid data, then (for the RSSC) centers in (i, j) order."""
    idx: dict[tuple, int] = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            idx[("d", i, j)] = len(idx)
    if rssc:
        for i in range(1, d):
            for j in range(1, d):
                if (i + j) % 2 == 1:
                    idx[("t", i, j)] = len(idx)
    return idx


class _Builder:
    def __init__(self, d: int, kind: str, data: dict[tuple, int]):
        self.d = d
        self.kind = kind
        self.labels: list[tuple] = list(data)
        self.index: dict[tuple, int] = dict(data)
        self.roles = ["data"] * len(data)
        self.coords = [self._data_coord(lab) for lab in data]
        self.edges: list[tuple[int, int]] = []

    @staticmethod
    def _data_coord(label) -> tuple[int, int]:
        kind, i, j = label
        return (4 * i, 4 * j) if kind == "d" else (4 * i + 2, 4 * j + 2)

    def add(self, label, role: str, coord: tuple[int, int]) -> int:
        v = len(self.labels)
        self.labels.append(label)
        self.index[label] = v
        self.roles.append(role)
        self.coords.append(coord)
        return v

    def link(self, a: int, b: int) -> None:
        self.edges.append((min(a, b), max(a, b)))

    def done(self) -> HeavyHexLattice:
        return HeavyHexLattice(self.d, self.kind, tuple(self.coords), tuple(self.roles),
                               tuple(self.labels), tuple(self.edges), self.index)


def build_heavy_hex(d: int) -> HeavyHexLattice:
    """Heavy-hex embedding of the distance-``d`` rotated subsystem surface code.

    Auxiliary qubits:

    * ``("xa", r, j)``: one per horizontal data edge ``(r, j)-(r, j+1)``, linked
      to both ends and to the center of the face owning the edge;
    * ``("c1"|"c2"|"c3", i, c)``: three per weight-2 boundary Z pair
      ``(i, c)-(i+1, c)`` with ``c`` in ``{1, d}``; ``c1`` touches the upper
      data qubit, ``c2`` the lower one, ``c3`` joins ``c1`` and ``c2``.

    The vertex count is ``5 d^2 / 2 + d - 5 / 2``.
    """
    check_distance(d)
    b = _Builder(d, "RSSC", data_index(d, rssc=True))
    for r in range(1, d + 1):
        for j in range(1, d):
            # the face above the edge is (r-1, j), the one below is (r, j)
            face = (r - 1, j) if (r - 1 + j) % 2 else (r, j)
            below = face == (r, j)
            v = b.add(("xa", r, j), "measure", (4 * r + (1 if below else -1), 4 * j + 2))
            b.link(v, b.index[("d", r, j)])
            b.link(v, b.index[("d", r, j + 1)])
            t = b.index.get(("t",) + face)
            if t is not None:
                b.link(v, t)
    for c in (1, d):
        for i in range(1, d):
            face_col = 0 if c == 1 else d
            if (i + face_col) % 2 == 0:
                continue
            side = -1 if c == 1 else 1
            c1 = b.add(("c1", i, c), "measure", (4 * i + 1, 4 * c + 2 * side))
            c2 = b.add(("c2", i, c), "measure", (4 * i + 3, 4 * c + 2 * side))
            c3 = b.add(("c3", i, c), "measure", (4 * i + 2, 4 * c + 3 * side))
            b.link(c1, b.index[("d", i, c)])
            b.link(c2, b.index[("d", i + 1, c)])
            b.link(c1, c3)
            b.link(c2, c3)
    return b.done()


def build_hhc_lattice(d: int) -> HeavyHexLattice:
    """Heavy-hex layout of the distance-``d`` heavy-hexagon code.

    ``("b", i, j)`` bridges data ``(i, j)`` and ``(i, j+1)`` (role ``flag``);
    ``("s", i, j)`` measures the Z plaquette ``(i, j)`` (``i + j`` odd) through
    the bridges ``("b", i, j)`` and ``("b", i+1, j)``; ``("v", i, c)`` measures
    the boundary Z pair ``(i, c)-(i+1, c)``.
    """
    check_distance(d)
    b = _Builder(d, "HHC", data_index(d, rssc=False))
    for i in range(1, d + 1):
        for j in range(1, d):
            v = b.add(("b", i, j), "flag", (4 * i, 4 * j + 2))
            b.link(v, b.index[("d", i, j)])
            b.link(v, b.index[("d", i, j + 1)])
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 == 1:
                s = b.add(("s", i, j), "measure", (4 * i + 2, 4 * j + 2))
                b.link(s, b.index[("b", i, j)])
                b.link(s, b.index[("b", i + 1, j)])
    for i, c in _hhc_boundary_pairs(d):
        side = -1 if c == 1 else 1
        v = b.add(("v", i, c), "measure", (4 * i + 2, 4 * c + 2 * side))
        b.link(v, b.index[("d", i, c)])
        b.link(v, b.index[("d", i + 1, c)])
    return b.done()


def _hhc_boundary_pairs(d: int) -> list[tuple[int, int]]:
    out = [(2 * m - 1, 1) for m in range(1, (d - 1) // 2 + 1)]
    out += [(2 * m, d) for m in range(1, (d - 1) // 2 + 1)]
    return out
