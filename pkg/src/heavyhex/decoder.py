"""Matching decoders built from single-fault enumeration.

The decoding graph of a check type ``P`` has one node per ``P`` detector and
one boundary node. Every basis fault of the circuit is propagated once; its
``P`` signature becomes an edge (two detectors), a boundary edge (one
detector) or, for longer signatures, a set of edges. Faults landing on the
same edge combine as independent flips. Edge weights are
``log((1 - p) / p)``.

Flag detectors (type ``F``) never enter a graph. Each flag carries a hint, a
data error to suspect when it fires; when a shot fires the flag together with
every detector of the hint's signature, that signature is removed and the
hint's logical flip is added to the prediction. Fault signatures go through
the same step before edges are formed.

The structure (which faults feed which edge) depends only on the circuit and
is computed once; each noise instance just reweights it. In *aware* mode edge
probabilities come from the per-location rates; in *naive* mode every
location uses the mean rate of its operation kind.

Two matching routes are provided. :func:`mwpm_decode` runs Dijkstra from each
defect, forms the complete defect graph with one boundary copy per defect and
solves it exactly with the blossom algorithm from networkx. The batch route
hands the same weighted graph to PyMatching. Both solve the same
minimum-weight problem; tests compare them.
"""

from __future__ import annotations

import heapq
import math
import weakref
from collections.abc import Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
import pymatching
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .circuits.core import ScheduledCircuit
from .faults import fault_signatures
from .frame import LOC_CX, LOC_GATE1, FrameSimulator, location_classes, unpack_shots
from .noise import NoiseAssignment

__all__ = [
    "P_FLOOR",
    "W_CAP",
    "edge_weight",
    "combine_flips",
    "FaultStructure",
    "fault_structure",
    "DetectorGraph",
    "deflag_rules",
    "apply_deflag",
    "build_detector_graph",
    "fault_probabilities",
    "PathTable",
    "dijkstra_paths",
    "MatchingResult",
    "mwpm_decode",
    "brute_force_matching",
    "MatchingDecoder",
    "DecodeResult",
    "decode_batch",
]

P_FLOOR = 1e-14
W_CAP = math.log((1 - P_FLOOR) / P_FLOOR)


def edge_weight(p: float, floor: float = P_FLOOR) -> float:
    """``log((1 - p) / p)``, with ``p`` raised to ``floor`` first."""
    if not 0 < p < 1:
        raise ValueError(f"edge probability must lie in (0, 1), got {p}")
    p = max(p, floor)
    return math.log((1 - p) / p)


def combine_flips(probs) -> float:
    """Probability that an odd number of independent events occur."""
    prod = 1.0
    for p in probs:
        prod *= 1 - 2 * p
    return 0.5 * (1 - prod)


# -- structure -----------------------------------------------------------------

@dataclass(frozen=True)
class FaultStructure:
    """Which basis faults feed which edge, for one check type.

    ``inc_fault[k]`` feeds edge ``inc_edge[k]``; a decomposed hyperedge feeds
    several edges. Node ``len(detectors)`` is the boundary.
    """

    basis: str
    detectors: tuple[int, ...]
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_flip: np.ndarray
    deflag: tuple
    fault_loc: np.ndarray
    fault_code: np.ndarray
    inc_fault: np.ndarray
    inc_edge: np.ndarray
    hyperedges: int = 0
    chained: int = 0
    flip_conflicts: int = 0
    undetectable_logical: int = 0

    @property
    def boundary(self) -> int:
        return len(self.detectors)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)


_STRUCTURE_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _signatures(circuit: ScheduledCircuit):
    cached = _STRUCTURE_CACHE.get(circuit)
    if cached is None:
        cached = {"sig": fault_signatures(circuit)}
        _STRUCTURE_CACHE[circuit] = cached
    return cached


def fault_structure(circuit: ScheduledCircuit, basis: str) -> FaultStructure:
    """Fault-to-edge structure of the ``basis`` graph (cached per circuit)."""
    cache = _signatures(circuit)
    key = ("structure", basis)
    if key not in cache:
        cache[key] = _build_structure(circuit, basis, *cache["sig"])
    return cache[key]


def deflag_rules(circuit: ScheduledCircuit, basis: str) -> tuple:
    """``(flag detector, graph nodes, flip)`` for every flag hint whose
    signature touches the ``basis`` graph."""
    if not circuit.flags:
        return ()
    det_ids = circuit.detectors_of(basis)
    local = {g: i for i, g in enumerate(det_ids)}
    flag_det = {circuit.detectors[k].meas[0]: k for k in circuit.detectors_of("F")}
    # each qubit of a hint is hit right after its CX with the flag, before
    # it moves on to later cycles or its readout
    hint_support = {fl.meas: fl.pauli.support for fl in circuit.flags}
    cx_of: dict[int, list] = {}
    tick_of: dict[tuple[int, int], int] = {}
    for op in circuit.ops:
        if op.kind == "cx":
            for q in op.qubits:
                cx_of.setdefault(q, []).append(op)
        elif op.kind == "measure" and op.meas in hint_support:
            f = op.qubits[0]
            for g in cx_of.get(f, ()):
                for q in set(g.qubits) & hint_support[op.meas]:
                    tick_of[op.meas, q] = g.tick
            cx_of[f] = []
    by_tick: dict[int, list] = {}
    for shot, fl in enumerate(circuit.flags):
        for q in fl.pauli.support:
            tk = tick_of.get((fl.meas, q))
            if tk is None:
                raise ValueError(f"flag m_{fl.meas} never meets qubit {q}")
            by_tick.setdefault(tk, []).append((shot, q, (fl.pauli.x >> q) & 1, (fl.pauli.z >> q) & 1))

    def hook(tick, X, Z, rec):
        for shot, q, x, z in by_tick.get(tick, ()):
            w, bit = shot >> 6, np.uint64(1 << (shot & 63))
            if x:
                X[q, w] ^= bit
            if z:
                Z[q, w] ^= bit

    n = len(circuit.flags)
    flips = FrameSimulator(circuit).run(n, hook=hook)
    bits = unpack_shots(flips, n).T
    rules = []
    for shot, fl in enumerate(circuit.flags):
        if fl.meas not in flag_det:
            raise ValueError(f"flag m_{fl.meas} has no F detector")
        fired = [g for g, det in enumerate(circuit.detectors)
                 if det.pauli == basis and np.bitwise_xor.reduce(bits[shot, list(det.meas)])]
        if fired:
            obs = bool(np.bitwise_xor.reduce(bits[shot, list(circuit.observable)])) if circuit.observable else False
            rules.append((flag_det[fl.meas], tuple(local[g] for g in fired), obs))
    return tuple(rules)


def apply_deflag(rules, full: np.ndarray, syn: np.ndarray) -> np.ndarray:
    """Remove matched hint signatures from ``syn`` in place.

    ``full`` holds all detector bits per shot (for the flags). Returns the
    per-shot logical correction.
    """
    corr = np.zeros(len(syn), dtype=bool)
    for fd, nodes, flip in rules:
        nodes = list(nodes)
        hit = full[:, fd] & syn[:, nodes].all(axis=1)
        if hit.any():
            syn[np.ix_(hit, nodes)] ^= True
            if flip:
                corr ^= hit
    return corr


def _build_structure(circuit, basis, locs, codes, dets, obs) -> FaultStructure:
    det_ids = circuit.detectors_of(basis)
    if not det_ids:
        raise ValueError(f"circuit has no {basis} detectors")
    boundary = len(det_ids)
    sub = dets[:, det_ids].copy()
    rules = deflag_rules(circuit, basis)
    obs = obs ^ apply_deflag(rules, dets, sub)
    coords = [circuit.detectors[g].coord for g in det_ids]
    rows = [np.flatnonzero(r) for r in sub]
    edges: dict[tuple[int, int], int] = {}
    flips: list[bool] = []
    conflicts = 0

    def edge_id(u, v, flip):
        nonlocal conflicts
        key = (u, v) if u < v else (v, u)
        e = edges.get(key)
        if e is None:
            e = edges[key] = len(flips)
            flips.append(bool(flip))
        elif flips[e] != bool(flip):
            conflicts += 1
        return e

    inc_f, inc_e = [], []
    undetectable = 0
    long_faults = []
    for f, r in enumerate(rows):
        if r.size == 0:
            undetectable += int(obs[f])
            continue
        if r.size == 1:
            inc_f.append(f)
            inc_e.append(edge_id(int(r[0]), boundary, obs[f]))
        elif r.size == 2:
            inc_f.append(f)
            inc_e.append(edge_id(int(r[0]), int(r[1]), obs[f]))
        else:
            long_faults.append(f)
    known = {k: flips[e] for k, e in edges.items()}
    chained = 0
    for f in long_faults:
        nodes = [int(x) for x in rows[f]]
        parts = _split_known(nodes, bool(obs[f]), known, boundary)
        if parts is None:
            chained += 1
            parts = _chain(nodes, bool(obs[f]), coords, boundary)
        for u, v, fl in parts:
            inc_f.append(f)
            inc_e.append(edge_id(u, v, fl))
    keys = list(edges)
    return FaultStructure(
        basis=basis,
        detectors=tuple(det_ids),
        edge_u=np.array([k[0] for k in keys], dtype=np.int64),
        edge_v=np.array([k[1] for k in keys], dtype=np.int64),
        edge_flip=np.array(flips, dtype=bool),
        deflag=rules,
        fault_loc=locs,
        fault_code=codes,
        inc_fault=np.array(inc_f, dtype=np.int64),
        inc_edge=np.array(inc_e, dtype=np.int64),
        hyperedges=len(long_faults),
        chained=chained,
        flip_conflicts=conflicts,
        undetectable_logical=undetectable,
    )


def _split_known(nodes, flip, known, boundary):
    """Partition ``nodes`` into existing edges whose flips XOR to ``flip``."""

    def rec(rest, acc_flip):
        if not rest:
            return [] if acc_flip == flip else None
        u, tail = rest[0], rest[1:]
        options = [(v, i) for i, v in enumerate(tail) if (u, v) in known]
        for v, i in options:
            got = rec(tail[:i] + tail[i + 1:], acc_flip ^ known[(u, v)])
            if got is not None:
                return [(u, v, known[(u, v)])] + got
        if (u, boundary) in known:
            got = rec(tail, acc_flip ^ known[(u, boundary)])
            if got is not None:
                return [(u, boundary, known[(u, boundary)])] + got
        return None

    return rec(sorted(nodes), False)


def _chain(nodes, flip, coords, boundary):
    order = sorted(nodes, key=lambda n: (coords[n], n))
    parts = []
    for i in range(0, len(order) - 1, 2):
        parts.append((order[i], order[i + 1], False))
    if len(order) % 2:
        parts.append((order[-1], boundary, False))
    u, v, _ = parts[0]
    parts[0] = (u, v, flip)
    return parts


# -- weighting -----------------------------------------------------------------

def _channel_probabilities(cls, rates, bias, codes) -> np.ndarray:
    out = rates.copy()  # measure / prep flips
    g1 = cls == LOC_GATE1
    cx = cls == LOC_CX
    out[g1] = np.select(
        [bias[g1] == 1, bias[g1] == 2],
        [rates[g1] * (codes[g1] == 2), rates[g1] * (codes[g1] == 1)],
        rates[g1] / 3)
    z2 = np.isin(codes[cx], (2, 8, 10))
    x2 = np.isin(codes[cx], (1, 4, 5))
    out[cx] = np.select(
        [bias[cx] == 1, bias[cx] == 2],
        [rates[cx] * z2 / 3, rates[cx] * x2 / 3],
        rates[cx] / 15)
    return out


def _split_probabilities(circuit, assignment, locs, codes) -> tuple[np.ndarray, np.ndarray]:
    """Per-fault probabilities of the main and the base channel separately."""
    cls = location_classes(circuit)["cls"][locs]
    rates = np.asarray(assignment.rates, dtype=float)[locs]
    bias = np.asarray(assignment.bias)[locs]
    main = _channel_probabilities(cls, rates, bias, codes)
    base = np.asarray(assignment.base, dtype=float)[locs]
    under = _channel_probabilities(cls, base, np.zeros_like(bias), codes) if base.any() else np.zeros_like(main)
    return main, under


def fault_probabilities(circuit: ScheduledCircuit, assignment: NoiseAssignment,
                        locs: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Probability of each basis fault ``(locs[i], codes[i])`` under ``assignment``.

    With a base channel the two independent draws are composed: the net
    Pauli is ``codes[i]`` when exactly one of them produces it.
    """
    main, under = _split_probabilities(circuit, assignment, locs, codes)
    return main + under - 2 * main * under


@dataclass(frozen=True)
class DetectorGraph:
    """Weighted decoding graph of one check type.

    Node ``i < boundary`` is circuit detector ``detectors[i]``; node
    ``boundary`` is the boundary. ``sources[e]`` lists the fault locations
    contributing to edge ``e``.
    """

    basis: str
    mode: str
    detectors: tuple[int, ...]
    edge_u: np.ndarray
    edge_v: np.ndarray
    p: np.ndarray
    w: np.ndarray
    flip: np.ndarray
    deflag: tuple = ()
    sources: tuple[tuple[int, ...], ...] = field(default=(), compare=False, repr=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def boundary(self) -> int:
        return len(self.detectors)

    @property
    def n_nodes(self) -> int:
        return len(self.detectors) + 1

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def adjacency(self) -> list[list[tuple[int, float, bool, int]]]:
        adj = self._cache.get("adj")
        if adj is None:
            adj = [[] for _ in range(self.n_nodes)]
            for e, (u, v) in enumerate(zip(self.edge_u.tolist(), self.edge_v.tolist())):
                w, f = float(self.w[e]), bool(self.flip[e])
                adj[u].append((v, w, f, e))
                adj[v].append((u, w, f, e))
            self._cache["adj"] = adj
        return adj

    def csr(self) -> sp.csr_matrix:
        m = self._cache.get("csr")
        if m is None:
            # csgraph drops explicit zeros, so zero weights are nudged up
            w = np.maximum(self.w, 1e-300)
            n = self.n_nodes
            m = sp.coo_matrix((np.concatenate([w, w]),
                               (np.concatenate([self.edge_u, self.edge_v]),
                                np.concatenate([self.edge_v, self.edge_u]))), shape=(n, n)).tocsr()
            self._cache["csr"] = m
        return m

    def syndrome(self, detector_bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Graph syndromes and logical corrections from full detector rows
        ``(shots, n_detectors)``, after deflagging."""
        full = np.asarray(detector_bits, dtype=bool)
        syn = full[:, list(self.detectors)].copy()
        return syn, apply_deflag(self.deflag, full, syn)

    def weights_equal(self, other: DetectorGraph) -> bool:
        return (np.array_equal(self.edge_u, other.edge_u) and np.array_equal(self.edge_v, other.edge_v)
                and np.array_equal(self.w, other.w))

    def to_text(self) -> str:
        """Export as ``node`` / ``edge u v p w flip`` lines (docs/formats.md)."""
        lines = ["# heavyhex-graph v1", f"basis {self.basis}", f"mode {self.mode}",
                 f"nodes {self.n_nodes}", f"boundary {self.boundary}"]
        for i, g in enumerate(self.detectors):
            lines.append(f"node {i} {g}")
        lines.append(f"node {self.boundary} boundary")
        for e in range(self.n_edges):
            lines.append(f"edge {self.edge_u[e]} {self.edge_v[e]} {float(self.p[e])!r} {float(self.w[e])!r} "
                         f"{int(self.flip[e])}")
        for fd, nodes, flip in self.deflag:
            lines.append(f"deflag {fd} {int(flip)} " + " ".join(str(n) for n in nodes))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> DetectorGraph:
        head: dict[str, str] = {}
        dets: list[int] = []
        eu, ev, ep, ew, ef = [], [], [], [], []
        rules = []
        for raw in text.splitlines():
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "node":
                if parts[2] != "boundary":
                    dets.append(int(parts[2]))
            elif parts[0] == "edge":
                eu.append(int(parts[1]))
                ev.append(int(parts[2]))
                ep.append(float(parts[3]))
                ew.append(float(parts[4]))
                ef.append(parts[5] == "1")
            elif parts[0] == "deflag":
                rules.append((int(parts[1]), tuple(int(x) for x in parts[3:]), parts[2] == "1"))
            else:
                head[parts[0]] = parts[1]
        return cls(head["basis"], head["mode"], tuple(dets), np.array(eu, dtype=np.int64),
                   np.array(ev, dtype=np.int64), np.array(ep), np.array(ew), np.array(ef, dtype=bool),
                   tuple(rules))


def build_detector_graph(circuit: ScheduledCircuit, assignment: NoiseAssignment,
                         mode: str = "aware", basis: str | None = None, floor: float = P_FLOOR):
    """Decoding graph(s) of ``circuit`` weighted by ``assignment``.

    With ``basis=None`` a dict ``{"X": graph, "Z": graph}`` is returned for
    every check type the circuit has; otherwise the single graph.
    """
    if mode not in ("aware", "naive"):
        raise ValueError(f"mode must be aware or naive, got {mode!r}")
    if assignment.n_locations != circuit.n_locations:
        raise ValueError("assignment does not cover the circuit's locations")
    if basis is None:
        return {b: build_detector_graph(circuit, assignment, mode, b, floor)
                for b in ("X", "Z") if circuit.detectors_of(b)}
    st = fault_structure(circuit, basis)
    source = assignment if mode == "aware" else assignment.naive()
    channels = _split_probabilities(circuit, source, st.fault_loc, st.fault_code)
    p = _edge_probabilities(st, channels, floor)
    w = np.log((1 - p) / p)
    srcs = _edge_sources(st)
    return DetectorGraph(basis, mode, st.detectors, st.edge_u, st.edge_v, p, w, st.edge_flip,
                         st.deflag, srcs)


def _edge_probabilities(st: FaultStructure, channels, floor: float) -> np.ndarray:
    """Flip probability of each edge.

    The Paulis one channel draws at one location exclude each other, so
    their probabilities add per (location, edge); distinct locations and
    channels are independent and combine by parity.
    """
    loc = st.fault_loc[st.inc_fault]
    pairs, group = np.unique(np.stack([st.inc_edge, loc]), axis=1, return_inverse=True)
    group = np.asarray(group).reshape(-1)
    edge_of = pairs[0]
    factors = []
    for pf in channels:
        summed = np.bincount(group, weights=pf[st.inc_fault], minlength=pairs.shape[1])
        factors.append(1 - 2 * summed)
    factor = np.concatenate(factors)
    edges = np.tile(edge_of, len(channels))
    sign = np.bincount(edges, weights=(factor < 0).astype(float), minlength=st.n_edges)
    with np.errstate(divide="ignore"):
        logs = np.bincount(edges, weights=np.log(np.abs(factor)), minlength=st.n_edges)
    prod = np.exp(logs) * np.where(sign % 2 == 1, -1.0, 1.0)
    p = 0.5 * (1 - prod)
    return np.clip(p, floor, 0.5)


def _edge_sources(st: FaultStructure) -> tuple[tuple[int, ...], ...]:
    locs = st.fault_loc[st.inc_fault]
    order = np.lexsort((locs, st.inc_edge))
    e_sorted, l_sorted = st.inc_edge[order], locs[order]
    bounds = np.searchsorted(e_sorted, np.arange(st.n_edges + 1))
    return tuple(tuple(np.unique(l_sorted[bounds[e]:bounds[e + 1]]).tolist()) for e in range(st.n_edges))


# -- shortest paths ----------------------------------------------------------

@dataclass(frozen=True)
class PathTable:
    """Shortest paths among ``active`` nodes and to the boundary.

    ``dist[i, j]`` / ``flip[i, j]`` for active nodes ``i, j``; ``bdist[i]`` /
    ``bflip[i]`` to the boundary. ``paths[(i, j)]`` holds edge ids when kept
    (``j = -1`` for the boundary).
    """

    active: tuple[int, ...]
    dist: np.ndarray
    flip: np.ndarray
    bdist: np.ndarray
    bflip: np.ndarray
    paths: dict = field(default_factory=dict)


def _dijkstra(adj, src: int):
    """Heap Dijkstra. Among equal-length paths the one through the node
    settled first wins; the heap pops ``(distance, node)`` so that order is
    lexicographic."""
    n = len(adj)
    dist = [math.inf] * n
    flip = [False] * n
    pred = [-1] * n
    done = [False] * n
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w, f, e in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                flip[v] = flip[u] ^ f
                pred[v] = e
                heapq.heappush(heap, (nd, v))
    return dist, flip, pred


def _walk(graph: DetectorGraph, pred, src, dst) -> tuple[int, ...]:
    out = []
    v = dst
    while v != src:
        e = pred[v]
        if e < 0:
            raise ValueError(f"node {dst} unreachable from {src}")
        out.append(e)
        u, w = int(graph.edge_u[e]), int(graph.edge_v[e])
        v = u if w == v else w
    return tuple(reversed(out))


def dijkstra_paths(graph: DetectorGraph, active: Sequence[int], keep_paths: bool = True,
                   method: str = "heap") -> PathTable:
    """Exact shortest paths between ``active`` nodes and to the boundary.

    ``method="heap"`` is the reference implementation; ``"scipy"`` uses
    :func:`scipy.sparse.csgraph.dijkstra` and recovers flips from the
    predecessor tree.
    """
    active = tuple(int(a) for a in active)
    k = len(active)
    dist = np.zeros((k, k))
    flip = np.zeros((k, k), dtype=bool)
    bdist = np.zeros(k)
    bflip = np.zeros(k, dtype=bool)
    paths: dict = {}
    b = graph.boundary
    if method == "scipy" and k:
        d_all, pred_all = _csgraph_dijkstra(graph.csr(), indices=list(active), return_predecessors=True)
        emap = _edge_lookup(graph)
        for i, a in enumerate(active):
            targets = list(active) + [b]
            for j, tgt in enumerate(targets):
                if not math.isfinite(d_all[i, tgt]):
                    raise ValueError(f"node {tgt} unreachable from {a}")
                f, edges = False, []
                v = tgt
                while v != a:
                    u = int(pred_all[i, v])
                    e = emap[(min(u, v), max(u, v))]
                    f ^= bool(graph.flip[e])
                    edges.append(e)
                    v = u
                if j < k:
                    dist[i, j], flip[i, j] = d_all[i, tgt], f
                    if keep_paths:
                        paths[(a, tgt)] = tuple(reversed(edges))
                else:
                    bdist[i], bflip[i] = d_all[i, b], f
                    if keep_paths:
                        paths[(a, -1)] = tuple(reversed(edges))
        return PathTable(active, dist, flip, bdist, bflip, paths)
    if method != "heap" and k:
        raise ValueError(f"unknown method {method!r}")
    adj = graph.adjacency()
    for i, a in enumerate(active):
        d, f, pred = _dijkstra(adj, a)
        if not math.isfinite(d[b]):
            raise ValueError(f"node {a} is disconnected from the boundary")
        for j, c in enumerate(active):
            if not math.isfinite(d[c]):
                raise ValueError(f"node {c} unreachable from {a}")
            dist[i, j], flip[i, j] = d[c], f[c]
            if keep_paths and j > i:
                paths[(a, c)] = _walk(graph, pred, a, c)
        bdist[i], bflip[i] = d[b], f[b]
        if keep_paths:
            paths[(a, -1)] = _walk(graph, pred, a, b)
    return PathTable(active, dist, flip, bdist, bflip, paths)


def _edge_lookup(graph: DetectorGraph) -> dict:
    m = graph._cache.get("emap")
    if m is None:
        m = {}
        for e, (u, v) in enumerate(zip(graph.edge_u.tolist(), graph.edge_v.tolist())):
            key = (min(u, v), max(u, v))
            if key not in m or graph.w[e] < graph.w[m[key]]:
                m[key] = e
        graph._cache["emap"] = m
    return m


# -- matching --------------------------------------------------------------------

@dataclass(frozen=True)
class MatchingResult:
    """Matched pairs (``v = -1`` for the boundary), total weight, flip."""

    pairs: tuple[tuple[int, int], ...]
    weight: float
    flip: bool


def _complete_weights(table: PathTable) -> np.ndarray:
    """Weights of the defect graph with one boundary copy per defect.

    Nodes ``0..k-1`` are defects, ``k..2k-1`` their boundary copies; copies
    are joined to each other at weight 0.
    """
    k = len(table.active)
    W = np.full((2 * k, 2 * k), np.inf)
    W[:k, :k] = table.dist
    W[k:, k:] = 0.0
    for i in range(k):
        W[i, k + i] = W[k + i, i] = table.bdist[i]
        W[i, i] = W[k + i, k + i] = np.inf
    return W


def _blossom(W: np.ndarray) -> list[tuple[int, int]]:
    n = len(W)
    finite = W[np.isfinite(W)]
    big = (finite.max() if finite.size else 0.0) + 1.0
    G = nx.Graph()
    G.add_nodes_from(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if math.isfinite(W[i, j]):
                G.add_edge(i, j, weight=big - W[i, j])
    m = nx.max_weight_matching(G, maxcardinality=True)
    pairs = sorted((min(a, b), max(a, b)) for a, b in m)
    if 2 * len(pairs) != n:
        raise RuntimeError("no perfect matching on the defect graph")
    return pairs


def brute_force_matching(W: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    """Minimum-weight perfect matching by enumeration (small instances)."""
    n = len(W)
    if n % 2:
        raise ValueError("need an even number of nodes")
    if n > 14:
        raise ValueError("brute force limited to 14 nodes")
    best = [math.inf, []]

    def rec(free, acc, pairs):
        if acc >= best[0]:
            return
        if not free:
            best[0], best[1] = acc, list(pairs)
            return
        i = free[0]
        for idx in range(1, len(free)):
            j = free[idx]
            if math.isfinite(W[i, j]):
                pairs.append((i, j))
                rec(free[1:idx] + free[idx + 1:], acc + W[i, j], pairs)
                pairs.pop()

    rec(list(range(n)), 0.0, [])
    return best[0], best[1]


def mwpm_decode(graph: DetectorGraph, syndrome, cache: dict | None = None) -> MatchingResult:
    """Exact minimum-weight perfect matching of the defects in ``syndrome``."""
    syn = np.asarray(syndrome, dtype=bool)
    if syn.shape != (graph.boundary,):
        raise ValueError(f"syndrome has length {syn.shape}, graph has {graph.boundary} detectors")
    active = tuple(np.flatnonzero(syn).tolist())
    if cache is not None and active in cache:
        return cache[active]
    if not active:
        res = MatchingResult((), 0.0, False)
    else:
        table = dijkstra_paths(graph, active, keep_paths=False)
        k = len(active)
        W = _complete_weights(table)
        weight, flip, pairs = 0.0, False, []
        for i, j in _blossom(W):
            if j < k:
                weight += table.dist[i, j]
                flip ^= bool(table.flip[i, j])
                pairs.append((active[i], active[j]))
            elif i < k:
                weight += table.bdist[i]
                flip ^= bool(table.bflip[i])
                pairs.append((active[i], -1))
        res = MatchingResult(tuple(sorted(pairs)), float(weight), flip)
    if cache is not None:
        cache[active] = res
    return res


class MatchingDecoder:
    """Batch decoder over one graph.

    ``backend="pymatching"`` (default) is fast; ``"blossom"`` runs
    :func:`mwpm_decode` per distinct syndrome.
    """

    def __init__(self, graph: DetectorGraph, backend: str = "pymatching"):
        if backend not in ("pymatching", "blossom"):
            raise ValueError(f"unknown backend {backend!r}")
        self.graph = graph
        self.backend = backend
        self._cache: dict = {}
        if backend == "pymatching":
            m = pymatching.Matching()
            b = graph.boundary
            for e in range(graph.n_edges):
                u, v = int(graph.edge_u[e]), int(graph.edge_v[e])
                ids = {0} if graph.flip[e] else set()
                if v == b:
                    m.add_boundary_edge(u, fault_ids=ids, weight=float(graph.w[e]),
                                        error_probability=float(graph.p[e]), merge_strategy="smallest-weight")
                else:
                    m.add_edge(u, v, fault_ids=ids, weight=float(graph.w[e]),
                               error_probability=float(graph.p[e]), merge_strategy="smallest-weight")
            self._matching = m

    def decode(self, syndromes: np.ndarray) -> np.ndarray:
        """Predicted flips for ``(shots, boundary)`` boolean syndromes."""
        syn = np.asarray(syndromes, dtype=np.uint8)
        if syn.ndim != 2 or syn.shape[1] != self.graph.boundary:
            raise ValueError("syndrome matrix has the wrong width")
        if self.backend == "pymatching":
            if syn.shape[0] == 0:
                return np.zeros(0, dtype=bool)
            n = self._matching.num_detectors
            if n < syn.shape[1]:
                if syn[:, n:].any():
                    raise ValueError("syndrome fires a detector with no edges")
                syn = np.ascontiguousarray(syn[:, :n])
            out = self._matching.decode_batch(syn)
            return out[:, 0].astype(bool) if out.ndim == 2 else out.astype(bool)
        pred = np.zeros(len(syn), dtype=bool)
        uniq, inv = np.unique(syn, axis=0, return_inverse=True)
        flips = np.array([mwpm_decode(self.graph, row, self._cache).flip for row in uniq], dtype=bool)
        pred[:] = flips[np.asarray(inv).reshape(-1)]
        return pred


@dataclass(frozen=True)
class DecodeResult:
    shots: int
    failures: int
    predicted: np.ndarray = field(repr=False, compare=False)

    @property
    def rate(self) -> float:
        return self.failures / self.shots if self.shots else 0.0

    @property
    def se(self) -> float:
        r = self.rate
        return math.sqrt(r * (1 - r) / self.shots) if self.shots else 0.0


def decode_batch(graph: DetectorGraph | MatchingDecoder, batch, backend: str = "pymatching") -> DecodeResult:
    """Decode a :class:`~heavyhex.engine.ShotBatch` and count logical failures."""
    dec = graph if isinstance(graph, MatchingDecoder) else MatchingDecoder(graph, backend)
    g = dec.graph
    if g.detectors and max(g.detectors) >= batch.n_detectors:
        raise ValueError("graph and batch come from different circuits")
    syn, corr = g.syndrome(batch.detector_bits())
    pred = dec.decode(syn) ^ corr
    failures = int(np.count_nonzero(pred != batch.flips))
    return DecodeResult(batch.n_shots, failures, pred)
