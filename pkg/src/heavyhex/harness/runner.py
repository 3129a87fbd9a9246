"""Sweep execution and result records."""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..analytics import aggregate_sweep
from ..circuits import Schedule, build_memory_experiment
from ..codes import build_code
from ..decoder import build_detector_graph, decode_batch
from ..engine import run_shots
from ..noise import DistributionSpec, sample_assignment
from .specfile import ExperimentSpec, SpecError

__all__ = [
    "RESULT_SCHEMA",
    "SweepPoint",
    "ResultRecord",
    "Comparison",
    "sweep_points",
    "run_point",
    "run_sweep",
    "run_threshold_sweep",
    "run_sigma_sweep",
    "run_badsite_sweep",
    "run_decoder_comparison",
    "compare_decoders",
    "write_results",
    "read_results",
    "software_version",
]

RESULT_SCHEMA = "heavyhex-result v1"
_BASIS_INDEX = {"Z": 0, "X": 1}


@lru_cache(maxsize=1)
def software_version() -> str:
    """Hash of the package sources, so records name the code that made them."""
    root = Path(__file__).resolve().parent.parent
    h = hashlib.sha256()
    for path in sorted(root.rglob("*.py")):
        h.update(path.relative_to(root).as_posix().encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class SweepPoint:
    d: int
    s: int
    p_in: float
    alpha: float
    p_bad: float | None = None
    sites: tuple[int, ...] = ()

    def coords(self) -> dict:
        out = {"d": self.d, "s": self.s, "p_in": self.p_in, "alpha": self.alpha}
        if self.p_bad is not None:
            out["p_bad"] = self.p_bad
            out["sites"] = list(self.sites)
        return out


def sweep_points(spec: ExperimentSpec) -> list[SweepPoint]:
    if spec.sweep == "badsite":
        site_sets = ([tuple(range(k)) for k in spec.site_counts] if spec.site_counts
                     else [tuple(spec.sites)])
        bad = [(p, ss) for ss in site_sets for p in spec.p_bad]
    else:
        bad = [(None, ())]
    return [SweepPoint(d, s, p, a, pb, ss)
            for d, s, p, a, (pb, ss) in itertools.product(
                spec.distances, spec.s_values, spec.p_in, spec.alphas, bad)]


def _seed_for(spec: ExperimentSpec, stream: int, point: SweepPoint, basis: str, inst: int) -> np.random.SeedSequence:
    # the noise parameters are left out on purpose: points that differ only
    # in rates share random numbers, so alpha = 0 retraces the uniform run
    return np.random.SeedSequence([spec.seed, stream, point.d, point.s, _BASIS_INDEX[basis], inst])


@dataclass
class BasisResult:
    failures: list[int]
    shots: int
    digests: list[str]

    def summary(self) -> dict:
        st = aggregate_sweep(self.failures, self.shots)
        return {"failures": self.failures, "shots": self.shots, "rate": st.grand_mean,
                "se": st.se_mean,
                "sigma_out": None if st.single_instance else st.sigma_out,
                "se_sigma": None if st.single_instance else st.se_sigma}


@dataclass
class ResultRecord:
    """One sweep point decoded with one decoder mode.

    ``total`` is the sum over bases of the grand means, which for both bases
    estimates ``p_x + p_z + 2 p_y``.
    """

    spec_name: str
    spec_digest: str
    sweep: str
    code: str
    coords: dict
    decoder: str
    bases: dict
    wall_time: float = 0.0
    version: str = ""
    pred: dict = field(default_factory=dict, repr=False)

    def per_instance_totals(self) -> np.ndarray:
        rates = [np.asarray(b["failures"], dtype=float) / b["shots"] for b in self.bases.values()]
        return np.sum(rates, axis=0)

    def recompute_total(self) -> tuple[float, float]:
        total = sum(float(np.mean(np.asarray(b["failures"]) / b["shots"])) for b in self.bases.values())
        se = math.sqrt(sum(b["se"] ** 2 for b in self.bases.values()))
        return total, se

    def to_json(self) -> dict:
        total, se = self.recompute_total()
        tot = self.per_instance_totals()
        spread = float(np.std(tot, ddof=1)) if len(tot) > 1 else None
        return {
            "schema": RESULT_SCHEMA,
            "kind": "point",
            "spec": self.spec_name,
            "spec_digest": self.spec_digest,
            "sweep": self.sweep,
            "code": self.code,
            "coords": self.coords,
            "decoder": self.decoder,
            "bases": {b: {k: v for k, v in r.items() if k != "digests"} for b, r in self.bases.items()},
            "batch_digests": {b: r["digests"] for b, r in self.bases.items()},
            "total": total,
            "se_total": se,
            "sigma_out": spread,
            "wall_time": self.wall_time,
            "version": self.version,
        }

    @classmethod
    def from_json(cls, obj: dict) -> ResultRecord:
        bases = {b: dict(r, digests=obj.get("batch_digests", {}).get(b, []))
                 for b, r in obj["bases"].items()}
        return cls(obj["spec"], obj["spec_digest"], obj["sweep"], obj["code"], obj["coords"],
                   obj["decoder"], bases, obj.get("wall_time", 0.0), obj.get("version", ""))


@dataclass
class Comparison:
    """Paired naive/aware decoding of the same shots."""

    spec_name: str
    code: str
    coords: dict
    p_aware: float
    p_naive: float
    ratio: float
    se_ratio: float
    discordant: dict

    def to_json(self) -> dict:
        return {"schema": RESULT_SCHEMA, "kind": "comparison", "spec": self.spec_name,
                "code": self.code, "coords": self.coords, "p_aware": self.p_aware,
                "p_naive": self.p_naive, "ratio": self.ratio, "se_ratio": self.se_ratio,
                "discordant": self.discordant}


class _Circuits:
    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self._cache: dict = {}

    def get(self, d: int, s: int, basis: str):
        key = (d, s, basis)
        if key not in self._cache:
            code = build_code(self.spec.code, d)
            sched = Schedule.from_total(s, basis, self.spec.rounds)
            self._cache[key] = (code, build_memory_experiment(code, sched, deflag=self.spec.deflag))
        return self._cache[key]


def _distribution(spec: ExperimentSpec, point: SweepPoint, code) -> DistributionSpec:
    sites = ()
    if point.p_bad is not None:
        path = code.sites()
        if any(k >= len(path) for k in point.sites):
            raise SpecError(f"site {max(point.sites)} is off the logical-Z path of d={point.d}")
        sites = tuple(path[k] for k in point.sites)
    return DistributionSpec(kind=spec.noise, mean=point.p_in, alpha=point.alpha, tau=spec.tau,
                            floor=spec.floor, sites=sites, p_bad=point.p_bad, bias=spec.bias,
                            probed=tuple(spec.probed), background=spec.background)


def run_point(spec: ExperimentSpec, point: SweepPoint, circuits: _Circuits | None = None,
              threads: int | None = None, keep_predictions: bool = False) -> list[ResultRecord]:
    """All instances and bases of one point; one record per decoder mode."""
    circuits = circuits or _Circuits(spec)
    start = time.perf_counter()
    per_mode = {m: {} for m in spec.decoders}
    preds = {m: {} for m in spec.decoders}
    for basis in spec.bases:
        code, circuit = circuits.get(point.d, point.s, basis)
        dist = _distribution(spec, point, code)
        fails = {m: [] for m in spec.decoders}
        digests = []
        for inst in range(spec.instances):
            rng = np.random.Generator(np.random.PCG64(_seed_for(spec, 0, point, basis, inst)))
            assignment = sample_assignment(circuit, dist, rng)
            shot_seed = int(_seed_for(spec, 1, point, basis, inst).generate_state(1, np.uint64)[0])
            batch = run_shots(circuit, assignment, spec.shots, shot_seed, threads)
            digests.append(batch.digest())
            for m in spec.decoders:
                graph = build_detector_graph(circuit, assignment, m, basis)
                res = decode_batch(graph, batch, spec.backend)
                fails[m].append(res.failures)
                if keep_predictions:
                    preds[m].setdefault(basis, []).append(res.predicted != batch.flips)
        for m in spec.decoders:
            per_mode[m][basis] = dict(BasisResult(fails[m], spec.shots, digests).summary(),
                                      digests=digests)
    wall = time.perf_counter() - start
    return [ResultRecord(spec.name, spec.digest(), spec.sweep, spec.code, point.coords(), m,
                         per_mode[m], wall, software_version(), preds[m])
            for m in spec.decoders]


def run_sweep(spec: ExperimentSpec, workers: int = 1, threads: int | None = None,
              progress=None) -> list[ResultRecord]:
    """Every point of ``spec`` in grid order; points may run on ``workers`` threads."""
    points = sweep_points(spec)
    circuits = _Circuits(spec)
    for p in points:
        for b in spec.bases:
            circuits.get(p.d, p.s, b)
    keep = spec.sweep == "decoder"

    def one(p):
        recs = run_point(spec, p, circuits, threads, keep)
        if progress is not None:
            progress(p, recs)
        return recs

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(one, points))
    else:
        chunks = [one(p) for p in points]
    return [r for chunk in chunks for r in chunk]


def _require(spec: ExperimentSpec, sweep: str) -> None:
    if spec.sweep != sweep:
        raise SpecError(f"spec describes a {spec.sweep} sweep, not {sweep}")


def run_threshold_sweep(spec: ExperimentSpec, **kw) -> list[ResultRecord]:
    _require(spec, "threshold")
    return run_sweep(spec, **kw)


def run_sigma_sweep(spec: ExperimentSpec, **kw) -> list[ResultRecord]:
    _require(spec, "sigma")
    return run_sweep(spec, **kw)


def run_badsite_sweep(spec: ExperimentSpec, **kw) -> list[ResultRecord]:
    _require(spec, "badsite")
    return run_sweep(spec, **kw)


def compare_decoders(aware: ResultRecord, naive: ResultRecord) -> Comparison:
    """Ratio ``p_naive / p_aware`` from paired per-instance differences."""
    if aware.coords != naive.coords or set(aware.bases) != set(naive.bases):
        raise ValueError("records belong to different points")
    for b in aware.bases:
        if aware.bases[b]["digests"] != naive.bases[b]["digests"]:
            raise AssertionError(f"{b}: aware and naive decoded different shot batches")
    a = aware.per_instance_totals()
    diff = naive.per_instance_totals() - a
    a_mean = float(a.mean())
    d_mean = float(diff.mean())
    k = len(a)
    discordant = {}
    if aware.pred and naive.pred:
        for b in aware.bases:
            wa = np.concatenate(aware.pred[b])
            wn = np.concatenate(naive.pred[b])
            discordant[b] = {"naive_only": int(np.count_nonzero(wn & ~wa)),
                             "aware_only": int(np.count_nonzero(wa & ~wn))}
    if k > 1:
        se_d = float(diff.std(ddof=1)) / math.sqrt(k)
        se_a = float(a.std(ddof=1)) / math.sqrt(k)
    else:
        # one instance: McNemar-style error from the discordant shots
        shots = next(iter(aware.bases.values()))["shots"]
        disc = sum(v["naive_only"] + v["aware_only"] for v in discordant.values())
        se_d = math.sqrt(disc) / shots if discordant else math.nan
        se_a = aware.recompute_total()[1]
    if a_mean == 0:
        ratio = 1.0 if d_mean == 0 else math.inf
        se = math.nan
    else:
        ratio = (a_mean + d_mean) / a_mean
        se = math.hypot(se_d / a_mean, d_mean * se_a / a_mean**2)
    return Comparison(aware.spec_name, aware.code, aware.coords, a_mean, a_mean + d_mean,
                      ratio, se, discordant)


def run_decoder_comparison(spec: ExperimentSpec, **kw) -> tuple[list[ResultRecord], list[Comparison]]:
    _require(spec, "decoder")
    records = run_sweep(spec, **kw)
    by_coords: dict[str, dict] = {}
    for r in records:
        by_coords.setdefault(json.dumps(r.coords, sort_keys=True), {})[r.decoder] = r
    comps = [compare_decoders(pair["aware"], pair["naive"]) for pair in by_coords.values()]
    return records, comps


_CSV_FIELDS = ["sweep", "code", "d", "s", "p_in", "alpha", "p_bad", "n_sites", "decoder",
               "rate_Z", "se_Z", "rate_X", "se_X", "total", "se_total", "sigma_out"]


def _csv_row(obj: dict) -> dict:
    c = obj["coords"]
    row = {"sweep": obj["sweep"], "code": obj["code"], "d": c["d"], "s": c["s"],
           "p_in": c["p_in"], "alpha": c["alpha"], "p_bad": c.get("p_bad", ""),
           "n_sites": len(c.get("sites", [])), "decoder": obj["decoder"],
           "total": obj["total"], "se_total": obj["se_total"],
           "sigma_out": "" if obj["sigma_out"] is None else obj["sigma_out"]}
    for b in ("Z", "X"):
        r = obj["bases"].get(b)
        row[f"rate_{b}"] = "" if r is None else r["rate"]
        row[f"se_{b}"] = "" if r is None else r["se"]
    return row


def write_results(records, out_dir, comparisons=(), stem: str = "results") -> list[Path]:
    """``<stem>.jsonl`` with one object per record and a CSV projection."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    objs = [r.to_json() for r in records] + [c.to_json() for c in comparisons]
    jpath = out / f"{stem}.jsonl"
    with jpath.open("w", encoding="utf-8") as fh:
        for o in objs:
            fh.write(json.dumps(o, sort_keys=True) + "\n")
    cpath = out / f"{stem}.csv"
    with cpath.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        w.writeheader()
        for o in objs:
            if o["kind"] == "point":
                w.writerow(_csv_row(o))
    paths = [jpath, cpath]
    if comparisons:
        kpath = out / f"{stem}-ratio.csv"
        with kpath.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["code", "d", "s", "p_in", "alpha", "p_aware", "p_naive", "ratio", "se_ratio"])
            for c in comparisons:
                k = c.coords
                w.writerow([c.code, k["d"], k["s"], k["p_in"], k["alpha"], c.p_aware, c.p_naive,
                            c.ratio, c.se_ratio])
        paths.append(kpath)
    return paths


def read_results(path) -> tuple[list[ResultRecord], list[dict]]:
    records, comps = [], []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("schema") != RESULT_SCHEMA:
                raise ValueError(f"line {n}: unsupported schema {obj.get('schema')!r}")
            if obj["kind"] == "point":
                records.append(ResultRecord.from_json(obj))
            else:
                comps.append(obj)
    return records, comps
