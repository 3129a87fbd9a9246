"""Acceptance checks, one function per criterion.

Each check returns a :class:`Check`; ``scale`` shrinks the shot and instance
budgets of the statistical checks for quick smoke runs (the verdict is only
meaningful at ``scale=1``).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .. import analytics
from ..circuits import Schedule, build_memory_experiment, build_z_gauge_cycle
from ..codes import EXCEEDS, build_code, code_distance_bruteforce, validate_code
from ..decoder import MatchingDecoder, build_detector_graph
from ..faults import fault_signatures, hook_violations
from ..lattice import build_heavy_hex
from ..noise import DistributionSpec, assign_uniform, reciprocal_normal_rates
from ..pauli import commutes
from .runner import compare_decoders, run_sweep
from .specfile import ExperimentSpec

__all__ = ["Check", "CHECKS", "run_checks"] + [f"criterion_{i}" for i in range(1, 13)]


@dataclass
class Check:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, title: str):
    def wrap(fn):
        def run(*args, **kw):
            t = time.perf_counter()
            ok, detail = fn(*args, **kw)
            return Check(number, title, bool(ok), detail, time.perf_counter() - t)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _n(value: int, scale: float) -> int:
    return max(1, int(round(value * scale)))


@_timed(1, "qubit counts")
def criterion_1():
    got, want = {}, {}
    for d in (3, 5, 7):
        lat = build_heavy_hex(d)
        data = lat.n_data
        got[d] = (data, lat.n_vertices - data, lat.n_vertices)
        total = (5 * d * d + 2 * d - 5) // 2
        want[d] = (d * d + (d - 1) ** 2 // 2, d * d + 2 * d - 3, total)
    golden = {3: (11, 12, 23), 5: (33, 32, 65), 7: (67, 60, 127)}
    ok = got == want == golden
    return ok, " ".join(f"d={d}:{got[d]}" for d in got)


@_timed(2, "code validity")
def criterion_2():
    notes, ok = [], True
    for kind in ("RSSC", "HHC"):
        for d in (3, 5):
            code = build_code(kind, d)
            rep = validate_code(code)
            anti = not commutes(code.logical_x, code.logical_z)
            ok &= rep.ok and anti
            notes.append(f"{kind}{d}:{'ok' if rep.ok and anti else 'bad'}")
        dist = code_distance_bruteforce(build_code(kind, 3), max_weight=3)
        ok &= dist == 3
        notes.append(f"{kind}3 distance={'>3' if dist == EXCEEDS else dist}")
    return ok, " ".join(notes)


@_timed(3, "fault distance RSSC d=3 s=2")
def criterion_3():
    code = build_code("RSSC", 3)
    notes, ok = [], True
    for basis in "ZX":
        c = build_memory_experiment(code, Schedule(2, 6, basis))
        g = build_detector_graph(c, assign_uniform(c, 1e-3), "aware", basis)
        _, _, dets, obs = fault_signatures(c)
        syn, corr = g.syndrome(dets)
        wrong = int(np.count_nonzero((MatchingDecoder(g).decode(syn) ^ corr) != obs))
        ok &= wrong == 0
        notes.append(f"{basis}: {wrong}/{len(obs)} wrong")
    return ok, ", ".join(notes)


@_timed(4, "hook containment of the Z-gauge cycle")
def criterion_4():
    notes, ok = [], True
    for d in (3, 5):
        code = build_code("RSSC", d)
        n, bad = hook_violations(code, build_z_gauge_cycle(code).circuit)
        ok &= not bad
        notes.append(f"d={d}: {len(bad)}/{n} faults exceed one X and one Z")
    return ok, ", ".join(notes)


@_timed(5, "repetition model")
def criterion_5(seed: int = 5, n_instances: int = 10_000):
    eps = 0.1
    target = analytics.repetition_avg(eps)
    rng = np.random.default_rng(seed)
    ok, notes = True, []
    for alpha in (0.0, 0.3, 1.0):
        e = analytics.repetition_instances(eps, alpha, n_instances, rng)
        se = e.std(ddof=1) / math.sqrt(n_instances)
        hit = abs(e.mean() - target) <= 3 * se + 1e-15
        ok &= hit
        notes.append(f"a={alpha}: mean {e.mean():.5f} ({'ok' if hit else 'off'})")
    e = analytics.repetition_instances(eps, 0.3, n_instances, rng)
    var = float(e.var(ddof=1))
    lead = analytics.repetition_variance_leading(eps, 0.3 * eps)
    rel = abs(var - lead) / lead
    ok &= rel <= 0.10
    notes.append(f"var a=0.3 {var:.3e} vs truncated {lead:.3e} (rel {rel:.1%}, "
                 f"all-orders {analytics.repetition_variance_exact(eps, 0.3 * eps):.3e})")
    return ok, "; ".join(notes)


@_timed(6, "reciprocal-normal mean")
def criterion_6(seed: int = 6, n_draws: int = 1_000_000):
    tau, mu, floor = 100e-9, 100e-6, 1e-6
    rng = np.random.default_rng(seed)
    ok, notes = True, []
    for alpha in (0.1, 0.3, 0.5):
        spec = DistributionSpec("reciprocal-normal", tau / mu, alpha, tau=tau, floor=floor)
        r = reciprocal_normal_rates(spec, n_draws, rng)
        q = analytics.reciprocal_normal_mean_numeric(tau, mu, alpha * mu, floor)
        z = (r.mean() - q) / (r.std(ddof=1) / math.sqrt(n_draws))
        ok &= abs(z) <= 3
        notes.append(f"a={alpha}: z={z:+.2f}")
    q05 = analytics.reciprocal_normal_mean_numeric(tau, mu, 0.05 * mu, floor)
    a05 = analytics.reciprocal_normal_mean_approx(tau, mu, 0.05 * mu)
    q4 = analytics.reciprocal_normal_mean_numeric(tau, mu, 0.4 * mu, floor)
    a4 = analytics.reciprocal_normal_mean_approx(tau, mu, 0.4 * mu)
    ok &= abs(a05 - q05) / q05 <= 0.01 and a4 < q4
    notes.append(f"series/quad a=0.05 {a05 / q05:.5f}, a=0.4 {a4 / q4:.4f}")
    return ok, "; ".join(notes)


THRESHOLD_GRID = (1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3)


def crossing(ps, lo_curve, hi_curve) -> float | None:
    """First ``p`` where ``hi_curve - lo_curve`` changes sign, by linear interpolation."""
    diff = np.asarray(hi_curve) - np.asarray(lo_curve)
    for k in range(len(ps) - 1):
        if diff[k] < 0 <= diff[k + 1]:
            t = -diff[k] / (diff[k + 1] - diff[k])
            return ps[k] + t * (ps[k + 1] - ps[k])
    return None


@_timed(7, "threshold band RSSC d=3/5")
def criterion_7(scale: float = 1.0, seed: int = 7, threads=None):
    spec = ExperimentSpec(name="acceptance-threshold", sweep="threshold", code="RSSC",
                          distances=(3, 5), p_in=THRESHOLD_GRID, instances=1,
                          shots=_n(10_000, scale), seed=seed)
    recs = run_sweep(spec, threads=threads)
    tot = {(r.coords["d"], r.coords["p_in"]): r.recompute_total() for r in recs}
    t3 = [tot[3, p][0] for p in THRESHOLD_GRID]
    t5 = [tot[5, p][0] for p in THRESHOLD_GRID]
    se = [math.hypot(tot[3, p][1], tot[5, p][1]) for p in THRESHOLD_GRID]
    x = crossing(THRESHOLD_GRID, t3, t5)
    # the curves must be separated at 3 sigma on both sides of the crossing
    below = t5[0] + 3 * se[0] < t3[0]
    above = t5[-1] - 3 * se[-1] > t3[-1]
    ok = x is not None and 1.5e-3 <= x <= 4.5e-3 and below and above
    pts = ", ".join(f"{p:g}:{a:.3f}/{b:.3f}" for p, a, b in zip(THRESHOLD_GRID, t3, t5))
    return ok, f"crossing {x if x is None else f'{x:.2e}'}; d3/d5 totals {pts}"


@_timed(8, "schedule optimum s=2 vs s=1")
def criterion_8(scale: float = 1.0, seed: int = 8, threads=None):
    spec = ExperimentSpec(name="acceptance-schedule", sweep="threshold", code="RSSC",
                          distances=(3,), s_values=(1, 2), p_in=(2e-3,), instances=1,
                          shots=_n(40_000, scale), seed=seed)
    tot = {r.coords["s"]: r.recompute_total() for r in run_sweep(spec, threads=threads)}
    (t1, e1), (t2, e2) = tot[1], tot[2]
    ok = t2 - t1 <= 2 * math.hypot(e1, e2)
    return ok, f"s=1 {t1:.4f}+-{e1:.4f}, s=2 {t2:.4f}+-{e2:.4f}"


@_timed(9, "flat mean, growing spread (folded normal)")
def criterion_9(scale: float = 1.0, seed: int = 9, threads=None):
    spec = ExperimentSpec(name="acceptance-sigma", sweep="sigma", code="RSSC",
                          noise="folded-normal", p_in=(1e-3,), alphas=(0.0, 0.5, 1.0),
                          instances=_n(16, scale) if scale < 1 else 16,
                          shots=_n(10_000, scale), seed=seed)
    by_a = {r.coords["alpha"]: r for r in run_sweep(spec, threads=threads)}
    stats = {}
    for a, r in by_a.items():
        tot = r.per_instance_totals()
        k = len(tot)
        sd = float(tot.std(ddof=1)) if k > 1 else math.nan
        stats[a] = (float(tot.mean()), sd / math.sqrt(k), sd, sd / math.sqrt(2 * max(k - 1, 1)))
    m0, se0, s0, ss0 = stats[0.0]
    m5, se5, _, _ = stats[0.5]
    _, _, s1, ss1 = stats[1.0]
    flat = abs(m5 - m0) <= 3 * math.hypot(se0, se5)
    grows = s1 - s0 > 2 * math.hypot(ss0, ss1)
    return flat and grows, (f"mean a=0 {m0:.4f}, a=0.5 {m5:.4f} ({'flat' if flat else 'moved'}); "
                            f"sigma_out a=0 {s0:.4f}, a=1 {s1:.4f} ({'grows' if grows else 'no growth'})")


BADSITE_GRID = (5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1, 0.25, 0.5)


@_timed(10, "bad-site S-curve RSSC d=3")
def criterion_10(scale: float = 1.0, seed: int = 10, threads=None):
    spec = ExperimentSpec(name="acceptance-badsite", sweep="badsite", code="RSSC",
                          bases=("X",), noise="location", p_in=(5e-4,), p_bad=BADSITE_GRID,
                          sites=(0,), instances=1, shots=_n(20_000, scale), seed=seed)
    res = {r.coords["p_bad"]: r.recompute_total() for r in run_sweep(spec, threads=threads)}
    rates = [res[p][0] for p in BADSITE_GRID]
    ses = [res[p][1] for p in BADSITE_GRID]
    flat = res[5e-3][0] <= 2 * res[5e-4][0]
    mono = all(rates[k + 1] >= rates[k] - 2 * math.hypot(ses[k], ses[k + 1])
               for k in range(len(rates) - 1))
    sat = res[0.5][0] / res[0.25][0] < 1.5 if res[0.25][0] > 0 else False
    curve = ", ".join(f"{p:g}:{r:.4f}" for p, r in zip(BADSITE_GRID, rates))
    return flat and mono and sat, (f"flat={flat} monotone={mono} saturates={sat}; {curve}")


@_timed(11, "aware vs naive HHC d=3")
def criterion_11(scale: float = 1.0, seed: int = 11, threads=None):
    spec = ExperimentSpec(name="acceptance-decoders", sweep="decoder", code="HHC",
                          noise="folded-normal", p_in=(1e-3,), alphas=(0.0, 2.0),
                          instances=_n(64, scale), shots=_n(10_000, scale),
                          decoders=("aware", "naive"), seed=seed)
    recs = run_sweep(spec, threads=threads)
    pairs: dict = {}
    for r in recs:
        pairs.setdefault(r.coords["alpha"], {})[r.decoder] = r
    comp = {a: compare_decoders(p["aware"], p["naive"]) for a, p in pairs.items()}
    c0, c2 = comp[0.0], comp[2.0]
    exact = c0.ratio == 1.0
    better = c2.ratio - 2 * c2.se_ratio >= 1.0
    return exact and better, (f"ratio a=0 {c0.ratio!r}; a=2 {c2.ratio:.4f}+-{c2.se_ratio:.4f} "
                              f"(p_aware {c2.p_aware:.4f}, p_naive {c2.p_naive:.4f})")


@_timed(12, "Z-bias insensitivity RSSC d=3")
def criterion_12(scale: float = 1.0, seed: int = 12, threads=None):
    spec = ExperimentSpec(name="acceptance-zbias", sweep="badsite", code="RSSC", bases=("Z",),
                          noise="location", p_in=(5e-4,), p_bad=(0.5,), site_counts=(0, 3),
                          bias="z-only", instances=1, shots=_n(20_000, scale), seed=seed)
    res = {len(r.coords["sites"]): r.recompute_total() for r in run_sweep(spec, threads=threads)}
    (b, eb), (z, ez) = res[0], res[3]
    ok = abs(z - b) <= 3 * math.hypot(eb, ez)
    return ok, f"baseline {b:.4f}+-{eb:.4f}, z-only sites 0-2 {z:.4f}+-{ez:.4f}"


CHECKS = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}
EXACT = (1, 2, 3, 4, 5, 6)
STATISTICAL = (7, 8, 9, 10, 11, 12)


def run_checks(numbers=None, scale: float = 1.0, threads=None, echo=print) -> list[Check]:
    out = []
    for i in numbers or CHECKS:
        kw = {"scale": scale, "threads": threads} if i in STATISTICAL else {}
        res = CHECKS[i](**kw)
        if echo is not None:
            echo(res.line())
        out.append(res)
    return out
