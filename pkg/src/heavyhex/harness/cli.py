"""Command-line entry point: ``heavyhex {build,run,sweep,analyze,selftest}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .. import analytics
from ..circuits import Schedule, build_memory_experiment
from ..codes import build_code
from ..decoder import build_detector_graph
from ..engine import default_threads, run_shots
from ..noise import assign_uniform
from .runner import read_results, run_decoder_comparison, run_sweep, write_results
from .specfile import _KEYS, SpecError, load_spec, parse_spec


def _spec_with(args) -> object:
    spec = load_spec(args.spec)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.shots is not None:
        changes["shots"] = args.shots
    if args.instances is not None:
        changes["instances"] = args.instances
    return spec.with_overrides(**changes) if changes else spec


def _override_grids(spec, assignments: list[str]):
    """Replace whole keys (``key=v1,v2``) by re-parsing the edited spec text."""
    if not assignments:
        return spec
    new: dict[str, list[str]] = {}
    for item in assignments:
        if "=" not in item:
            raise SpecError(f"--set expects key=value[,value...], got {item!r}")
        key, vals = item.split("=", 1)
        key = key.strip()
        if key not in _KEYS:
            raise SpecError(f"unknown key {key!r}")
        new[key] = [v.strip() for v in vals.split(",") if v.strip()]
    lines = [ln for ln in spec.to_text().splitlines()
             if ln.split("=", 1)[0].strip() not in new]
    for key, vals in new.items():
        lines.extend(f"{key} = {v}" for v in vals)
    return parse_spec("\n".join(lines) + "\n")


def _progress(point, recs):
    tot = ", ".join(f"{r.decoder} {r.recompute_total()[0]:.4g}" for r in recs)
    print(f"  {point.coords()} -> {tot}", file=sys.stderr, flush=True)


def _execute(spec, args) -> int:
    threads = args.threads or default_threads()
    out = Path(args.out)
    kw = {"workers": getattr(args, "workers", 1), "threads": threads, "progress": _progress}
    print(f"{spec.name}: {spec.sweep} sweep, seed {spec.seed}", file=sys.stderr)
    if spec.sweep == "decoder":
        records, comps = run_decoder_comparison(spec, **kw)
    else:
        records, comps = run_sweep(spec, **kw), []
    out.mkdir(parents=True, exist_ok=True)
    (out / "spec.txt").write_text(spec.to_text())
    for p in write_results(records, out, comps):
        print(p)
    return 0


def cmd_run(args) -> int:
    return _execute(_spec_with(args), args)


def cmd_sweep(args) -> int:
    return _execute(_override_grids(_spec_with(args), args.set), args)


def cmd_build(args) -> int:
    if args.spec:
        spec = _spec_with(args)
        kind, d, s, rounds = spec.code, spec.distances[0], spec.s_values[0], spec.rounds
        basis, p, deflag = spec.bases[0], spec.p_in[0], spec.deflag
    else:
        kind, d, s, rounds = args.code, args.distance, args.s, args.rounds
        basis, p, deflag = args.basis, args.p, args.deflag
    code = build_code(kind, d)
    circuit = build_memory_experiment(code, Schedule.from_total(s, basis, rounds), deflag=deflag)
    assignment = assign_uniform(circuit, p)
    graph = build_detector_graph(circuit, assignment, "aware", basis)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {"code.txt": code.to_text(), "circuit.txt": circuit.to_text(),
             "assignment.txt": assignment.to_text(), f"graph-{basis}.txt": graph.to_text()}
    for name, text in files.items():
        (out / name).write_text(text)
        print(out / name)
    if args.shots:
        batch = run_shots(circuit, assignment, args.shots, args.seed or 0,
                          args.threads or default_threads())
        batch.export(out / "shots")
        print(out / "shots.bits")
    return 0


def cmd_analyze(args) -> int:
    if args.oracle == "repetition":
        e, s = args.eps, args.sigma
        print(json.dumps({"mean": analytics.repetition_avg(e),
                          "variance_truncated": analytics.repetition_variance_leading(e, s),
                          "variance_all_orders": analytics.repetition_variance_exact(e, s)}, indent=1))
        return 0
    if args.oracle == "reciprocal":
        sig = args.alpha * args.mu
        print(json.dumps({"quadrature": analytics.reciprocal_normal_mean_numeric(args.tau, args.mu, sig, args.floor),
                          "series": analytics.reciprocal_normal_mean_approx(args.tau, args.mu, sig),
                          "uniform": args.tau / args.mu}, indent=1))
        return 0
    if not args.results:
        print("analyze needs --results or --oracle", file=sys.stderr)
        return 2
    records, comps = read_results(args.results)
    bad = 0
    print(f"{'coords':<60} {'decoder':<7} {'total':>9} {'se':>9} {'sigma_out':>10}")
    for r in records:
        j = r.to_json()
        total, se = r.recompute_total()
        sig = j["sigma_out"]
        coords = json.dumps(r.coords, sort_keys=True)
        print(f"{coords:<60} {r.decoder:<7} {total:9.5f} {se:9.5f} "
              f"{'-' if sig is None else f'{sig:10.5f}':>10}")
        for b, v in r.bases.items():
            rate = sum(v["failures"]) / (v["shots"] * len(v["failures"]))
            if not math.isclose(rate, v["rate"], rel_tol=1e-12, abs_tol=1e-15):
                print(f"  {b}: stored rate {v['rate']} != recomputed {rate}", file=sys.stderr)
                bad += 1
    for c in comps:
        print(f"ratio {json.dumps(c['coords'], sort_keys=True)}: {c['ratio']:.5f} +- {c['se_ratio']:.5f}")
    return 1 if bad else 0


def cmd_selftest(args) -> int:
    from .acceptance import EXACT, run_checks

    numbers = args.criteria or (None if args.all else EXACT)
    results = run_checks(numbers, scale=args.scale, threads=args.threads)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f"; failed {failed}" if failed else ""))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heavyhex", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec_required):
        p.add_argument("--spec", required=spec_required, help="spec file (heavyhex-spec v1)")
        p.add_argument("--seed", type=lambda v: int(v, 0), help="master seed (u64)")
        p.add_argument("--shots", type=int, help="shots per instance and basis")
        p.add_argument("--instances", type=int, help="noise instances per point")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, help="engine threads (default $HEAVYHEX_THREADS or 1)")

    p = sub.add_parser("build", help="export code, circuit, assignment and graph files")
    common(p, False)
    p.add_argument("--code", default="RSSC", choices=("RSSC", "HHC"))
    p.add_argument("--distance", type=int, default=3)
    p.add_argument("--basis", default="Z", choices=("Z", "X"))
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--rounds", type=int, default=12)
    p.add_argument("--p", type=float, default=1e-3, help="uniform rate of cx/h/id")
    p.add_argument("--deflag", default="decoder", choices=("decoder", "feedback", "none"))
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("run", help="execute every point of a spec")
    common(p, True)
    p.add_argument("--workers", type=int, default=1, help="sweep points run in parallel")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a spec with grid overrides")
    common(p, True)
    p.add_argument("--set", action="append", default=[], metavar="KEY=V1,V2",
                   help="replace a key's values (repeatable)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="summarize a results file or evaluate an oracle")
    p.add_argument("--results", help="results .jsonl file")
    p.add_argument("--oracle", choices=("repetition", "reciprocal"))
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--sigma", type=float, default=0.03)
    p.add_argument("--tau", type=float, default=100e-9)
    p.add_argument("--mu", type=float, default=100e-6)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--floor", type=float, default=1e-6)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("selftest", help="acceptance checks (exact ones by default)")
    p.add_argument("--all", action="store_true", help="include the statistical checks")
    p.add_argument("--criteria", type=int, nargs="*", help="criterion numbers to run")
    p.add_argument("--scale", type=float, default=1.0, help="budget factor for statistical checks")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
