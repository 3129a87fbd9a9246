import json
import math

import pytest

from heavyhex.harness import cli
from heavyhex.harness.runner import (compare_decoders, read_results, run_decoder_comparison, run_sweep,
                                     sweep_points, write_results)
from heavyhex.harness.specfile import SPEC_HEADER, ExperimentSpec, SpecError, parse_spec

SMALL = dict(name="t", code="RSSC", distances=(3,), s_values=(2,), bases=("Z", "X"),
             p_in=(3e-3,), instances=2, shots=400, seed=17)


def strip_wall(path):
    out = []
    for line in path.read_text().splitlines():
        obj = json.loads(line)
        obj.pop("wall_time", None)
        out.append(obj)
    return out


def test_spec_round_trip():
    spec = ExperimentSpec(**SMALL, sweep="sigma", noise="folded-normal", alphas=(0.0, 0.5))
    assert parse_spec(spec.to_text()) == spec
    assert spec.to_text().startswith(SPEC_HEADER)
    assert spec.digest() == parse_spec(spec.to_text()).digest()


def test_spec_grids_repeat():
    spec = parse_spec(f"{SPEC_HEADER}\nname = g\ndistance = 3\ndistance = 5 # comment\np_in = 1e-3\n")
    assert spec.distances == (3, 5) and spec.p_in == (1e-3,)
    assert len(sweep_points(spec)) == 2


@pytest.mark.parametrize("text", [
    "name = x\n",
    "# heavyhex-spec v2\nname = x\n",
    f"{SPEC_HEADER}\nbogus = 1\n",
    f"{SPEC_HEADER}\nname = a\nname = b\n",
    f"{SPEC_HEADER}\nshots = many\n",
    f"{SPEC_HEADER}\nseed = -1\n",
    f"{SPEC_HEADER}\nseed = {2**64}\n",
    f"{SPEC_HEADER}\nnoise = folded-normal\n",
    f"{SPEC_HEADER}\nsweep = sigma\n",
    f"{SPEC_HEADER}\nsweep = decoder\nnoise = folded-normal\n",
    f"{SPEC_HEADER}\nsweep = badsite\nnoise = location\nsite = 0\n",
    f"{SPEC_HEADER}\nsweep = badsite\nnoise = location\np_bad = 0.1\nsite = 3\n",
    f"{SPEC_HEADER}\nsweep = badsite\nnoise = location\np_bad = 0.1\n",
    f"{SPEC_HEADER}\ns = 5\n",
    f"{SPEC_HEADER}\ndistance = 4\n",
    f"{SPEC_HEADER}\nbasis = Y\n",
    f"{SPEC_HEADER}\nno equals sign\n",
])
def test_spec_errors(text):
    with pytest.raises(SpecError):
        parse_spec(text)


def test_badsite_points():
    spec = ExperimentSpec(**SMALL, sweep="badsite", noise="location", p_bad=(0.01, 0.1), site_counts=(0, 2))
    pts = sweep_points(spec)
    assert [(p.p_bad, p.sites) for p in pts] == [(0.01, ()), (0.1, ()), (0.01, (0, 1)), (0.1, (0, 1))]


@pytest.fixture(scope="module")
def threshold_records():
    return run_sweep(ExperimentSpec(**SMALL))


def test_sweep_is_deterministic(tmp_path, threshold_records):
    write_results(threshold_records, tmp_path / "a")
    write_results(run_sweep(ExperimentSpec(**SMALL), workers=2, threads=2), tmp_path / "b")
    assert strip_wall(tmp_path / "a" / "results.jsonl") == strip_wall(tmp_path / "b" / "results.jsonl")
    assert (tmp_path / "a" / "results.csv").read_text().splitlines()[0].startswith("sweep,")


def test_seed_changes_results(threshold_records):
    other = run_sweep(ExperimentSpec(**dict(SMALL, seed=18)))
    assert other[0].bases["Z"]["digests"] != threshold_records[0].bases["Z"]["digests"]


def test_totals_recompute(tmp_path, threshold_records):
    rec = threshold_records[0]
    z, x = rec.bases["Z"], rec.bases["X"]
    want = sum(z["failures"]) / 800 + sum(x["failures"]) / 800
    assert rec.recompute_total()[0] == pytest.approx(want)
    (path,) = [p for p in write_results(threshold_records, tmp_path) if p.suffix == ".jsonl"]
    back, comps = read_results(path)
    assert comps == []
    assert back[0].to_json()["total"] == pytest.approx(want)
    assert back[0].bases["Z"]["digests"] == z["digests"]


def test_alpha_zero_retraces_uniform(threshold_records):
    spec = ExperimentSpec(**SMALL, sweep="sigma", noise="folded-normal", alphas=(0.0,))
    (rec,) = run_sweep(spec)
    for b in ("Z", "X"):
        assert rec.bases[b]["digests"] == threshold_records[0].bases[b]["digests"]
        assert rec.bases[b]["failures"] == threshold_records[0].bases[b]["failures"]


def test_decoder_comparison(tmp_path):
    spec = ExperimentSpec(**dict(SMALL, code="HHC"), sweep="decoder", noise="folded-normal",
                          alphas=(0.0, 1.5), decoders=("aware", "naive"))
    records, comps = run_decoder_comparison(spec)
    assert len(records) == 4 and len(comps) == 2
    assert comps[0].ratio == 1.0
    assert comps[0].discordant == {"Z": {"naive_only": 0, "aware_only": 0},
                                   "X": {"naive_only": 0, "aware_only": 0}}
    assert math.isfinite(comps[1].se_ratio)
    paths = write_results(records, tmp_path, comps)
    assert any(p.name == "results-ratio.csv" for p in paths)
    _, back = read_results(tmp_path / "results.jsonl")
    assert back[0]["ratio"] == 1.0
    broken = records[1]
    broken.bases["Z"] = dict(broken.bases["Z"], digests=["x"] * 2)
    with pytest.raises(AssertionError):
        compare_decoders(records[0], broken)


def test_cli_build(tmp_path, capsys):
    assert cli.main(["build", "--code", "HHC", "--basis", "X", "--out", str(tmp_path), "--shots", "50"]) == 0
    for name in ("code.txt", "circuit.txt", "assignment.txt", "graph-X.txt", "shots.bits", "shots.json"):
        assert (tmp_path / name).exists()
    from heavyhex.circuits import ScheduledCircuit
    assert ScheduledCircuit.from_text((tmp_path / "circuit.txt").read_text()).n_qubits == 19


def test_cli_run_sweep_analyze(tmp_path, capsys):
    spec = tmp_path / "s.txt"
    spec.write_text(ExperimentSpec(**dict(SMALL, instances=1, shots=200)).to_text())
    assert cli.main(["run", "--spec", str(spec), "--out", str(tmp_path / "r")]) == 0
    assert cli.main(["sweep", "--spec", str(spec), "--set", "p_in=1e-3,2e-3", "--out", str(tmp_path / "w")]) == 0
    back, _ = read_results(tmp_path / "w" / "results.jsonl")
    assert [r.coords["p_in"] for r in back] == [1e-3, 2e-3]
    assert parse_spec((tmp_path / "w" / "spec.txt").read_text()).p_in == (1e-3, 2e-3)
    capsys.readouterr()
    assert cli.main(["analyze", "--results", str(tmp_path / "w" / "results.jsonl")]) == 0
    assert "total" in capsys.readouterr().out


def test_cli_oracles(capsys):
    assert cli.main(["analyze", "--oracle", "repetition", "--eps", "0.1", "--sigma", "0.03"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mean"] == pytest.approx(0.028)
    assert cli.main(["analyze", "--oracle", "reciprocal", "--alpha", "0.1"]) == 0
    assert json.loads(capsys.readouterr().out)["quadrature"] == pytest.approx(1.010316e-3, rel=1e-5)


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text(f"{SPEC_HEADER}\nsweep = nope\n")
    assert cli.main(["run", "--spec", str(bad)]) == 2
    spec = tmp_path / "s.txt"
    spec.write_text(ExperimentSpec(**SMALL).to_text())
    assert cli.main(["sweep", "--spec", str(spec), "--set", "unknown=1"]) == 2
    assert cli.main(["analyze"]) == 2


def test_cli_selftest(capsys):
    assert cli.main(["selftest", "--criteria", "1", "3"]) == 0
    assert "2/2 passed" in capsys.readouterr().out
