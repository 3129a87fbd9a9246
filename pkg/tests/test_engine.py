import math
import time

import numpy as np
import pytest

from heavyhex.circuits import CircuitBuilder, Detector
from heavyhex.engine import ShotBatch, logical_error_estimate, run_injected, run_shots, tableau_execute
from heavyhex.faults import fault_codes
from heavyhex.frame import location_classes
from heavyhex.noise import NoiseAssignment, apply_bad_sites, assign_uniform

from conftest import memory


def within(count, n, p, k=4.5):
    return abs(count / n - p) <= k * math.sqrt(p * (1 - p) / n) + 1e-12


def custom(circuit, rates, bias=None, base=None):
    n = circuit.n_locations
    bias = np.zeros(n, np.int8) if bias is None else np.asarray(bias, np.int8)
    return NoiseAssignment(np.asarray(rates, float), tuple(op.kind for op in circuit.ops), bias,
                           {}, None if base is None else np.asarray(base, float))


def one_qubit_circuit():
    b = CircuitBuilder(1)
    b.initialize(0)
    b.gate("id", 0)
    m = b.measure(0)
    return b.build([Detector((m,), "Z")], observable=(m,))


def cx_circuit():
    b = CircuitBuilder(2)
    b.initialize(0)
    b.initialize(1)
    b.cx(0, 1)
    m0, m1 = b.measure(0), b.measure(1)
    return b.build([Detector((m0,), "Z"), Detector((m1,), "Z")])


def test_one_qubit_channel_rate():
    c = one_qubit_circuit()
    batch = run_shots(c, custom(c, [0, 0.3, 0]), 60_000, seed=1)
    assert within(batch.flips.sum(), 60_000, 0.3 * 2 / 3)


@pytest.mark.parametrize("bias,flip", [(1, 0.0), (2, 1.0)])
def test_biased_one_qubit_channel(bias, flip):
    c = one_qubit_circuit()
    batch = run_shots(c, custom(c, [0, 0.3, 0], bias=[0, bias, 0]), 20_000, seed=2)
    assert within(batch.flips.sum(), 20_000, 0.3 * flip)


def test_base_channel_composes():
    c = one_qubit_circuit()
    a = custom(c, [0, 0.4, 0], bias=[0, 1, 0], base=[0, 0.2, 0])
    batch = run_shots(c, a, 60_000, seed=3)
    assert within(batch.flips.sum(), 60_000, 0.2 * 2 / 3)


def test_two_qubit_channel_marginals():
    c = cx_circuit()
    cx = [i for i, op in enumerate(c.ops) if op.kind == "cx"][0]
    rates = np.zeros(c.n_locations)
    rates[cx] = 0.45
    n = 80_000
    bits = run_shots(c, custom(c, rates), n, seed=4).detector_bits()
    assert within(bits[:, 0].sum(), n, 0.45 * 8 / 15)
    assert within(bits[:, 1].sum(), n, 0.45 * 8 / 15)
    assert within((bits[:, 0] & bits[:, 1]).sum(), n, 0.45 * 4 / 15)


def test_measurement_and_prep_flips():
    c = one_qubit_circuit()
    rates = [0.1, 0, 0.2]
    batch = run_shots(c, custom(c, rates), 50_000, seed=5)
    assert within(batch.flips.sum(), 50_000, 0.1 * 0.8 + 0.2 * 0.9)


def test_zero_noise_gives_zero_syndromes(circuit_of):
    c = circuit_of("HHC", 3, "X")
    batch = run_shots(c, assign_uniform(c, 0.0), 300, seed=0)
    assert not batch.detector_bits().any() and not batch.flips.any()


@pytest.mark.parametrize("key", [("RSSC", 3, "Z"), ("HHC", 3, "X"), ("RSSC", 3, "X")])
def test_frame_matches_tableau_on_memories(key):
    c = memory(*key)
    rng = np.random.default_rng(7)
    cls = location_classes(c)["cls"]
    sets = []
    for _ in range(12):
        locs = rng.choice(c.n_locations, 3, replace=False)
        sets.append({int(l): int(rng.choice(fault_codes(int(cls[l])))) for l in locs})
    dets, obs = run_injected(c, sets)
    for fs, drow, o in zip(sets, dets, obs):
        rec, _ = tableau_execute(c, fs, rng=np.random.default_rng(1))
        want = [int(np.bitwise_xor.reduce(rec[list(d.meas)])) for d in c.detectors]
        assert drow.astype(int).tolist() == want
        assert int(np.bitwise_xor.reduce(rec[list(c.observable)])) == int(o)


def test_thread_count_does_not_change_shots(circuit_of):
    c = circuit_of("RSSC", 3, "Z")
    a = assign_uniform(c, 3e-3)
    one = run_shots(c, a, 5000, seed=42, threads=1)
    many = run_shots(c, a, 5000, seed=42, threads=3)
    assert one.digest() == many.digest()
    assert run_shots(c, a, 5000, seed=43).digest() != one.digest()


def test_batch_export_round_trip(tmp_path, circuit_of):
    c = circuit_of("HHC", 3, "Z")
    batch = run_shots(c, assign_uniform(c, 5e-3), 777, seed=9)
    batch.export(tmp_path / "shots")
    back = ShotBatch.load(tmp_path / "shots")
    assert back.digest() == batch.digest()
    assert np.array_equal(back.detector_bits(), batch.detector_bits())
    assert (back.seed, back.circuit_hash, back.assignment_hash) == (9, batch.circuit_hash, batch.assignment_hash)


def test_throughput_at_distance_five(circuit_of):
    c = circuit_of("RSSC", 5, "Z")
    a = assign_uniform(c, 1e-3)
    run_shots(c, a, 64, seed=0)
    t = time.perf_counter()
    run_shots(c, a, 10_000, seed=1)
    rate = 10_000 / (time.perf_counter() - t)
    assert rate >= 1e3, f"{rate:.0f} shots/s"


def test_bad_site_raises_error_rate(circuit_of):
    c = circuit_of("RSSC", 3, "Z")
    u = assign_uniform(c, 1e-3)
    bad = apply_bad_sites(u, c, [c.qubit_roles.index("data")], 0.2)
    assert run_shots(c, bad, 2000, 1).detector_bits().sum() > run_shots(c, u, 2000, 1).detector_bits().sum()


def test_logical_error_estimate():
    est = logical_error_estimate(10, 1000, 30, 1000)
    assert est["total"] == pytest.approx(0.04)
    assert est["se_total"] == pytest.approx(math.hypot(math.sqrt(0.01 * 0.99 / 1000), math.sqrt(0.03 * 0.97 / 1000)))
    with pytest.raises(ValueError):
        logical_error_estimate(0, 0, 0, 1)
