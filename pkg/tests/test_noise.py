import math

import numpy as np
import pytest
from scipy import stats

from heavyhex.analytics import folded_normal_moments
from heavyhex.noise import (DistributionSpec, NoiseAssignment, apply_bad_sites, assign_uniform,
                            channel_sample, rate_cap, reciprocal_normal_rates, sample_assignment)
from heavyhex.pauli import PauliOperator

from conftest import memory


@pytest.fixture(scope="module")
def circuit():
    return memory("RSSC", 3, "Z")


def probed_mask(c):
    return np.array([op.kind in ("cx", "h", "id") for op in c.ops])


def test_uniform_assignment(circuit):
    a = assign_uniform(circuit, 2e-3)
    mask = probed_mask(circuit)
    assert np.all(a.rates[mask] == 2e-3) and np.all(a.rates[~mask] == 0)
    assert a.naive().rates.tolist() == a.rates.tolist()
    with pytest.raises(ValueError):
        assign_uniform(circuit, 0.9)


def test_background_covers_measure_and_prep(circuit):
    a = assign_uniform(circuit, 1e-3, background=5e-4)
    kinds = np.array(a.kinds)
    assert np.all(a.rates[np.isin(kinds, ["measure", "reset", "initialize"])] == 5e-4)


def test_folded_normal_statistics(circuit):
    spec = DistributionSpec("folded-normal", 1e-3, alpha=0.8)
    a = sample_assignment(circuit, spec, np.random.default_rng(4))
    r = a.rates[probed_mask(circuit)]
    mean, sd = folded_normal_moments(1e-3, 0.8e-3)
    assert abs(r.mean() - mean) < 4 * sd / math.sqrt(r.size)
    assert abs(r.std() / sd - 1) < 0.05
    assert r.min() >= 0


def test_folded_normal_alpha_zero_is_uniform(circuit):
    spec = DistributionSpec("folded-normal", 1e-3, alpha=0.0)
    a = sample_assignment(circuit, spec, np.random.default_rng(0))
    assert np.array_equal(a.rates, assign_uniform(circuit, 1e-3).rates)


def test_reciprocal_normal_alpha_zero_and_growth():
    spec0 = DistributionSpec("reciprocal-normal", 1e-3, alpha=0.0)
    assert np.all(reciprocal_normal_rates(spec0, 5, np.random.default_rng(0)) == pytest.approx(1e-3))
    means = [reciprocal_normal_rates(DistributionSpec("reciprocal-normal", 1e-3, alpha=a), 200_000,
                                     np.random.default_rng(1)).mean() for a in (0.05, 0.2, 0.35)]
    assert means[0] < means[1] < means[2]
    assert means[0] > 1e-3


def test_reciprocal_normal_respects_floor():
    spec = DistributionSpec("reciprocal-normal", 1e-3, alpha=1.0, floor=1e-6)
    r = reciprocal_normal_rates(spec, 100_000, np.random.default_rng(2))
    assert r.max() <= spec.tau / spec.floor


def test_caps_apply(circuit):
    spec = DistributionSpec("reciprocal-normal", 0.3, alpha=1.0)
    a = sample_assignment(circuit, spec, np.random.default_rng(3))
    caps = np.array([rate_cap(k) for k in a.kinds])
    assert np.all(a.rates <= caps)


def test_sampling_is_deterministic(circuit):
    spec = DistributionSpec("folded-normal", 1e-3, alpha=0.5)
    a = sample_assignment(circuit, spec, np.random.default_rng(9))
    b = sample_assignment(circuit, spec, np.random.default_rng(9))
    assert a.digest() == b.digest()


def test_bad_sites_touch_only_their_locations(circuit):
    site = 0
    base = assign_uniform(circuit, 1e-3)
    a = apply_bad_sites(base, circuit, [site], 0.2)
    changed = {i for i in range(a.n_locations) if a.rates[i] != base.rates[i]}
    expect = {i for i, op in enumerate(circuit.ops) if op.kind in ("cx", "h", "id") and site in op.qubits}
    assert changed == expect
    assert not a.base.any()


def test_biased_site_keeps_depolarizing_base(circuit):
    u = assign_uniform(circuit, 1e-3)
    a = apply_bad_sites(u, circuit, [0], 0.3, "z-only")
    touched = a.bias > 0
    assert touched.any()
    assert np.all(a.base[touched] == 1e-3) and np.all(a.rates[touched] == 0.3)
    assert np.allclose(a.total_rates()[touched], 1 - 0.999 * 0.7)
    # applying a second biased layer does not double-count the base
    b = apply_bad_sites(a, circuit, [0], 0.4, "z-only")
    assert np.array_equal(b.base, a.base)


def test_bad_site_must_be_data(circuit):
    aux = circuit.qubit_roles.index("measure")
    with pytest.raises(ValueError):
        apply_bad_sites(assign_uniform(circuit, 1e-3), circuit, [aux], 0.1)


def test_naive_uses_kind_means(circuit):
    spec = DistributionSpec("folded-normal", 1e-3, alpha=1.0)
    a = sample_assignment(circuit, spec, np.random.default_rng(5))
    n = a.naive()
    kinds = np.array(a.kinds)
    for k in ("cx", "id"):
        assert np.allclose(n.rates[kinds == k], a.rates[kinds == k].mean())
    assert not n.bias.any()


@pytest.mark.parametrize("bias", ["depolarizing", "z-only"])
def test_text_round_trip(circuit, bias):
    a = apply_bad_sites(assign_uniform(circuit, 1e-3), circuit, [0, 1], 0.05, bias)
    back = NoiseAssignment.from_text(a.to_text())
    assert np.array_equal(back.rates, a.rates) and np.array_equal(back.base, a.base)
    assert np.array_equal(back.bias, a.bias) and back.kinds == a.kinds
    assert back.digest() == a.digest()


def test_channel_sample_frequencies():
    rng = np.random.default_rng(11)
    n, p = 60_000, 0.3
    draws = [channel_sample("cx", p, (0, 1), rng) for _ in range(n)]
    hit = [d for d in draws if not d.is_identity()]
    assert abs(len(hit) / n - p) < 4 * math.sqrt(p * (1 - p) / n)
    counts = {}
    for d in hit:
        counts[(d.x, d.z)] = counts.get((d.x, d.z), 0) + 1
    assert len(counts) == 15
    assert stats.chisquare(list(counts.values())).pvalue > 1e-3


def test_channel_sample_bias():
    rng = np.random.default_rng(12)
    for _ in range(200):
        d = channel_sample("cx", 0.5, (3, 4), rng, "z-only")
        assert d.x == 0
        assert channel_sample("h", 0.7, (2,), rng, "x-only").z == 0
    assert channel_sample("measure", 0.5, (0,), rng) in (True, False)
    assert channel_sample("h", 0.0, (0,), rng) == PauliOperator()
    with pytest.raises(ValueError):
        channel_sample("measure", 0.6, (0,), rng)
