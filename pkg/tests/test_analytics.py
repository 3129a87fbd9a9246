import math

import numpy as np
import pytest

from heavyhex.analytics import (aggregate_sweep, folded_normal_moments, reciprocal_normal_mean_approx,
                                reciprocal_normal_mean_numeric, repetition_avg, repetition_error,
                                repetition_error_bruteforce, repetition_instances,
                                repetition_variance_exact, repetition_variance_leading)

TAU, MU = 100e-9, 100e-6


def test_closed_form_matches_enumeration_on_a_grid():
    rng = np.random.default_rng(0)
    for eps in rng.random((100, 3)):
        assert repetition_error(eps) == pytest.approx(repetition_error_bruteforce(eps), abs=1e-12)


def test_enumeration_against_sampling():
    rng = np.random.default_rng(1)
    eps = rng.random((1000, 3)) * 0.5
    flips = rng.random((1000, 3, 400)) < eps[:, :, None]
    empirical = (flips.sum(axis=1) >= 2).mean(axis=1)
    exact = np.array([repetition_error_bruteforce(e) for e in eps])
    z = (empirical - exact) / np.sqrt(exact * (1 - exact) / 400 + 1e-12)
    assert np.mean(np.abs(z) < 3.5) > 0.99


def test_examples():
    assert repetition_error([0.1, 0.1, 0.1]) == pytest.approx(0.028)
    assert repetition_error([0.0, 0.0, 1.0]) == 0.0
    assert repetition_error([0.5, 0.5, 0.5]) == pytest.approx(0.5)
    assert repetition_error_bruteforce([0.2] * 5) == pytest.approx(
        sum(math.comb(5, k) * 0.2**k * 0.8 ** (5 - k) for k in (3, 4, 5)))
    assert repetition_avg(0.1) == pytest.approx(0.028)
    with pytest.raises(ValueError):
        repetition_error([0.1, 1.2, 0.0])


@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0])
def test_instance_mean_does_not_depend_on_spread(alpha):
    e = repetition_instances(0.1, alpha, 200_000, np.random.default_rng(2))
    se = e.std() / math.sqrt(e.size) if alpha else 1e-15
    assert abs(e.mean() - repetition_avg(0.1)) <= 4 * se


def test_all_order_variance_matches_sampling():
    e = repetition_instances(0.1, 0.3, 1_000_000, np.random.default_rng(3))
    assert e.var() == pytest.approx(repetition_variance_exact(0.1, 0.03), rel=0.02)


def test_leading_variance():
    assert repetition_variance_leading(0.1, 0.03) == pytest.approx(12 * 0.03**2 * 0.01 + 3 * 0.03**4)
    assert repetition_variance_leading(0.1, [0.01, 0.02, 0.03]) == pytest.approx(
        4 * 0.01 * (1e-4 + 4e-4 + 9e-4) + (1e-4 * 4e-4 + 4e-4 * 9e-4 + 1e-4 * 9e-4))
    # both forms share the 12 s^2 e^2 term and part with the e^3, s^2 e terms
    s = 1e-4
    assert repetition_variance_leading(0.01, s) == pytest.approx(repetition_variance_exact(0.01, s), rel=0.03)
    assert repetition_variance_exact(0.1, 0.0) == 0.0


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.4])
def test_quadrature_matches_sampling(alpha):
    rng = np.random.default_rng(int(alpha * 10))
    t1 = np.abs(rng.normal(MU, alpha * MU, 2_000_000))
    r = TAU / np.maximum(t1, 1e-6)
    quad = reciprocal_normal_mean_numeric(TAU, MU, alpha * MU)
    assert abs(r.mean() - quad) <= 4 * r.std() / math.sqrt(r.size)


def test_quadrature_values_and_series():
    vals = [reciprocal_normal_mean_numeric(TAU, MU, a * MU) for a in (0.0, 0.05, 0.1, 0.3, 0.5)]
    assert vals[0] == pytest.approx(1e-3)
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[1] == pytest.approx(1.002519e-3, rel=1e-5)
    assert vals[2] == pytest.approx(1.010316e-3, rel=1e-5)
    assert reciprocal_normal_mean_approx(TAU, MU, 0.05 * MU) == pytest.approx(vals[1], rel=0.01)
    assert reciprocal_normal_mean_approx(TAU, MU, 0.1 * MU) == pytest.approx(1.00125e-3)
    assert reciprocal_normal_mean_approx(TAU, MU, 0.5 * MU) < vals[4]


def test_quadrature_input_checks():
    with pytest.raises(ValueError):
        reciprocal_normal_mean_numeric(TAU, -MU, MU)
    with pytest.raises(ValueError):
        reciprocal_normal_mean_numeric(TAU, MU, MU, floor=0)


def test_folded_normal_moments():
    rng = np.random.default_rng(5)
    for mean, sigma in ((1.0, 0.5), (1.0, 2.0), (0.0, 1.0)):
        x = np.abs(rng.normal(mean, sigma, 1_000_000))
        m, sd = folded_normal_moments(mean, sigma)
        assert m == pytest.approx(x.mean(), rel=5e-3)
        assert sd == pytest.approx(x.std(), rel=5e-3)
    assert folded_normal_moments(-2.0, 0.0) == (2.0, 0.0)
    assert folded_normal_moments(0.0, 1.0)[0] == pytest.approx(math.sqrt(2 / math.pi))


def test_aggregate_fixture():
    st = aggregate_sweep([10, 20, 30], 1000)
    assert st.grand_mean == pytest.approx(0.02)
    assert st.sigma_out == pytest.approx(0.01)
    assert st.se_sigma == pytest.approx(0.01 / 2)
    assert st.se_mean == pytest.approx(0.01 / math.sqrt(3))
    assert st.n_instances == 3 and not st.single_instance
    assert st.as_dict()["grand_mean"] == pytest.approx(0.02)


def test_aggregate_floors_se_at_shot_noise():
    st = aggregate_sweep([50, 50, 50, 50], [1000, 1000, 1000, 1000])
    shot = math.sqrt(0.05 * 0.95 / 1000)
    assert st.sigma_out == 0.0
    assert st.se_mean == pytest.approx(shot / 2)


def test_aggregate_single_instance():
    st = aggregate_sweep([7], 100)
    assert st.single_instance and math.isnan(st.sigma_out) and math.isnan(st.se_sigma)
    assert st.se_mean == pytest.approx(math.sqrt(0.07 * 0.93 / 100))


@pytest.mark.parametrize("fails,shots", [([], 10), ([11], 10), ([1], 0), ([-1], 10)])
def test_aggregate_rejects(fails, shots):
    with pytest.raises(ValueError):
        aggregate_sweep(fails, shots)
