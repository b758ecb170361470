import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kpbloch.asymptotics import (
    condition_c,
    condition_c_value,
    coupling_modulus,
    eigen_asym,
    gap_phase,
    gap_prediction,
)
from kpbloch.oracle import bands_and_gaps
from kpbloch.potential import d_term, new_potential
from kpbloch.series import antiperiodic, first, periodic

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "scripts"))
from asymptotic_study import eigen_residuals, gap_residuals, loglog_slope  # noqa: E402

PI = math.pi
POTENTIALS = [(-PI**2, 0.5), (-3.0, 0.3), (-20.0, 0.37)]


def test_first_gap_prediction(example):
    g = gap_prediction(example, 1)
    assert g.first_order == pytest.approx(4 * PI, rel=1e-14)
    assert abs(g.first_order - 12.440867038680) == pytest.approx(0.126, abs=1e-3)


def test_second_gap_prediction(example):
    g = gap_prediction(example, 2)
    assert g.first_order == 0.0
    assert g.second_order == pytest.approx(PI**2 / 4, rel=1e-13)


@pytest.mark.parametrize("k", range(2, 81, 2))
def test_even_gaps_have_no_first_order_term(example, k):
    assert gap_prediction(example, k).first_order == 0.0


@given(st.floats(min_value=-30.0, max_value=-0.1), st.floats(min_value=0.05, max_value=0.95),
       st.integers(min_value=1, max_value=500))
def test_prediction_fields(a, c, k):
    p = new_potential(a, c)
    g = gap_prediction(p, k)
    assert g.first_order >= 0 and g.second_order >= 0
    assert 0 <= g.theta < 2 * PI
    assert g.theta == gap_phase(p, k)


def test_prediction_rejects_k0(example):
    with pytest.raises(ValueError):
        gap_prediction(example, 0)


@pytest.mark.parametrize("n", [1, 3, 10, 40])
def test_eigen_asym_pair_split_is_second_order_gap(example, n):
    for sec, k in ((periodic, 2 * n), (antiperiodic, 2 * n - 1)):
        split = eigen_asym(example, sec(n, 2)) - eigen_asym(example, sec(n, 1))
        assert split == pytest.approx(gap_prediction(example, k).second_order, abs=1e-14 * (PI * k) ** 2)


@pytest.mark.parametrize("n", [1, 2, 5, 20])
def test_eigen_asym_symmetric_step_midpoint(example, n):
    mid = 0.5 * (eigen_asym(example, periodic(n, 1)) + eigen_asym(example, periodic(n, 2)))
    assert mid == pytest.approx((2 * PI * n) ** 2 + PI**2 / (16 * n * n), rel=1e-14)
    half = 0.5 * (eigen_asym(example, periodic(n, 2)) - eigen_asym(example, periodic(n, 1)))
    assert half == pytest.approx(coupling_modulus(example, 2 * n), rel=1e-14)


def test_exact_shift_variant_differs_at_third_order(example):
    scaled = []
    for n in (4, 8, 16, 32):
        sec = periodic(n, 1)
        diff = eigen_asym(example, sec, exact_shift=True) - eigen_asym(example, sec)
        assert diff == pytest.approx(d_term(example, 2 * n) + example.a * example.b / (16 * PI**2 * n * n))
        scaled.append(abs(diff) * n**3)
    assert max(scaled) < 1.0


def test_eigen_asym_rejects_first(example):
    with pytest.raises(ValueError):
        eigen_asym(example, first())


def test_condition_c_symmetric_step_odd_indices(example):
    assert condition_c_value(example, 1) == pytest.approx(2 * PI / math.sqrt(4 * PI**2 + PI**4 / 4), rel=1e-12)
    assert not condition_c(example, 1, 1.0)
    assert all(condition_c(example, k, 1.0) for k in range(3, 100, 2))


def test_condition_c_even_indices_reduce_to_phase(example):
    for k in range(2, 40, 2):
        assert condition_c_value(example, k) == pytest.approx(abs(math.sin(gap_phase(example, k))), abs=1e-12)


def test_condition_c_rejects_bad_eps(example):
    with pytest.raises(ValueError):
        condition_c(example, 1, 0.0)
    with pytest.raises(ValueError):
        condition_c_value(example, 0)


@pytest.mark.parametrize("a, c", POTENTIALS)
def test_gap_decay_trends(a, c):
    p = new_potential(a, c)
    ks, first_err, second_err = gap_residuals(p, 1, 40)
    k = np.array(ks, dtype=float)
    assert loglog_slope(ks, k * np.array(first_err)).slope < 0
    assert loglog_slope(ks, k**2 * np.array(second_err)).slope < 0


@pytest.mark.parametrize("a, c", POTENTIALS)
def test_orders_converge_faster_than_inverse_k(a, c):
    p = new_potential(a, c)
    ks = list(range(5, 41))
    gaps = [abs(gap_prediction(p, k).second_order - gap_prediction(p, k).first_order) for k in ks]
    nonzero = [(k, g) for k, g in zip(ks, gaps) if g > 0]
    s = loglog_slope(*zip(*nonzero))
    assert s.slope < -1


@pytest.mark.parametrize("a, c", POTENTIALS)
def test_scaled_eigenvalue_residual_trend(a, c):
    p = new_potential(a, c)
    ns, per, anti = eigen_residuals(p, 5, 40)
    assert loglog_slope(ns, per).slope < 0
    assert loglog_slope(ns, anti).slope < 0
