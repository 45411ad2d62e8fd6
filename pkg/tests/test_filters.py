import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from algstab import (PolynomialFilter, ShiftOperator, apply_filter,
                     build_cyclic_shift, certify_class, design_filter,
                     frequency_response, spectral_decomposition)
from algstab.exceptions import DesignError
from algstab.filters import grid_certificate, read_filter, write_filter

from conftest import random_symmetric


def explicit_powers(c, m):
    out = np.zeros_like(m)
    power = np.eye(m.shape[0])
    for h in c:
        out += h * power
        power = power @ m
    return out


def circular_convolution(x, h):
    n = x.size
    y = np.zeros(n)
    for i in range(n):
        for k, hk in enumerate(h):
            y[i] += hk * x[(i - k) % n]
    return y


def test_identity_filter_applies_shift(rng):
    s = ShiftOperator(random_symmetric(6, 0))
    x = rng.standard_normal(6)
    np.testing.assert_allclose(apply_filter(PolynomialFilter([0, 1]), s, x), s.matrix @ x)


def test_constant_filter_scales():
    x = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(apply_filter(PolynomialFilter([2.5]), np.eye(3), x), 2.5 * x)


def test_square_of_cyclic_delays_by_two():
    y = apply_filter(PolynomialFilter([0, 0, 1]), build_cyclic_shift(3), [1, 0, 0])
    np.testing.assert_array_equal(y, [0, 0, 1])


def test_horner_matches_explicit_powers():
    s = random_symmetric(8, 3)
    x = np.random.default_rng(3).standard_normal(8)
    c = [1.0, 2.0, 3.0, 4.0]
    np.testing.assert_allclose(apply_filter(PolynomialFilter(c), s, x),
                               explicit_powers(c, s) @ x, rtol=1e-10)
    np.testing.assert_allclose(PolynomialFilter(c).matrix(s), explicit_powers(c, s),
                               rtol=1e-10, atol=1e-12)


def test_frequency_response_examples():
    np.testing.assert_array_equal(frequency_response(PolynomialFilter([0, 0, 1]), [-2, 0, 2]),
                                  [4, 0, 4])
    np.testing.assert_array_equal(PolynomialFilter([5])(np.arange(4)), [5] * 4)
    assert PolynomialFilter([1, 1, 1])(2.0) == 7.0


def test_degree_trims_tiny_trailing_coefficients():
    assert PolynomialFilter([1.0, 2.0, 1e-16]).degree == 1
    assert PolynomialFilter([0.0]).degree == 0


@pytest.mark.parametrize("coefs, interval, l0, l1", [
    ([0, 1], (-1, 1), 1.0, 1.0),
    ([0, 0, 1], (-1, 1), 2.0, 2.0),
    ([0, -1, 0, 1], (-2, 2), 11.0, 22.0),
])
def test_certificate_closed_forms(coefs, interval, l0, l1):
    cert = certify_class(PolynomialFilter(coefs), interval)
    assert cert.l0 == l0
    assert cert.l1 == l1
    grid = grid_certificate(PolynomialFilter(coefs), interval)
    assert abs(grid.l0 - cert.l0) <= 1e-8 * (1 + cert.l0)
    assert abs(grid.l1 - cert.l1) <= 1e-8 * (1 + cert.l1)


def test_certificate_interior_maximum():
    # p' = 1 - 3 l^2 peaks at 1 in the interior of [-0.5, 0.5]
    p = PolynomialFilter([0, 1, 0, -1])
    cert = certify_class(p, (-0.5, 0.5))
    assert cert.l0 == pytest.approx(1.0, abs=1e-14)
    # |l - 3 l^3| peaks at l = 1/3 with value 2/9
    assert cert.l1 == pytest.approx(2 / 9, abs=1e-14)


def test_constant_filter_certificate_is_zero():
    cert = certify_class(PolynomialFilter([3.0]), (-5, 5))
    assert (cert.l0, cert.l1) == (0.0, 0.0)


def test_certificate_rejects_reversed_interval():
    with pytest.raises(ValueError):
        certify_class(PolynomialFilter([0, 1]), (1, -1))


def test_design_exact_interpolation():
    lam = np.linspace(-1, 1, 5)
    filt, _ = design_filter(lam, lam ** 2, 2)
    np.testing.assert_allclose(filt.coefficients, [0, 0, 1], atol=1e-10)


def test_design_zero_target():
    filt, cert = design_filter(np.linspace(-1, 1, 9), np.zeros(9), 3)
    assert not np.any(filt.coefficients)
    assert (cert.l0, cert.l1) == (0.0, 0.0)


def test_design_with_lipschitz_ceiling():
    lam = np.linspace(-1, 1, 64)
    target = np.exp(-(lam - 0.8) ** 2 / (2 * 0.05 ** 2))
    filt, cert = design_filter(lam, target, 12, l0_max=5.0, interval=(-1, 1))
    assert cert.l0 <= 5.0
    grid = grid_certificate(filt, (-1, 1))
    assert grid.l0 <= 5.0 + 1e-8


def test_design_unreachable_reports_last_certificate():
    lam = np.linspace(-1, 1, 32)
    with pytest.raises(DesignError) as info:
        design_filter(lam, lam ** 3, 3, l0_max=1e-30, max_iter=5)
    assert info.value.certificate.l0 > 1e-30


def test_design_needs_enough_points():
    with pytest.raises(ValueError, match="distinct"):
        design_filter([0.0, 0.0, 1.0], [1.0, 1.0, 2.0], 2)


def test_filter_file_round_trip(tmp_path):
    p = PolynomialFilter([0.5, -1.25, 1 / 3])
    write_filter(tmp_path / "f.txt", p)
    np.testing.assert_array_equal(read_filter(tmp_path / "f.txt").coefficients, p.coefficients)


coefs = st.lists(st.floats(-2, 2), min_size=1, max_size=5)


@settings(max_examples=40, deadline=None)
@given(c=coefs, n=st.integers(2, 16), seed=st.integers(0, 2**32 - 1))
def test_polynomial_and_spectral_action_agree(c, n, seed):
    s = ShiftOperator(random_symmetric(n, seed))
    x = np.random.default_rng(seed).standard_normal(n)
    p = PolynomialFilter(c)
    w, u = spectral_decomposition(s)
    spectral = u @ (p(w) * (u.T @ x))
    y = apply_filter(p, s, x)
    assert np.linalg.norm(y - spectral) <= 1e-8 * max(1.0, np.linalg.norm(y))


@settings(max_examples=40, deadline=None)
@given(a=coefs, b=coefs, n=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_homomorphism_products_preserved(a, b, n, seed):
    s = random_symmetric(n, seed)
    x = np.random.default_rng(seed + 1).standard_normal(n)
    p, q = PolynomialFilter(a), PolynomialFilter(b)
    lhs = apply_filter(p * q, s, x)
    rhs = apply_filter(p, s, apply_filter(q, s, x))
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(1.0, np.linalg.norm(lhs))


@settings(max_examples=25, deadline=None)
@given(c=st.lists(st.floats(-3, 3), min_size=2, max_size=9),
       lo=st.floats(-2, 0), width=st.floats(0.1, 4))
def test_certificate_sound_against_grid(c, lo, width):
    p = PolynomialFilter(c)
    interval = (lo, lo + width)
    cert = certify_class(p, interval)
    grid = grid_certificate(p, interval, points=100_001)
    assert grid.l0 <= cert.l0 + 1e-8 * (1 + cert.l0)
    assert grid.l1 <= cert.l1 + 1e-8 * (1 + cert.l1)


@pytest.mark.parametrize("n", [4, 16, 64])
def test_cyclic_filter_is_circular_convolution(n):
    rng = np.random.default_rng(n)
    h = rng.standard_normal(6)
    x = rng.standard_normal(n)
    y = apply_filter(PolynomialFilter(h), build_cyclic_shift(n), x)
    np.testing.assert_allclose(y, circular_convolution(x, h), atol=1e-10)
