import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from algstab import (AlgNN, AlgNNTransformer, FilterDesigner, Layer,
                     Nonlinearity, PolynomialFilter, PolynomialGraphFilter,
                     ShiftOperator, apply_filter, network_forward)
from algstab.exceptions import DimensionError

from conftest import random_symmetric


def test_filter_designer_recovers_quadratic():
    lam = np.linspace(-1, 1, 11)
    est = FilterDesigner(degree=2).fit(lam, 1 - lam ** 2)
    np.testing.assert_allclose(est.coef_, [1, 0, -1], atol=1e-10)
    np.testing.assert_allclose(est.predict([0.5]), [0.75])
    assert est.score(lam, 1 - lam ** 2) == pytest.approx(1.0)
    assert est.certificate_.l0 == pytest.approx(2.0)


def test_filter_designer_params_and_clone():
    est = FilterDesigner(degree=5, l0_max=2.0)
    assert est.get_params() == {"degree": 5, "l0_max": 2.0, "l1_max": None, "interval": None}
    twin = clone(est.set_params(degree=3))
    assert twin.degree == 3 and not hasattr(twin, "filter_")


def test_filter_designer_constraint_respected():
    lam = np.linspace(-1, 1, 64)
    est = FilterDesigner(degree=8, l1_max=0.5).fit(lam, np.tanh(8 * lam))
    assert est.certificate_.l1 <= 0.5


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        FilterDesigner().predict([0.0])
    with pytest.raises(NotFittedError):
        PolynomialGraphFilter(shift=np.eye(2)).transform(np.ones((1, 2)))


def test_graph_filter_transform_matches_apply_filter():
    s = random_symmetric(7, 0)
    X = np.random.default_rng(0).standard_normal((5, 7))
    c = (0.5, -1.0, 0.25, 0.1)
    Y = PolynomialGraphFilter(shift=s, coefficients=c).fit_transform(X)
    for x, y in zip(X, Y):
        np.testing.assert_allclose(y, apply_filter(PolynomialFilter(c), s, x), rtol=1e-12)


def test_graph_filter_checks_width():
    est = PolynomialGraphFilter(shift=np.eye(3)).fit()
    with pytest.raises(DimensionError):
        est.transform(np.ones((2, 4)))


def test_pipeline_composition():
    s = ShiftOperator(random_symmetric(6, 1))
    X = np.random.default_rng(1).standard_normal((4, 6))
    pipe = make_pipeline(PolynomialGraphFilter(s, (0, 1)), PolynomialGraphFilter(s, (1, 1)))
    expected = apply_filter(PolynomialFilter([0, 1, 1]), s, X[0])
    np.testing.assert_allclose(pipe.fit_transform(X)[0], expected, rtol=1e-12)


def test_algnn_transformer_rows():
    s = ShiftOperator(random_symmetric(4, 2))
    net = AlgNN((Layer(s, (PolynomialFilter([0.1, 1.0]),), Nonlinearity("relu")),))
    X = np.random.default_rng(2).standard_normal((3, 4))
    out = AlgNNTransformer(net).fit_transform(X)
    for x, y in zip(X, out):
        np.testing.assert_array_equal(y, network_forward(net, x))
    with pytest.raises(ValueError):
        AlgNNTransformer(network="nope").fit()
