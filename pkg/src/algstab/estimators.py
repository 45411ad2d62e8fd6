"""scikit-learn compatible wrappers around filter design and forward passes.

These make the algebraic operators composable with ``Pipeline`` and the
usual ``get_params``/``set_params``/``clone`` machinery.
"""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_signals
from .algnn import AlgNN, network_forward
from .filters import PolynomialFilter, certify_class, design_filter
from .shift import ShiftOperator, joint_interval


def _as_shift(shift):
    if isinstance(shift, ShiftOperator):
        return shift
    if shift is None:
        raise ValueError("a shift operator is required")
    return ShiftOperator(np.asarray(shift, dtype=np.float64))


class FilterDesigner(RegressorMixin, BaseEstimator):
    """Least-squares polynomial frequency-response fit with class constraints.

    Parameters
    ----------
    degree : int
        Polynomial degree K (at most 32).
    l0_max, l1_max : float or None
        Optional Lipschitz / integral-Lipschitz ceilings; the fitted
        polynomial is shrunk uniformly until both hold.
    interval : (float, float) or None
        Certification interval; defaults to the range of the training
        frequencies.
    """

    def __init__(self, degree=4, l0_max=None, l1_max=None, interval=None):
        self.degree = degree
        self.l0_max = l0_max
        self.l1_max = l1_max
        self.interval = interval

    def fit(self, X, y):
        lam = np.asarray(X, dtype=np.float64).reshape(-1)
        filt, cert = design_filter(lam, y, self.degree, self.l0_max,
                                   self.l1_max, self.interval)
        self.filter_ = filt
        self.certificate_ = cert
        self.coef_ = filt.coefficients
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "filter_")
        return self.filter_(np.asarray(X, dtype=np.float64).reshape(-1))


class PolynomialGraphFilter(TransformerMixin, BaseEstimator):
    """Apply p(S) to each row of a signal matrix.

    ``fit`` only validates the shift and certifies the filter over the
    shift's spectral interval (when the shift is symmetric); no data is
    learned.
    """

    def __init__(self, shift=None, coefficients=(0.0, 1.0)):
        self.shift = shift
        self.coefficients = coefficients

    def fit(self, X=None, y=None):
        self.shift_ = _as_shift(self.shift)
        self.filter_ = PolynomialFilter(self.coefficients)
        self.n_features_in_ = self.shift_.n
        if X is not None:
            check_signals(X, self.shift_.n)
        self.certificate_ = None
        if self.shift_.symmetric:
            self.certificate_ = certify_class(self.filter_,
                                              joint_interval([self.shift_]))
        return self

    def transform(self, X):
        check_is_fitted(self, "filter_")
        X = check_signals(X, self.n_features_in_)
        c = self.filter_.trimmed
        st = self.shift_.matrix.T
        Y = c[-1] * X
        for h in c[-2::-1]:
            Y = Y @ st + h * X
        return Y


class AlgNNTransformer(TransformerMixin, BaseEstimator):
    """Row-wise single-feature forward pass of an AlgNN."""

    def __init__(self, network=None, feature_plan=None):
        self.network = network
        self.feature_plan = feature_plan

    def fit(self, X=None, y=None):
        if not isinstance(self.network, AlgNN):
            raise ValueError("network must be an AlgNN instance")
        self.network_ = self.network
        self.n_features_in_ = self.network.n_in
        if X is not None:
            check_signals(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "network_")
        X = check_signals(X, self.n_features_in_)
        return np.stack([network_forward(self.network_, x, self.feature_plan)
                         for x in X])
