"""Polynomial algebraic filters p(g) = sum_k h_k g^k and their class constants."""
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from ._validation import check_signal
from .exceptions import DesignError, DimensionError

TRIM_TOL = 1e-14
MAX_DESIGN_DEGREE = 32


@dataclass(frozen=True, eq=False)
class PolynomialFilter:
    """Algebra element with monomial coefficients ``(h_0, ..., h_K)``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.float64, copy=True).ravel()
        if c.size == 0:
            c = np.zeros(1)
        if not np.all(np.isfinite(c)):
            raise ValueError("filter coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self):
        nz = np.flatnonzero(np.abs(self.coefficients) > TRIM_TOL)
        return int(nz[-1]) if nz.size else 0

    @property
    def trimmed(self):
        return self.coefficients[:self.degree + 1]

    def derivative(self):
        return PolynomialFilter(P.polyder(self.trimmed) if self.degree else [0.0])

    def __call__(self, lambdas):
        return frequency_response(self, lambdas)

    def __add__(self, other):
        return PolynomialFilter(P.polyadd(self.coefficients, other.coefficients))

    def __mul__(self, other):
        if np.isscalar(other):
            return PolynomialFilter(self.coefficients * float(other))
        return PolynomialFilter(P.polymul(self.coefficients, other.coefficients))

    __rmul__ = __mul__

    def matrix(self, m):
        """Form p(M) explicitly by Horner's rule on matrices."""
        m = np.asarray(getattr(m, "matrix", m), dtype=np.float64)
        c = self.trimmed
        out = c[-1] * np.eye(m.shape[0])
        for h in c[-2::-1]:
            out = m @ out
            out[np.diag_indices_from(out)] += h
        return out

    def __repr__(self):
        return f"PolynomialFilter({list(self.coefficients)!r})"


@dataclass(frozen=True)
class FilterClassCertificate:
    """Lipschitz (l0) and integral-Lipschitz (l1) constants over ``interval``."""

    l0: float
    l1: float
    interval: tuple

    def satisfies(self, l0_max=None, l1_max=None):
        return ((l0_max is None or self.l0 <= l0_max)
                and (l1_max is None or self.l1 <= l1_max))


def apply_filter(p, s, x):
    """Return p(S) x using K matrix-vector products (Horner)."""
    m = getattr(s, "matrix", s)
    x = check_signal(x, m.shape[0])
    c = p.trimmed
    y = c[-1] * x
    for h in c[-2::-1]:
        y = m @ y + h * x
    return y


def frequency_response(p, lambdas):
    lam = np.asarray(lambdas, dtype=np.float64)
    return P.polyval(lam, p.trimmed)


def _real_roots_in(coefs, lo, hi):
    c = np.trim_zeros(np.asarray(coefs, dtype=np.float64), "b")
    if c.size <= 1:
        return np.empty(0)
    # companion-matrix eigenvalues; clustered roots can pick up ~sqrt(eps)
    # imaginary parts, so the realness test is loose on purpose
    z = P.polyroots(c)
    real = z.real[np.abs(z.imag) <= 1e-6 * (1.0 + np.abs(z))]
    return real[(real >= lo) & (real <= hi)]


def certify_class(p, interval):
    """Exact maxima of |p'| and |lambda p'| over a closed real interval.

    Candidates are the endpoints plus the interior critical points, found as
    companion-matrix roots of p'' (for L0) and of p' + lambda p'' (for L1).
    """
    lo, hi = (float(v) for v in interval)
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise ValueError(f"bad certification interval [{lo}, {hi}]")
    if p.degree == 0:
        return FilterClassCertificate(0.0, 0.0, (lo, hi))
    dp = P.polyder(p.trimmed)
    lam_dp = P.polymulx(dp)

    ends = np.array([lo, hi])
    pts0 = np.concatenate([ends, _real_roots_in(P.polyder(dp), lo, hi)])
    pts1 = np.concatenate([ends, _real_roots_in(P.polyder(lam_dp), lo, hi)])
    l0 = float(np.max(np.abs(P.polyval(pts0, dp))))
    l1 = float(np.max(np.abs(P.polyval(pts1, lam_dp))))
    return FilterClassCertificate(l0, l1, (lo, hi))


def grid_certificate(p, interval, points=1_000_000):
    """Dense-grid estimate of the class constants (test oracle)."""
    lo, hi = interval
    g = np.linspace(lo, hi, points)
    dp = P.polyval(g, P.polyder(p.trimmed)) if p.degree else np.zeros_like(g)
    return FilterClassCertificate(float(np.max(np.abs(dp))),
                                  float(np.max(np.abs(g * dp))), (lo, hi))


def design_filter(lambdas, response, degree, l0_max=None, l1_max=None,
                  interval=None, shrink=0.9, max_iter=200):
    """Least-squares polynomial fit, uniformly shrunk until certified.

    Returns ``(filter, certificate)``. Shrinking preserves the response
    shape; when the constraints are still violated after ``max_iter``
    shrink steps a DesignError carrying the last attempt is raised.
    """
    lam = np.asarray(lambdas, dtype=np.float64).ravel()
    resp = np.asarray(response, dtype=np.float64).ravel()
    if lam.shape != resp.shape:
        raise DimensionError("lambdas and response must have equal length")
    degree = int(degree)
    if not 0 <= degree <= MAX_DESIGN_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_DESIGN_DEGREE}]")
    if np.unique(lam).size < degree + 1:
        raise ValueError(f"need at least {degree + 1} distinct sample points")
    if interval is None:
        interval = (float(lam.min()), float(lam.max()))

    # fit in a scaled window for conditioning, then convert to monomials
    coefs = np.zeros(degree + 1)
    fitted = Polynomial.fit(lam, resp, degree).convert().coef
    coefs[:fitted.size] = fitted
    base = PolynomialFilter(coefs)
    filt, cert = base, certify_class(base, interval)
    scale = 1.0
    for _ in range(max_iter):
        if cert.satisfies(l0_max, l1_max):
            return filt, cert
        scale *= shrink
        filt = base * scale
        cert = certify_class(filt, interval)
    if cert.satisfies(l0_max, l1_max):
        return filt, cert
    raise DesignError(
        f"constraints l0<={l0_max}, l1<={l1_max} unreachable in {max_iter} "
        f"steps (last l0={cert.l0:.4g}, l1={cert.l1:.4g})", filt, cert)


def read_filter(path):
    """One coefficient per line, h_0 first; ``#`` comments allowed."""
    vals = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                vals.append(float(line))
    if not vals:
        raise ValueError(f"{path}: no coefficients")
    return PolynomialFilter(vals)


def write_filter(path, p):
    with open(path, "w") as fh:
        for h in p.coefficients:
            fh.write(f"{float(h)!r}\n")
