"""Frechet derivative of polynomial filters and the first-order stability check."""
from dataclasses import dataclass

import numpy as np

from ._validation import check_same_dim, check_square_matrix
from .shift import operator_norm
from .perturbation import perturbation_matrix, perturbed_shift


@dataclass(frozen=True, eq=False)
class FrechetApplication:
    matrix: np.ndarray
    norm: float


def _powers(m, k):
    out = [np.eye(m.shape[0])]
    for _ in range(k):
        out.append(out[-1] @ m)
    return out


def polynomial_frechet(p, s, t):
    """D_p(S){T} = sum_k h_k sum_{r<k} S^r T S^(k-1-r)."""
    sm = np.asarray(getattr(s, "matrix", s), dtype=np.float64)
    t = check_square_matrix(t, "direction")
    check_same_dim(sm.shape[0], t.shape[0], "shift and direction")
    c = p.trimmed
    k_max = c.size - 1
    out = np.zeros_like(t)
    if k_max == 0:
        return FrechetApplication(out, 0.0)
    pw = _powers(sm, k_max - 1)
    # group by r: sum_r S^r T (sum_{k>r} h_k S^(k-1-r))
    for r in range(k_max):
        right = sum(c[k] * pw[k - 1 - r] for k in range(r + 1, k_max + 1))
        out += pw[r] @ t @ right
    return FrechetApplication(out, operator_norm(out))


def filter_deviation(p, s, s_tilde):
    """Worst-case deviation ||p(S) - p(S~)|| over unit-norm signals."""
    check_same_dim(s.n, s_tilde.n, "nominal and perturbed shifts")
    return operator_norm(p.matrix(s.matrix) - p.matrix(s_tilde.matrix))


def remainder_coefficient(p, radius):
    """Taylor-remainder constant for p on the ball of operator radius ``radius``.

    ||p(S+T) - p(S) - D_p(S){T}|| <= coefficient * ||T||^2 whenever the whole
    segment S + sT stays within ``radius``; by convexity of the norm
    ``max(||S||, ||S~||)`` is such a radius.
    """
    c = np.abs(p.trimmed)
    k = np.arange(c.size)
    terms = c[2:] * k[2:] * (k[2:] - 1) / 2.0 * radius ** (k[2:] - 2.0)
    return float(np.sum(terms))


@dataclass(frozen=True)
class DeviationRecord:
    lhs: float
    first_order: float
    t_norm: float
    budget: float
    passed: bool


def theorem1_check(p, s, m, quadratic_budget=None):
    """Compare ||p(S) - p(S~)|| against ||D_p(S){T(S)}|| + budget*||T(S)||^2.

    When ``quadratic_budget`` is None the rigorous remainder coefficient is
    used.
    """
    t = perturbation_matrix(s, m)
    s_tilde = perturbed_shift(s, m)
    lhs = filter_deviation(p, s, s_tilde)
    first = polynomial_frechet(p, s, t).norm
    t_norm = operator_norm(t)
    if quadratic_budget is None:
        quadratic_budget = remainder_coefficient(
            p, max(operator_norm(s.matrix), operator_norm(s_tilde.matrix)))
    budget = quadratic_budget * t_norm ** 2
    return DeviationRecord(lhs, first, t_norm, budget,
                          bool(lhs <= first + budget + 1e-12))
