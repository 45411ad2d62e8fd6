"""Shift-operator deformations S~ = S + T(S) with T(S) = eps*I + T1*S."""
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_same_dim, check_square_matrix, check_symmetric
from .shift import ShiftKind, ShiftOperator, operator_norm, spectral_decomposition


class PerturbationWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class PerturbationModel:
    """Absolute term ``epsilon * I`` plus relative term ``t1 @ S``.

    With ``symmetrize`` the relative term becomes ``(t1 @ S + S @ t1) / 2``
    so that S~ stays symmetric.
    """

    epsilon: float
    t1: np.ndarray
    symmetrize: bool = False

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        t1 = np.array(check_square_matrix(self.t1, "t1"), copy=True)
        check_symmetric(t1, "t1")
        nrm = operator_norm(t1)
        if nrm >= 1.0:
            raise ValueError(f"||T1|| = {nrm:.4g} must be < 1")
        if nrm >= 0.5:
            warnings.warn(f"||T1|| = {nrm:.4g} is not small; first-order "
                          "bounds may be loose", PerturbationWarning,
                          stacklevel=2)
        t1.setflags(write=False)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "t1", t1)

    @property
    def n(self):
        return self.t1.shape[0]

    @classmethod
    def null(cls, n):
        return cls(0.0, np.zeros((n, n)))

    def scaled(self, c):
        return PerturbationModel(self.epsilon * c, self.t1 * c, self.symmetrize)


def make_random_t1(n, norm, seed):
    """Symmetrized Gaussian matrix rescaled to spectral norm ``norm``."""
    if not 0.0 < norm < 1.0:
        raise ValueError(f"target norm must lie in (0, 1), got {norm}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    t1 = 0.5 * (g + g.T)
    return t1 * (norm / operator_norm(t1))


def make_commuting_t1(s, norm, seed):
    """T1 = U diag(mu) U^T sharing the eigenvectors of S, so [S, T1] = 0.

    ``mu`` is drawn with magnitudes ordered like |lambda| (descending |mu|
    on descending |lambda|) so the commutation factor's eigen-pairing
    recovers T1 exactly.
    """
    if not 0.0 < norm < 1.0:
        raise ValueError(f"target norm must lie in (0, 1), got {norm}")
    w, u = spectral_decomposition(s)
    rng = np.random.default_rng(seed)
    mags = np.sort(rng.uniform(0.1, 1.0, w.size))[::-1]
    signs = rng.choice([-1.0, 1.0], w.size)
    mu = np.empty(w.size)
    mu[_rank_order(w)] = mags * signs
    mu *= norm / np.max(np.abs(mu))
    return (u * mu) @ u.T


def perturbation_matrix(s, m):
    """Assemble T(S)."""
    check_same_dim(s.n, m.n, "shift and perturbation")
    rel = m.t1 @ s.matrix
    if m.symmetrize:
        rel = 0.5 * (rel + rel.T)
    t = rel
    if m.epsilon:
        t = rel + m.epsilon * np.eye(s.n)
    return t


def perturbed_shift(s, m):
    """S~ = S + T(S). Generally non-symmetric unless ``m.symmetrize``."""
    return ShiftOperator(s.matrix + perturbation_matrix(s, m), ShiftKind.CUSTOM)


def perturbation_norm(s, m):
    return operator_norm(perturbation_matrix(s, m))


def perturbation_frechet_norm(m):
    """Norm of the derivative of S -> T(S).

    The map is affine, its derivative is the constant map D -> T1 D (or its
    symmetrized version), whose induced norm is ||T1|| in both cases.
    """
    return operator_norm(m.t1)


@dataclass(frozen=True, eq=False)
class CommutationAnalysis:
    t_c1: np.ndarray
    p1: np.ndarray
    delta: float
    residual: float
    degenerate: bool


def _rank_order(values, tol=0.0):
    """Indices sorted by descending |v|, ties broken by descending v."""
    v = np.asarray(values)
    return np.lexsort((-v, -np.abs(v)))


def _has_degenerate_magnitudes(w, scale):
    a = np.sort(np.abs(w))
    return bool(np.any(np.diff(a) <= 1e-8 * max(1.0, scale)))


def commutation_factor(s, t1):
    """Split S T1 = T_c1 S + S P1 and report delta = ||P1|| / ||T1||.

    T_c1 carries T1's eigenvalues on S's eigenvectors, paired by rank of
    magnitude. P1 is the minimum-norm solution via the pseudoinverse of S;
    when S is singular the split may not be exact and ``residual`` says by
    how much.
    """
    w, u = spectral_decomposition(s)
    t1 = check_symmetric(check_square_matrix(t1, "t1"), "t1")
    check_same_dim(s.n, t1.shape[0], "shift and t1")
    mu = np.linalg.eigvalsh(0.5 * (t1 + t1.T))

    mu_sorted = mu[_rank_order(mu)]
    order_s = _rank_order(w)
    paired = np.empty_like(mu)
    paired[order_s] = mu_sorted
    t_c1 = (u * paired) @ u.T

    sm = s.matrix
    rhs = sm @ t1 - t_c1 @ sm
    p1 = np.linalg.pinv(sm) @ rhs
    residual = operator_norm(sm @ p1 - rhs)
    t1_norm = operator_norm(t1)
    s_norm = operator_norm(sm)
    if residual > 1e-6 * s_norm * t1_norm:
        warnings.warn(f"commutation split inexact (residual {residual:.3e}); "
                      "S is rank-deficient", PerturbationWarning, stacklevel=2)
    delta = operator_norm(p1) / t1_norm if t1_norm > 0 else 0.0
    return CommutationAnalysis(t_c1, p1, float(delta), float(residual),
                               _has_degenerate_magnitudes(w, s_norm))
