"""Shift operators: concrete realizations S = rho(g) of a single-generator algebra.

Covers the three classical instantiations (cyclic delay, graph shifts,
discretized graphon operators) plus arbitrary user matrices, and the
spectral services every other module relies on.
"""
import enum
import threading
from dataclasses import dataclass, field

import numpy as np

from ._validation import (check_signal, check_square_matrix, check_symmetric,
                          is_symmetric)
from .exceptions import DimensionError, NumericalError

EIG_RTOL = 1e-8


class ShiftKind(enum.Enum):
    CYCLIC_DELAY = "cyclic-delay"
    GRAPH_ADJACENCY = "graph-adjacency"
    GRAPH_LAPLACIAN = "graph-laplacian"
    GRAPHON_KERNEL = "graphon-kernel"
    CUSTOM = "custom"


class GraphVariant(enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    NORMALIZED_ADJACENCY = "normalized-adjacency"


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """Dense realization of the algebra generator on an N-dimensional space.

    The matrix is copied and frozen on construction. The eigendecomposition
    is computed at most once, on first request, and only for symmetric
    matrices.
    """

    matrix: np.ndarray
    kind: ShiftKind = ShiftKind.CUSTOM
    _spectrum: list = field(default_factory=list, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False,
                                  repr=False)

    def __post_init__(self):
        m = np.array(check_square_matrix(self.matrix, "shift matrix"),
                     dtype=np.float64, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def symmetric(self):
        return is_symmetric(self.matrix)

    @property
    def normal(self):
        m = self.matrix
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        return bool(np.max(np.abs(m @ m.T - m.T @ m)) <= 1e-10 * scale)

    @property
    def norm(self):
        return operator_norm(self.matrix)

    @property
    def spectrum(self):
        """Cached (ascending eigenvalues, orthonormal eigenvectors)."""
        if not self._spectrum:
            with self._lock:
                if not self._spectrum:
                    self._spectrum.append(_decompose(self.matrix))
        return self._spectrum[0]

    def __matmul__(self, x):
        return self.matrix @ x


def _decompose(m):
    check_symmetric(m, "shift matrix")
    sym = 0.5 * (m + m.T)
    w, u = np.linalg.eigh(sym)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    residual = operator_norm(sym - (u * w) @ u.T)
    if residual > EIG_RTOL * scale:
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} exceeds "
            f"{EIG_RTOL:g} * {scale:.3e}")
    w.setflags(write=False)
    u.setflags(write=False)
    return Spectrum(w, u)


def spectral_decomposition(s):
    """Return ``(eigenvalues, eigenvectors)`` of a symmetric shift, ascending.

    Raises NotSymmetricError for non-symmetric operators such as the cyclic
    delay, whose spectrum is complex.
    """
    sp = s.spectrum
    return sp.eigenvalues, sp.eigenvectors


def operator_norm(m):
    """Spectral norm (largest singular value) of a dense matrix."""
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ValueError("operator_norm: non-finite entries")
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        return float(np.linalg.norm(m))
    return float(np.linalg.norm(m, 2))


def apply_operator(s, x):
    x = check_signal(x, s.n)
    return s.matrix @ x


def build_cyclic_shift(n):
    """N x N cyclic delay: column i carries a single 1 in row (i + 1) mod N."""
    if int(n) != n or n < 1:
        raise ValueError(f"cyclic shift needs n >= 1, got {n}")
    n = int(n)
    m = np.zeros((n, n))
    m[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    return ShiftOperator(m, ShiftKind.CYCLIC_DELAY)


def _adjacency(edges, n):
    if int(n) != n or n < 1:
        raise ValueError(f"graph needs n >= 1, got {n}")
    n = int(n)
    a = np.zeros((n, n))
    for edge in edges:
        i, j, w = (*edge, 1.0) if len(edge) == 2 else edge
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise DimensionError(f"edge ({i}, {j}) out of range for n={n}")
        if not np.isfinite(w):
            raise ValueError(f"edge ({i}, {j}) has non-finite weight {w}")
        a[i, j] = w
        a[j, i] = w
    return a


def build_graph_shift(edges, n, variant=GraphVariant.ADJACENCY):
    """Shift operator of an undirected weighted graph.

    Edges are ``(i, j, w)`` or ``(i, j)`` tuples with 0-based indices; each
    edge is symmetrized and repeated edges overwrite earlier weights.
    """
    variant = GraphVariant(variant)
    a = _adjacency(edges, n)
    if variant is GraphVariant.ADJACENCY:
        return ShiftOperator(a, ShiftKind.GRAPH_ADJACENCY)
    if variant is GraphVariant.LAPLACIAN:
        return ShiftOperator(np.diag(a.sum(axis=1)) - a,
                             ShiftKind.GRAPH_LAPLACIAN)
    lam_max = float(np.max(np.abs(np.linalg.eigvalsh(a))))
    if lam_max == 0.0:
        raise ValueError("normalized adjacency undefined for an empty graph")
    return ShiftOperator(a / lam_max, ShiftKind.GRAPH_ADJACENCY)


def build_graphon_shift(kernel, n):
    """Midpoint discretization of a graphon integral operator.

    ``kernel`` must be vectorized over numpy arrays: ``kernel(u, v)`` with
    broadcastable ``u``, ``v`` in [0, 1].
    """
    if int(n) != n or n < 1:
        raise ValueError(f"graphon discretization needs n >= 1, got {n}")
    n = int(n)
    x = (np.arange(n) + 0.5) / n
    w = np.broadcast_to(np.asarray(kernel(x[:, None], x[None, :]),
                                   dtype=np.float64), (n, n))
    if not np.all(np.isfinite(w)) or w.min() < 0.0 or w.max() > 1.0:
        raise ValueError("graphon kernel values must lie in [0, 1]")
    check_symmetric(w, "graphon kernel samples")
    return ShiftOperator(w / n, ShiftKind.GRAPHON_KERNEL)


def erdos_renyi_edges(n, p, rng):
    """Edge list of a G(n, p) draw; deterministic for a given ``rng`` state."""
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.shape[0]) < p
    return [(int(i), int(j), 1.0) for i, j in zip(iu[keep], ju[keep])]


def path_edges(n):
    return [(i, i + 1, 1.0) for i in range(n - 1)]


def cycle_edges(n):
    if n < 3:
        return path_edges(n)
    return [(i, (i + 1) % n, 1.0) for i in range(n)]


# --- file formats -----------------------------------------------------------

def _content_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def read_matrix(path):
    """Read the plain-text matrix format: ``N`` then N rows of N scalars."""
    with open(path) as fh:
        lines = list(_content_lines(fh.read()))
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    n = int(lines[0])
    rows = [[float(v) for v in line.split()] for line in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionError(f"{path}: expected {n} rows of {n} values")
    return np.array(rows, dtype=np.float64).reshape(n, n)


def write_matrix(path, m):
    m = np.asarray(m, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(f"{m.shape[0]}\n")
        for row in m:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_edge_list(path):
    """Read ``i j w`` lines; blank lines and ``#`` comments are skipped."""
    edges = []
    with open(path) as fh:
        for line in _content_lines(fh.read()):
            parts = line.split()
            if len(parts) == 2:
                parts.append("1")
            if len(parts) != 3:
                raise ValueError(f"{path}: bad edge line {line!r}")
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return edges


def shift_from_matrix(m, kind=ShiftKind.CUSTOM):
    return ShiftOperator(np.asarray(m, dtype=np.float64), kind)


def joint_interval(shifts, margin=0.05):
    """Certification interval covering the spectra of ``shifts`` with margin.

    The margin is ``margin`` times the spectral spread; a zero spread (e.g.
    S = cI) falls back to ``margin * max(1, |lambda|)``.
    """
    lows, highs = [], []
    for s in shifts:
        w, _ = spectral_decomposition(s)
        lows.append(w[0])
        highs.append(w[-1])
    lo, hi = float(min(lows)), float(max(highs))
    span = hi - lo
    pad = margin * span if span > 0 else margin * max(1.0, abs(lo), abs(hi))
    return (lo - pad, hi + pad)

