"""Layered algebraic neural networks and their perturbation bounds.

Each layer filters its input with one polynomial of its own shift operator,
applies a pointwise nonlinearity with eta(0) = 0, then a linear pooling map.
"""
import enum
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_same_dim, check_signal
from .exceptions import DimensionError
from .filters import apply_filter, certify_class
from .frechet import remainder_coefficient
from .perturbation import perturbation_norm, perturbed_shift
from .shift import joint_interval, operator_norm


class NonlinearityKind(enum.Enum):
    RELU = "relu"
    ABS = "abs"
    TANH = "tanh"
    LEAKY_RELU = "leaky-relu"
    IDENTITY = "identity"


@dataclass(frozen=True)
class Nonlinearity:
    kind: NonlinearityKind = NonlinearityKind.RELU
    slope: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "kind", NonlinearityKind(self.kind))

    @property
    def lipschitz(self):
        if self.kind is NonlinearityKind.LEAKY_RELU:
            return max(1.0, abs(self.slope))
        return 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        k = self.kind
        if k is NonlinearityKind.RELU:
            return np.maximum(x, 0.0)
        if k is NonlinearityKind.ABS:
            return np.abs(x)
        if k is NonlinearityKind.TANH:
            return np.tanh(x)
        if k is NonlinearityKind.LEAKY_RELU:
            return np.where(x >= 0.0, x, self.slope * x)
        return x.copy()


@dataclass(frozen=True, eq=False)
class PoolingMap:
    matrix: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        if m.ndim != 2:
            raise DimensionError("pooling matrix must be 2-D")
        nrm = operator_norm(m)
        if nrm > 1.0:
            m = m / nrm
            nrm = operator_norm(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "norm", nrm)

    @property
    def n_in(self):
        return self.matrix.shape[1]

    @property
    def n_out(self):
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))

    @classmethod
    def blocks(cls, sizes):
        """Average contiguous index blocks; rows scaled to unit Euclidean norm."""
        sizes = [int(b) for b in sizes]
        if not sizes or min(sizes) < 1:
            raise ValueError("block sizes must be positive")
        m = np.zeros((len(sizes), sum(sizes)))
        start = 0
        for row, b in enumerate(sizes):
            m[row, start:start + b] = 1.0 / np.sqrt(b)
            start += b
        return cls(m)

    def __call__(self, x):
        return self.matrix @ x


@dataclass(frozen=True, eq=False)
class Layer:
    """One algebraic signal model plus the map sigma = pooling o eta.

    ``b`` is the largest operator norm in the filter bank evaluated on the
    nominal shift. It is computed once and carried unchanged into perturbed
    copies of the layer.
    """

    shift: object
    filters: tuple
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    pooling: PoolingMap = None
    filter_index: int = 0
    certificates: tuple = None
    b: float = None

    def __post_init__(self):
        filters = tuple(self.filters)
        if not filters:
            raise ValueError("a layer needs at least one filter")
        object.__setattr__(self, "filters", filters)
        if self.pooling is None:
            object.__setattr__(self, "pooling", PoolingMap.identity(self.shift.n))
        check_same_dim(self.pooling.n_in, self.shift.n, "pooling input and shift")
        if not 0 <= self.filter_index < len(filters):
            raise IndexError(f"filter_index {self.filter_index} out of range")
        if self.certificates is None and self.shift.symmetric:
            interval = joint_interval([self.shift])
            object.__setattr__(self, "certificates",
                               tuple(certify_class(p, interval) for p in filters))
        if self.b is None:
            object.__setattr__(self, "b", self.bank_norm())

    @property
    def n_in(self):
        return self.shift.n

    @property
    def n_out(self):
        return self.pooling.n_out

    @property
    def c(self):
        return self.pooling.norm * self.nonlinearity.lipschitz

    @property
    def filter(self):
        return self.filters[self.filter_index]

    @property
    def certificate(self):
        return None if self.certificates is None else self.certificates[self.filter_index]

    def bank_norm(self):
        """max_p ||p(S)||, spectrally when S is symmetric."""
        if self.shift.symmetric:
            w = self.shift.spectrum.eigenvalues
            return float(max(np.max(np.abs(p(w))) for p in self.filters))
        return float(max(operator_norm(p.matrix(self.shift.matrix))
                         for p in self.filters))

    def sigma(self, u):
        return self.pooling(self.nonlinearity(u))


@dataclass(frozen=True, eq=False)
class AlgNN:
    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("an AlgNN needs at least one layer")
        for a, b in zip(layers, layers[1:]):
            check_same_dim(a.n_out, b.n_in, "consecutive layers")
        object.__setattr__(self, "layers", layers)

    def __len__(self):
        return len(self.layers)

    @property
    def n_in(self):
        return self.layers[0].n_in

    @property
    def n_out(self):
        return self.layers[-1].n_out


def layer_forward(layer, x, filter_index=None):
    """x_out = P eta(p(S) x) for the selected filter of the bank."""
    idx = layer.filter_index if filter_index is None else filter_index
    if not 0 <= idx < len(layer.filters):
        raise IndexError(f"filter index {idx} out of range")
    x = check_signal(x, layer.n_in)
    return layer.sigma(apply_filter(layer.filters[idx], layer.shift, x))


def bank_forward(layer, x):
    """One output feature per filter in the bank, shape (n_filters, n_out)."""
    return np.stack([layer_forward(layer, x, i) for i in range(len(layer.filters))])


def network_forward(net, x, feature_plan=None, return_intermediate=False):
    """Single-feature forward pass.

    ``feature_plan`` lists one filter index per layer; None uses each
    layer's designated ``filter_index``.
    """
    if feature_plan is None:
        feature_plan = [layer.filter_index for layer in net.layers]
    if len(feature_plan) != len(net):
        raise DimensionError("feature plan needs one index per layer")
    xs = [check_signal(x, net.n_in)]
    for layer, idx in zip(net.layers, feature_plan):
        xs.append(layer_forward(layer, xs[-1], idx))
    return xs if return_intermediate else xs[-1]


def perturb_network(net, perturbations):
    if len(perturbations) != len(net):
        raise DimensionError(
            f"{len(perturbations)} perturbations for {len(net)} layers")
    return AlgNN(tuple(replace(layer, shift=perturbed_shift(layer.shift, m))
                       for layer, m in zip(net.layers, perturbations)))


def network_deviation(net, net_tilde, x):
    if len(net) != len(net_tilde) or any(
            a.n_in != b.n_in or a.n_out != b.n_out
            for a, b in zip(net.layers, net_tilde.layers)):
        raise DimensionError("networks are not structurally identical")
    return float(np.linalg.norm(network_forward(net, x) - network_forward(net_tilde, x)))


def perturbation_size(delta, l0, l1, sup_t_norm, sup_dt_norm):
    """(1 + delta) (L0 sup||T|| + L1 sup||D_T||)."""
    return (1.0 + delta) * (l0 * sup_t_norm + l1 * sup_dt_norm)


def layer_bound(layer, delta, cert, sup_t_norm, sup_dt_norm):
    """Per-unit-input bound C (1 + delta)(L0 sup||T|| + L1 sup||D_T||)."""
    return layer.c * perturbation_size(delta, cert.l0, cert.l1,
                                       sup_t_norm, sup_dt_norm)


def compose_bound(cs, bs, sizes):
    """sum_l size_l (prod_{r>=l} C_r)(prod_{r>l} B_r)(prod_{r<l} C_r B_r)."""
    cs, bs, sizes = (np.asarray(v, dtype=np.float64) for v in (cs, bs, sizes))
    if not len(cs) == len(bs) == len(sizes):
        raise DimensionError("per-layer lists must have equal length")
    total = 0.0
    for l in range(len(sizes)):
        total += (sizes[l] * np.prod(cs[l:]) * np.prod(bs[l + 1:])
                  * np.prod(cs[:l] * bs[:l]))
    return float(total)


def network_bound(net, per_layer):
    """Per-unit-input network bound from per-layer dicts.

    Each entry needs keys ``delta``, ``l0``, ``l1``, ``sup_t_norm`` and
    ``sup_dt_norm``.
    """
    if len(per_layer) != len(net):
        raise DimensionError("need one constants record per layer")
    sizes = [perturbation_size(d["delta"], d["l0"], d["l1"], d["sup_t_norm"],
                               d["sup_dt_norm"]) for d in per_layer]
    return compose_bound([l.c for l in net.layers], [l.b for l in net.layers], sizes)


def composed_deviation_bound(cs, bs, sizes, remainders):
    """Rigorous per-unit-input deviation bound including second-order terms.

    Runs the recursion e_l = C_l (E_l a_l + (B_l + E_l) e_{l-1}) with
    E_l = size_l + remainder_l and a_l = prod_{r<l} C_r B_r, which bounds
    the nominal intermediate norm. Dropping the E_l e_{l-1} cross terms and
    the remainders recovers ``compose_bound`` exactly.
    """
    e, a = 0.0, 1.0
    for c, b, d, r in zip(cs, bs, sizes, remainders):
        big = d + r
        e = c * (big * a + (b + big) * e)
        a *= c * b
    return float(e)


def layer_remainder(layer, m):
    """Second-order budget coefficient times ||T||^2 for one layer."""
    s_tilde = perturbed_shift(layer.shift, m)
    radius = max(operator_norm(layer.shift.matrix), operator_norm(s_tilde.matrix))
    return remainder_coefficient(layer.filter, radius) * perturbation_norm(layer.shift, m) ** 2
