"""Algebraic signal models, polynomial filters and stability bounds for AlgNNs."""
from .algnn import (AlgNN, Layer, Nonlinearity, NonlinearityKind, PoolingMap,
                    bank_forward, compose_bound, composed_deviation_bound,
                    layer_bound, layer_forward, network_bound, perturbation_size,
                    network_deviation, network_forward, perturb_network)
from .estimators import AlgNNTransformer, FilterDesigner, PolynomialGraphFilter
from .exceptions import (AlgStabError, ConfigError, DesignError,
                         DimensionError, NotSymmetricError, NumericalError)
from .filters import (FilterClassCertificate, PolynomialFilter, apply_filter,
                      certify_class, design_filter, frequency_response)
from .frechet import (filter_deviation, polynomial_frechet,
                      remainder_coefficient, theorem1_check)
from .perturbation import (CommutationAnalysis, PerturbationModel,
                           commutation_factor, make_commuting_t1,
                           make_random_t1, perturbation_frechet_norm,
                           perturbation_matrix, perturbation_norm,
                           perturbed_shift)
from .shift import (GraphVariant, ShiftKind, ShiftOperator, apply_operator,
                    build_cyclic_shift, build_graph_shift, build_graphon_shift,
                    cycle_edges, erdos_renyi_edges, joint_interval,
                    operator_norm, path_edges, spectral_decomposition)

__version__ = "0.1.0"
