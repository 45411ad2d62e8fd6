"""Exception hierarchy shared by the library and the CLI."""


class AlgStabError(Exception):
    """Base class for all library errors."""


class DimensionError(AlgStabError, ValueError):
    """Operand shapes do not line up."""


class NotSymmetricError(AlgStabError, ValueError):
    """A spectrum-dependent routine received a non-symmetric operator.

    Spectral services (eigendecomposition, commutation factor, certified
    intervals) work in real orthonormal form and therefore only accept
    symmetric shift operators. Cyclic shifts can still be filtered and
    normed, but not decomposed.
    """


class NumericalError(AlgStabError, ArithmeticError):
    """A numerical routine breached its residual tolerance."""


class ConfigError(AlgStabError, ValueError):
    """Experiment configuration is malformed."""


class DesignError(AlgStabError):
    """Constrained filter design did not reach its targets.

    The last filter and certificate tried are attached so callers can
    report how far off the design ended up.
    """

    def __init__(self, message, filt=None, certificate=None):
        super().__init__(message)
        self.filter = filt
        self.certificate = certificate
