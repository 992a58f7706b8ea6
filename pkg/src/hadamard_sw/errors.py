"""Exception hierarchy shared by the library and the command line front end."""


class HadamardSWError(Exception):
    """Base class for all errors raised by :mod:`hadamard_sw`."""

    exit_code = 1


class SchemaError(HadamardSWError, ValueError):
    """Malformed configuration document or point-cloud file."""

    exit_code = 2


class DescriptorMismatch(HadamardSWError, ValueError):
    """Two objects live on different manifolds."""

    exit_code = 3


class NumericFailure(HadamardSWError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""

    exit_code = 4

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotPositiveDefinite(NumericFailure):
    pass


class DomainError(NumericFailure, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConstraintViolation(NumericFailure, ValueError):
    """A point or tangent vector does not satisfy its manifold constraint."""


class DegenerateDirection(NumericFailure, ValueError):
    """Slicing direction with repeated eigenvalues (affine-invariant Busemann)."""


class UnsupportedProjection(HadamardSWError, NotImplementedError):
    """No closed form is available for this (manifold, projection) pair."""

    exit_code = 2


class DivergenceError(NumericFailure):
    """An iterative scheme produced non-finite values."""

    exit_code = 5

    def __init__(self, message, step=None, residual=None):
        super().__init__(message, residual=residual)
        self.step = step
