"""Exception types raised across the package."""


class JordanHessianError(Exception):
    """Base class for all package errors."""


class DimensionError(JordanHessianError, ValueError):
    pass


class NotCommutativeError(JordanHessianError, ValueError):
    pass


class NotJordanError(JordanHessianError, ValueError):
    pass


class DegenerateFormError(JordanHessianError, ValueError):
    pass


class UnsupportedFamilyError(JordanHessianError, TypeError):
    """Spectral calculus requested on an algebra without a Euclidean family tag."""


class SpectralDomainError(JordanHessianError, ValueError):
    """Eigenvalue condition violated (log of a nonpositive value, inverse of zero, ...)."""


class DomainError(JordanHessianError, ValueError):
    """Point outside the domain of a potential."""


class DivergenceError(DomainError):
    """Power series evaluated outside its convergence region."""


class ConvergenceError(JordanHessianError, RuntimeError):
    pass


class DegenerateHessianError(JordanHessianError, ValueError):
    pass


class ReconstructionError(JordanHessianError, ValueError):
    """Third-derivative parallelism residual too large to read off an algebra."""


class StencilDomainError(DomainError):
    """A finite-difference stencil point left the domain of the field."""
