"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class ValidationError(ValueError):
    """Input violates a documented precondition or invariant."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed (quadrature, factorization, PSD check)."""


class QuadratureError(NumericalError):
    pass


class NotPSDError(NumericalError):
    """Spectral mass matrix has an eigenvalue below the PSD tolerance."""
