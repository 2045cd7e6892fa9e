"""Exception and warning types shared across the package."""


class GapfieldError(Exception):
    """Base class for all package errors."""


class DomainError(GapfieldError, ValueError):
    """Argument outside the admitted domain of a function."""


class RegionError(GapfieldError, ValueError):
    """Point outside the region where an asymptotic formula applies."""


class NonConvergenceError(GapfieldError, ArithmeticError):
    """An iteration or series failed to converge within its budget."""


class SlowConvergenceError(NonConvergenceError):
    """Series terms do not decay at the expected rate."""


class DecompositionMismatchError(GapfieldError, ArithmeticError):
    """The two equivalent decompositions of the normalising constant disagree."""


class SignConsistencyError(GapfieldError, ArithmeticError):
    """A closed form contradicts direct evaluation of the image series."""


class PolynomialParseError(GapfieldError, ValueError):
    """Malformed polynomial string."""


class NotHarmonicError(GapfieldError, ValueError):
    """A polynomial background has non-vanishing Laplacian."""

    def __init__(self, offending):
        self.offending = list(offending)
        terms = ", ".join(f"{c}*x1^{a}*x2^{b}*x3^{d}" for c, a, b, d in self.offending)
        super().__init__(f"Laplacian does not vanish; residual monomials: {terms}")


class QuadratureWarning(UserWarning):
    """Successive quadrature refinements disagree beyond tolerance."""


class NearSingularityWarning(UserWarning):
    """Evaluation point is very close to an image charge."""
