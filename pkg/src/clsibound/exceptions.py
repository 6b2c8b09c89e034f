"""Exception types shared across the package."""


class NonHermitianError(ValueError):
    """Input matrix violates conjugate symmetry beyond tolerance."""


class PositivityError(ValueError):
    """An eigenvalue sits at or below the positivity floor where ln or a
    fractional power is required."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to converge within the refinement budget."""


class ConsistencyError(ArithmeticError):
    """Two independent computation routes for the same quantity disagree
    beyond tolerance (e.g. the two Fisher information forms), or a
    conditional expectation produced a non-positive output."""


class DegenerateStartError(RuntimeError):
    """Every optimizer restart landed on the fixed-point manifold."""


class NumericalIntegrityError(ArithmeticError):
    """A quantity that must be monotone (entropy along the semigroup)
    increased beyond tolerance."""


class GraphFormatError(ValueError):
    """Graph document failed to parse or validate."""


class DisconnectedGraphError(ValueError):
    """Operation requires a connected graph."""
