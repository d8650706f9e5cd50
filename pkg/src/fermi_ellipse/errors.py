"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """A boundary or run configuration violates a model invariant."""


class NumericError(RuntimeError):
    """Base class for numerical failures (solvers, degeneracies)."""


class SolverError(NumericError):
    """An iterative solver failed to converge."""


class BranchError(NumericError):
    """An angle left its admissible range, signalling a wrong branch."""


class CollisionError(NumericError):
    """A collision is tangential or happens from the outside."""


class LowEnergyError(NumericError):
    """The particle is too slow compared with the moving boundary."""


class DegeneracyError(NumericError):
    """A critical point or root is degenerate."""


class DomainError(ValueError):
    """A point lies outside the domain where an operation is defined."""


class BandError(NumericError):
    """The switching band is empty at the requested energy."""


class ConditioningWarning(RuntimeWarning):
    """Finite-difference estimates disagree under step refinement."""


class TruncationWarning(RuntimeWarning):
    """A truncated series has a tail that is not negligible."""
