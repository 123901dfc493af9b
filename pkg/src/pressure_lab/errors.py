"""Exception hierarchy and warning categories.

Two broad families matter for the CLI exit-code mapping: validation
failures (bad inputs, malformed files, precondition breaches) map to
exit code 2, numerical failures (divergence, overflow, degeneracy)
map to exit code 3.
"""


class PressureLabError(Exception):
    """Base class for all library errors."""


class ValidationError(PressureLabError):
    """Invalid input, file, or precondition breach (CLI exit code 2)."""


class NumericalError(PressureLabError):
    """A numerical procedure failed to produce a usable result (CLI exit code 3)."""


# -- validation family --------------------------------------------------

class NonIrreducible(ValidationError):
    """Transition graph is not strongly connected."""


class SupportMismatch(ValidationError):
    """Measure places mass on an edge the model forbids."""


class MissingDirection(ValidationError):
    """Queried point is not covered by the splitting estimate."""


class InvalidEntropy(ValidationError):
    """Requested entropy value cannot be realized by the graph family."""


class OrderingViolated(ValidationError):
    """Multi-attractor entropy ordering conditions fail."""


class RationalAlpha(ValidationError):
    """Rotation number is (numerically) rational with a small denominator."""


class TruncationTooCoarse(ValidationError):
    """Induced-partition truncation leaves too much unassigned mass."""


class MalformedCurve(ValidationError):
    """Curve file or grid fails basic structural checks."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class CurveNotConvex(ValidationError):
    """Sampled curve violates the convexity invariant beyond tolerance."""


class UnknownMap(ValidationError):
    """Map name not present in the built-in registry."""


class UnknownClaim(ValidationError):
    """Reproduction claim id not in the registry."""


class UnknownScenario(ValidationError):
    """Scenario kind not recognized."""


# -- numerical family ---------------------------------------------------

class NoConvergence(NumericalError):
    """Iterative solver failed to reach the requested residual."""


class NumericalOverflow(NumericalError):
    """Cocycle norms left the representable range."""


class DegenerateSplitting(NumericalError):
    """Cocycle products show no discernible dominated splitting."""


class DegenerateMap(NumericalError):
    """Newton matrix singular at (essentially) every seed."""


class NewtonDivergence(NumericalError):
    """Newton iteration diverged for a seed (dropped, not fatal)."""


# -- warnings ------------------------------------------------------------

class IncompleteOrbitSetWarning(UserWarning):
    """Periodic-orbit search found fewer orbits than the completeness oracle expects."""


class EmptyClassWarning(UserWarning):
    """No periodic orbit falls in the requested sign class."""
