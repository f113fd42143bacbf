"""Exception types shared across the package."""


class RezoneError(Exception):
    """Base class for all package errors."""


class NoConvergenceError(RezoneError):
    """An iterative solver exhausted its step budget without converging."""


class SingularJacobianError(RezoneError):
    """A Newton step blew up because the local Jacobian is (near-)singular."""


class MissingSaddleError(RezoneError):
    """A labeled saddle required by the operation does not exist at these parameters."""


class OnCurveError(RezoneError):
    """Parameters sit on (or within margin of) a bifurcation curve."""


class SingularDenominatorError(RezoneError):
    """The conservative-Euler map denominator 1 - alpha*mu1*sin(v) vanished."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class FlowStepUnderflow(RezoneError):
    """Adaptive integration step shrank below the representable minimum."""


class FlowBlowup(RezoneError):
    """Orbit left the admissible region (|u| exceeded the blowup bound)."""


class DegeneracyOrderError(RezoneError):
    """No degeneracy order j <= 4 could be certified at the given tolerance."""


class HarmonicReductionError(RezoneError):
    """Averaged coefficients violate the single-harmonic reduction preconditions."""


class NonRealMultipliersError(RezoneError):
    """Map fixed point is elliptic; no real invariant-manifold directions exist."""


class ConfigError(RezoneError):
    """Run configuration is malformed or out of range."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
