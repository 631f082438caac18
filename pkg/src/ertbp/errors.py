"""Exception hierarchy and the CLI exit-code mapping."""


class ErtbpError(Exception):
    """Base class for all package errors."""


class CollisionSingularity(ErtbpError):
    """Trajectory passed below the collision floor of a primary."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class NonpositiveLeadingCoefficient(ErtbpError):
    """jet_pow requires a strictly positive constant term."""


class OrderMismatch(ErtbpError):
    """Jet arithmetic on jets of different truncation order."""


class ToleranceNotMet(ErtbpError):
    """Adaptive step control could not reach the requested tolerance."""


class DegenerateStep(ErtbpError):
    """Finite-difference perturbation below the precision floor."""


class SingularJacobian(ErtbpError):
    """|det(M - I)| below the configured floor in Newton refinement."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class BudgetExceeded(ErtbpError):
    """Grid search would exceed the propagation budget."""


class MalformedRecord(ErtbpError):
    """Unparseable line in a Horizons-format ephemeris file."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class NetworkUnavailable(ErtbpError):
    """Fetch requested while offline and the cache is cold."""


class UpstreamFormatChange(ErtbpError):
    """Fetched payload no longer parses as Horizons vector records."""


class LengthMismatch(ErtbpError):
    """Sequence comparison on sequences of different lengths."""


class UnsupportedDate(ErtbpError):
    """Calendar date outside the supported proleptic-Gregorian range."""


class NonConvergence(ErtbpError):
    """Derivative-free fit exhausted its budget; best-so-far attached."""

    def __init__(self, message, best_params=None, best_stats=None):
        super().__init__(message)
        self.best_params = best_params
        self.best_stats = best_stats


class ConfigError(ErtbpError):
    """Invalid run configuration or CLI arguments."""


# Every error type named by a module contract maps to exactly one exit code.
EXIT_CODES = {
    ConfigError: 2,
    CollisionSingularity: 3,
    SingularJacobian: 4,
    NetworkUnavailable: 5,
    MalformedRecord: 6,
    BudgetExceeded: 7,
    ToleranceNotMet: 8,
    LengthMismatch: 9,
    UnsupportedDate: 10,
    UpstreamFormatChange: 11,
    DegenerateStep: 12,
    OrderMismatch: 13,
    NonpositiveLeadingCoefficient: 14,
    NonConvergence: 15,
}


def exit_code_for(exc):
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 1
