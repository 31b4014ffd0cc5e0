"""Exception hierarchy shared by every declab module."""


class DeclabError(Exception):
    """Base class for all declab errors."""


class ConfigError(DeclabError):
    """Raised for malformed or invalid experiment configurations (exit code 2)."""


class ParseError(ConfigError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class UnknownExperiment(ConfigError):
    pass


class MissingKey(ConfigError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"missing required key '{name}'")


class ValidationError(ConfigError):
    pass


class MultipleSweepAxes(ConfigError):
    pass


# numerical / runtime failures (exit code 3)


class NonHermitian(DeclabError):
    pass


class DimensionTooLarge(DeclabError):
    pass


class DimensionMismatch(DeclabError):
    pass


class CutoffTooSmall(DeclabError):
    pass


class FitFailed(DeclabError):
    pass


class InsufficientPoints(FitFailed):
    pass


class NonPositiveInput(DeclabError):
    pass


class SupportMismatch(DeclabError):
    pass


class NegativeDensity(DeclabError):
    pass


class NeutralityViolation(DeclabError):
    pass


class GeometryMismatch(DeclabError):
    pass


class SingularTime(DeclabError):
    pass


class NonNeutralSource(DeclabError):
    pass


class VelocityOverflow(DeclabError):
    pass


class CFLViolation(DeclabError):
    pass


class NonFiniteValue(DeclabError):
    pass
