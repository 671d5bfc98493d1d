"""Exception hierarchy. ``exit_code`` is the CLI status for each failure class."""


class JetGeodesicError(Exception):
    exit_code = 1


class ConfigError(JetGeodesicError, ValueError):
    exit_code = 1


class IdenticallyZero(JetGeodesicError, ValueError):
    exit_code = 1


class NoHillInterval(JetGeodesicError):
    exit_code = 2


class UnboundedInterval(JetGeodesicError, ValueError):
    exit_code = 3


class CriticalEndpoint(JetGeodesicError):
    exit_code = 3


class OutsideHill(JetGeodesicError, ValueError):
    exit_code = 1


class NoConvergence(JetGeodesicError, ArithmeticError):
    exit_code = 4


class InconsistentComputation(JetGeodesicError):
    exit_code = 4


class PerturbationLeavesClass(JetGeodesicError):
    exit_code = 4


class IntegratorError(JetGeodesicError):
    exit_code = 5


class BadInitialEnergy(IntegratorError, ValueError):
    pass


class StepSizeUnderflow(IntegratorError):
    pass
