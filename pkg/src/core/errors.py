class TurboxError(Exception):
    """Base class for every model or solver failure raised by turbox."""


class ConfigError(TurboxError):
    pass


class DimensionMismatch(TurboxError):
    pass


class InvalidModel(TurboxError):
    pass


class InconsistentPaths(TurboxError):
    pass


class Disconnected(TurboxError):
    pass


class NotConfined(TurboxError):
    pass


class NonUniqueNullSpace(TurboxError):
    pass


class CrossCheckFailure(TurboxError):
    pass


class SingularGauge(TurboxError):
    pass


class CarnotLimit(TurboxError):
    """r0 == 0: the uncertainty has to come from the near-Carnot expansion."""


class ZeroCurrent(TurboxError):
    """g == 0: every current vanishes and Q is undefined."""


class UnknownReservoir(TurboxError):
    pass


class GapCollapse(TurboxError):
    pass


class NotQuadratic(TurboxError):
    pass


class AllStartsFailed(TurboxError):
    pass
