"""Exception hierarchy shared by every module."""


class ClusterRadiusError(Exception):
    """Base class for domain errors raised by the library."""


class DomainError(ClusterRadiusError, ValueError):
    pass


class ClassificationError(ClusterRadiusError):
    """The potential does not belong to the class an operation requires."""


class TemperednessError(ClusterRadiusError):
    pass


class SummabilityError(ClusterRadiusError):
    pass


class EnumerationRangeError(ClusterRadiusError, ValueError):
    pass


class ConstructionError(ClusterRadiusError):
    """The appendix construction could not find an admissible truncation radius."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}
