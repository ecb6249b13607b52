"""Exception hierarchy shared by every routelab module.

All errors raised on purpose by this package derive from RouteLabError so
callers can catch one type at the CLI boundary.
"""


class RouteLabError(Exception):
    """Base class for all routelab errors."""


class InvalidInstanceError(RouteLabError):
    """A graph instance is structurally unusable (too few nodes, NaN coords, ...)."""


class InvalidParameterError(RouteLabError):
    """A numeric or enum argument is outside its documented domain."""


class InvalidTourError(RouteLabError):
    """A tour is not a permutation of the instance's cities."""


class InstanceTooLargeError(RouteLabError):
    """The requested operation would exceed its documented size cap."""


class UnsupportedFormatError(RouteLabError):
    """A file declares a format variant this package does not handle."""


class MalformedInputError(RouteLabError):
    """A file or JSON document does not parse into the expected shape."""


class InvalidConfigurationError(RouteLabError):
    """A benchmark configuration is inconsistent or incomplete."""


class OracleViolationError(RouteLabError):
    """An internal cross-check failed; results cannot be trusted."""
