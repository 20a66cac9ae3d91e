"""Exception hierarchy for estimation failures and input validation.

The command line interface maps these classes onto exit codes:
validation problems exit 2, insufficient data exits 3, degenerate
statistics exit 4, and I/O failures exit 5.
"""


class MaxratioError(Exception):
    """Base class for every error raised by this package."""


class InputValidationError(MaxratioError, ValueError):
    """Arguments, data, or configuration are malformed."""


class DimensionMismatchError(InputValidationError):
    """An element, set, or law does not match the cone dimension."""


class LawValidationError(InputValidationError):
    """Distribution parameters do not define a valid law."""


class PlanError(InputValidationError):
    """No valid grouping (n, m) exists for the requested sizes."""


class OverlappingPartitionError(InputValidationError):
    """Sphere sets that were declared disjoint share an atom."""


class InsufficientDataError(MaxratioError):
    """The dataset is too small for the requested grouping."""


class DegenerateStatisticError(MaxratioError):
    """Base class for statistics that are undefined on the given data."""


class DegenerateElementError(DegenerateStatisticError):
    """The origin has no direction."""


class DegenerateGroupError(DegenerateStatisticError):
    """Every element of a group has norm zero, so the ratio is undefined."""


class DegenerateVarianceError(DegenerateStatisticError):
    """A studentized statistic has a zero variance estimate."""


class DivergingEstimateError(DegenerateStatisticError):
    """All ratios equal one (S_n = n), so the tail index estimate diverges.

    This usually means the group size m is too small or the data shows
    no tail decay at all.
    """


class ZeroEstimateError(DegenerateStatisticError):
    """All ratios equal zero (S_n = 0), so the tail index estimate is zero."""


class NumericError(MaxratioError):
    """An internal numeric routine failed to converge.

    For inverse-CDF sampling this indicates an invalid law despite the
    parameter checks, and is treated as a validation failure by the CLI.
    """
