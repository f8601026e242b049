"""Exception types raised across the pipeline."""


class InputError(ValueError):
    """Unreadable or invalid user input (files, dimensions, parameters)."""


class DegenerateInputError(ValueError):
    """A curve too small or too degenerate for the requested operation."""


class UndefinedMetricError(ValueError):
    """A metric was requested on data for which it is not defined."""
