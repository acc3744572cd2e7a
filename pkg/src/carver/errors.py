"""Exception hierarchy shared by all carver modules.

Each class carries the process exit code the CLI maps it to:
2 for malformed input or configuration, 3 for a violated mathematical
precondition, 4 for insufficient grid resolution.  InvariantError marks
conditions the construction guarantees; reaching one is a bug.
"""


class CarverError(Exception):
    exit_code = 1


class InputError(CarverError, ValueError):
    """Malformed file, unknown option, or out-of-range parameter."""

    exit_code = 2


class PreconditionError(CarverError, ValueError):
    """A mathematical precondition does not hold for the given data."""

    exit_code = 3


class ResolutionError(CarverError, ValueError):
    """The grid is too coarse for the requested operation."""

    exit_code = 4


class InvariantError(CarverError, RuntimeError):
    """A provable property of the construction failed to hold."""

    exit_code = 1
