"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: invalid input is exit 2, numerical
failures are exit 3.
"""


class TriviewError(Exception):
    """Base class for all errors raised by this package."""


class InputValidationError(TriviewError):
    """Malformed or inconsistent input: bad descriptors, out-of-range
    indices, overlapping selections, shape mismatches."""


class NumericalError(TriviewError):
    """A computation could not produce a meaningful result: degenerate
    (zero-variance) input or a solver that failed to converge."""


class JobCancelled(TriviewError):
    """A long-running job was cancelled cooperatively."""
