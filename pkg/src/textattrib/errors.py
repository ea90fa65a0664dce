"""Exception types shared across the package.

DataError covers everything caused by bad input files or arguments
(CLI exit code 2); anything else escaping to the CLI is an internal
error (exit code 3).
"""


class DataError(ValueError):
    """Invalid input data: malformed files, arity mismatches, bad values."""
