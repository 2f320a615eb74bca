"""Exception types.

Every error carries a short machine-readable ``code`` (e.g. ``"TIED_MINIMUM"``)
and the process exit status the CLI maps it to.
"""

from __future__ import annotations


class TailexError(Exception):
    exit_code = 4

    def __init__(self, code: str, message: str = "", **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)


class InputError(TailexError, ValueError):
    """Malformed input: bad values, sizes, files or columns."""

    exit_code = 2


class DegenerateSampleError(TailexError, ValueError):
    """The sample is valid but the requested estimator is undefined on it."""

    exit_code = 3


class HarnessError(TailexError, RuntimeError):
    exit_code = 4
