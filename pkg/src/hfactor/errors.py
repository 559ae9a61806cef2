"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user input: malformed files, out-of-range parameters, cap violations."""


class NoFactorError(InputError):
    """An operation that needs at least one factor was given a host with none."""


class InvariantError(RuntimeError):
    """An internal exact identity failed; indicates a bug, not bad input."""
