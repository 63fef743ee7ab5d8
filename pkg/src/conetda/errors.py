"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when caller-supplied data violates a precondition."""


class InvariantError(RuntimeError):
    """Raised when an internal invariant is found broken.

    Seeing one of these from a valid input means a bug in this package.
    """
