"""Exception types shared by every module of the package."""

__all__ = ["ValidationError", "NumericalError"]


class ValidationError(ValueError):
    """An argument or parameter set violates a documented contract.

    The message names the violated constraint so callers (and the CLI,
    which maps this to exit code 2) can report it without guessing.
    """


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced an invalid state.

    Mapped to exit code 3 by the CLI.
    """
