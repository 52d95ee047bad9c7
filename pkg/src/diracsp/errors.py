"""Exception types shared across the package."""


class FormatError(ValueError):
    """A text input (complex file, signal file, edge-flow CSV) failed to parse.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(RuntimeError):
    """A numerical routine broke down (SVD failure, indefinite regularizer,
    factorization breakdown, non-finite output)."""
