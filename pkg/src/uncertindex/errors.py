"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class UncertIndexError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(UncertIndexError, ValueError):
    """Malformed input record. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class UnknownTokenError(UncertIndexError, KeyError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(token)

    def __str__(self) -> str:
        return f"token {self.token!r} not in embedding table"


class AlignmentError(UncertIndexError, ValueError):
    """Series cannot be joined on a common gap-free monthly index."""

    def __init__(self, message: str, missing: dict[str, list[str]] | None = None):
        self.missing = missing or {}
        if self.missing:
            detail = "; ".join(
                f"{label} missing {', '.join(months)}" for label, months in self.missing.items()
            )
            message = f"{message}: {detail}"
        super().__init__(message)


class EstimationError(UncertIndexError, ArithmeticError):
    """Singular or rank-deficient design, or an infeasible sample."""


class ConfigError(UncertIndexError, ValueError):
    pass
