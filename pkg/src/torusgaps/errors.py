"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class TorusGapsError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TorusGapsError, ValueError):
    def __init__(self, message: str, text: str, offset: int, expected: str | None = None):
        self.text = text
        self.offset = offset
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at offset {offset}{hint}: {text!r}")


class PerfectPower(TorusGapsError, ValueError):
    """A sqrt/cbrt operand would produce a rational constant."""


class CertificationFailure(TorusGapsError):
    pass


class SymmetryViolation(TorusGapsError):
    pass


class DegeneracyError(TorusGapsError):
    def __init__(self, message: str, sites: tuple[int, ...] = ()):
        self.sites = tuple(sites)
        super().__init__(f"{message} (sites {list(self.sites)})" if sites else message)


class PartitionInconsistency(TorusGapsError):
    pass


class AmbiguousClustering(TorusGapsError):
    pass


class PairingViolation(TorusGapsError):
    pass


class ThreeGapViolation(TorusGapsError):
    pass


class OracleMismatch(TorusGapsError):
    def __init__(self, message: str, diagnostics: list[dict] | None = None):
        self.diagnostics = diagnostics or []
        super().__init__(message)
