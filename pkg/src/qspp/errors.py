"""Exception hierarchy shared by all modules."""


class QsppError(Exception):
    """Base class for errors raised by qspp."""


class DomainError(QsppError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotFoundError(QsppError):
    """A root or bracket that should exist could not be located."""


class NoBoundModeError(DomainError):
    """No bound surface mode exists (lossless permittivity not below -1)."""


class UnmatchableError(DomainError):
    """The prism cannot supply enough in-plane momentum at this frequency."""


class NumericalSingularityError(QsppError, ArithmeticError):
    """The boundary-value system is singular."""


class InfeasibleError(QsppError):
    """No thickness in the requested range satisfies the penetration constraint."""


class ScaleError(DomainError):
    """Input exceeds the size the exact combinatorial routines accept."""


class InternalError(QsppError, AssertionError):
    """A computed quantity violated an invariant that holds by construction."""


class PartialBandError(QsppError):
    """Part of a frequency band cannot be mode-matched.

    ``report`` holds the metrics computed over the matchable sub-band
    ``sub_band``.
    """

    def __init__(self, message, report, sub_band):
        super().__init__(message)
        self.report = report
        self.sub_band = sub_band


class ConfigError(QsppError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
