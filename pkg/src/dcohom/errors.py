"""Exception hierarchy shared by all dcohom modules.

Every error a command can surface maps to a distinct CLI exit code, so the
classes here are deliberately flat and fine-grained.
"""

from __future__ import annotations


class DcohomError(Exception):
    """Base class for all library errors."""


class SpaceMismatch(DcohomError):
    """Operands live over different coordinate algebras."""


class TwistMismatch(DcohomError):
    """Operands carry different twisting 2-forms."""


class DegreeOverflow(DcohomError):
    """A differential was applied at the top of a finite complex."""


class NotClosed(DcohomError):
    """A form required to be closed has nonzero exterior derivative."""


class UnsupportedSpace(DcohomError):
    """The space falls outside the exactly-computable catalog rules."""


class NotSquarefree(DcohomError):
    """A localizing denominator shares a factor with its derivative."""


class ContainmentError(DcohomError):
    """Subspace argument is not contained in the ambient span."""


class BoundExceeded(DcohomError):
    """Evaluation of a tabulated cochain left its tabulation bound."""


class NotStabilized(DcohomError):
    """Windowed dimensions did not agree across consecutive windows.

    Carries the partial report so callers can inspect what was computed.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ReductionFailure(DcohomError):
    """No commutator rewriting rule applies (bug signal on catalog spaces)."""


class ExtensionAxiomFailure(DcohomError):
    """A singular-extension axiom failed; the message names the axiom."""


class NotADerivation(DcohomError):
    """Generator images violate the linearized relation constraints."""


class UndefinedClass(DcohomError):
    """A cohomology-class label is missing from the supplied algebra data."""


class CenterAnomaly(DcohomError):
    """Center computation returned more than the scalars (hard failure)."""


class RouteMismatch(DcohomError):
    """Two independent computation routes disagree."""


class ParseError(DcohomError):
    """Expression could not be parsed; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


EXIT_CODES = {
    ParseError: 2,
    NotSquarefree: 3,
    UnsupportedSpace: 4,
    NotStabilized: 5,
    RouteMismatch: 6,
    NotClosed: 7,
    DegreeOverflow: 8,
    SpaceMismatch: 9,
    TwistMismatch: 10,
    BoundExceeded: 11,
    ContainmentError: 12,
    ReductionFailure: 13,
    ExtensionAxiomFailure: 14,
    NotADerivation: 15,
    UndefinedClass: 16,
    CenterAnomaly: 17,
}


def exit_code_for(exc: BaseException) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 70
