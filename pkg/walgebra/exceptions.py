"""Exception hierarchy shared by the services and the command line.

Every error carries the process exit code the CLI reports for it.
"""
from typing import List, Optional


class WAlgebraError(Exception):
    """Base class for all errors raised by the engine."""

    exit_code = 1

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ConfigError(WAlgebraError):
    """Invalid input: unknown orbit, malformed stage list or label table."""

    exit_code = 4


class UnsupportedOrbitError(WAlgebraError):
    """The orbit has no realization or the solver cannot handle it."""

    exit_code = 3


class CertificateError(WAlgebraError):
    """An identity that must hold exactly failed.

    Args:
        message: Summary of the failed identity
        failures: Named counterexample entries, e.g. offending index tuples
    """

    exit_code = 2

    def __init__(self, message: str, failures: Optional[List[str]] = None, stage: Optional[str] = None):
        super().__init__(message, stage=stage)
        self.failures = list(failures or [])

    def __str__(self) -> str:
        text = super().__str__()
        if self.failures:
            shown = "; ".join(self.failures[:5])
            more = f" (+{len(self.failures) - 5} more)" if len(self.failures) > 5 else ""
            text = f"{text}: {shown}{more}"
        return text


# symcore
class VariableTableError(ConfigError):
    """Operands live in polynomial rings with different variable tables."""


class JetOrderError(WAlgebraError):
    """A jet variable beyond the ring's truncation order was required."""


class RelationError(ConfigError):
    """A minimal polynomial is not monic or the auxiliaries depend circularly."""


class BranchPointError(UnsupportedOrbitError):
    """The derivative of a minimal polynomial is not invertible in the quotient ring."""


class SingularSystemError(CertificateError):
    """A linear system expected to be solvable is singular or inconsistent."""


# liealg
class ClosureError(CertificateError):
    """Brackets of basis elements leave the span of the basis."""


class OutsideSpanError(CertificateError):
    """A matrix is not an element of the algebra."""


class FormNormalizationError(CertificateError):
    """The invariant form cannot be normalized as requested."""


# nilstruct
class Sl2Error(CertificateError):
    """No sl2-triple completes the given nilpotent element."""


class GradingError(CertificateError):
    """The Dynkin grading is not integral or not distinguished."""


class DualBasisError(CertificateError):
    """The pairing between the centralizers is degenerate."""


class CartanError(CertificateError):
    """The cyclic element is not regular semisimple or its centralizer is malformed."""


# slice
class ShiftMismatchError(CertificateError):
    """Argument-shift degrees disagree with the catalog."""


class EliminationError(CertificateError):
    """Linear elimination for the special coordinates failed."""


class NonTriangularError(UnsupportedOrbitError):
    """The equations of the equilibrium space do not triangularize."""


# dsred
class GaugeError(CertificateError):
    """The gauge-fixing recursion left components outside the slice."""


# frob
class ReconstructionError(CertificateError):
    """The potential cannot be integrated from the pencil."""


# pipeline
class CacheError(WAlgebraError):
    """A cached stage artifact cannot be decoded."""
