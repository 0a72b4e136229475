from typing import Any, Optional


class OpdefError(Exception):
    """
    Base class of all errors raised by opdef.

    :param message:
        Human-readable error message.
    :type message: str
    :param payload:
        Optional diagnostic data attached to the error (probe tables,
        ladders, singular values), kept for reports.
    :type payload: Any
    """

    def __init__(self, message: str, payload: Optional[Any] = None):
        super().__init__(message)
        self.payload = payload


class FieldMismatchError(OpdefError, ValueError):
    """Real and complex data were mixed, or an operation needs the other field."""


class SupportSizeError(OpdefError, ValueError):
    """A support size or truncation size is not usable."""


class SpectralConvergenceError(OpdefError, ArithmeticError):
    """A dense spectral routine did not converge."""


class NotHermitianError(OpdefError, ValueError):
    """Input to the Hermitian eigensolver is not Hermitian."""


class ProbeDisagreementError(OpdefError):
    """Lambda probes orthogonal to the parameter span do not agree."""


class NoTailBoundError(OpdefError):
    """No structural tail bound is available for the operator."""


class LadderExhaustedError(OpdefError):
    """The compactness ladder ran out of sizes without decaying below tolerance."""


class SortViolationError(OpdefError, ValueError):
    """A vector lies outside the declared sort (ball) of a predicate."""


class SortOverflowError(SortViolationError):
    """The image of an inner map does not fit the source sort of an outer predicate."""


class NormalityError(OpdefError):
    """Commutator probes show the operator is not normal."""


class NoSpectralGapError(OpdefError):
    """Singular values show no clean gap between a null block and the rest."""


class IndexInstabilityError(OpdefError):
    """Kernel or cokernel dimensions differ between truncation sizes N and 2N."""


class LambdaCollisionError(OpdefError, ValueError):
    """An eigenspace was requested at the essential point lambda(T); an input error (exit code 3)."""


class NotDefinableInputError(OpdefError, ValueError):
    """An operation needs a prior Definable verdict or a specific spec kind."""
