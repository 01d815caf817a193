"""
Exception hierarchy shared by every kmeis module.

The CLI maps ``ConfigError`` to exit code 2 and every other ``KacMoodyError``
to exit code 1, printing the class name on standard error.
"""
from typing import Any, Optional, Sequence


class KacMoodyError(Exception):
    """Base class for all domain errors raised by kmeis."""


# ============================================================================
# Cartan matrices
# ============================================================================

class InvalidGCM(KacMoodyError):
    """Diagonal entry != 2, positive off-diagonal entry, or asymmetric zero pattern."""


class NotSymmetrizable(KacMoodyError):
    """No positive diagonal D makes D·A symmetric."""


class SingularMatrix(KacMoodyError):
    """Determinant is zero (affine and other singular types are excluded)."""


# ============================================================================
# Lattice / Weyl group
# ============================================================================

class NotRealRoot(KacMoodyError):
    def __init__(self, root: Sequence[int], message: Optional[str] = None):
        self.root = tuple(root)
        super().__init__(message or f"{list(self.root)} is not a real root (norm <= 0)")


class CapExceeded(KacMoodyError):
    def __init__(self, what: str, cap: int):
        self.cap = cap
        super().__init__(f"{what} did not terminate within cap={cap}")


class InvalidArgument(KacMoodyError, ValueError):
    """A generator index, length or cap outside its allowed range."""


class NotReduced(KacMoodyError):
    def __init__(self, word: Sequence[int]):
        self.word = tuple(word)
        super().__init__(f"word {list(self.word)} is not reduced")


# ============================================================================
# Property 1 / admissible words
# ============================================================================

class NoAdmissibleWord(KacMoodyError):
    def __init__(self, word: Sequence[int]):
        self.word = tuple(word)
        super().__init__(
            f"no admissible word exists for the element with reduced word {list(self.word)}"
        )


class HypothesisViolated(KacMoodyError):
    """The Cartan matrix does not satisfy the hypotheses of the requested check."""


class CertificateError(KacMoodyError):
    """A certificate failed re-verification."""


# ============================================================================
# Numerics
# ============================================================================

class DomainError(KacMoodyError):
    def __init__(self, function: str, argument: Any, condition: str):
        self.function = function
        self.argument = argument
        super().__init__(f"{function}({argument}) requires {condition}")


class OutOfRange(KacMoodyError):
    def __init__(self, root: Sequence[int], pairing: Any):
        self.root = tuple(root)
        self.pairing = pairing
        super().__init__(
            f"<lambda, alpha^vee> = {pairing} <= 1 for alpha = {list(self.root)}"
        )


class NotGodement(KacMoodyError):
    """Some simple coroot pairing of lambda is <= 1."""


class NotInTitsCone(KacMoodyError):
    """The evaluation point is not in the interior of the Tits cone."""


class PrecisionExhausted(KacMoodyError):
    """An exponent is too large to be represented at the working precision."""


class NotDominant(KacMoodyError):
    """A weight or point that must be dominant is not."""


# ============================================================================
# Configuration
# ============================================================================

class ConfigError(KacMoodyError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
