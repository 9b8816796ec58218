"""Exception types shared across the package."""


class NilcspError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1
    code = "error"


class ValidationError(NilcspError, ValueError):
    exit_code = 2
    code = "validation"

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)


class PresentationError(ValidationError):
    code = "presentation"


class BudgetExceeded(NilcspError):
    exit_code = 3
    code = "budget"

    def __init__(self, what: str, attempted, budget):
        self.attempted = attempted
        self.budget = budget
        super().__init__(f"{what}: attempted {attempted}, budget {budget}")


class EnumerationBudgetExceeded(BudgetExceeded):
    code = "enumeration-budget"


class SearchCapExceeded(BudgetExceeded):
    code = "search-cap"


class SizeBudgetExceeded(BudgetExceeded):
    code = "size-budget"


class VerificationFailed(NilcspError):
    exit_code = 4
    code = "verification"


class NotNormal(NilcspError, ValueError):
    code = "not-normal"


class RelationViolated(NilcspError, ValueError):
    code = "relation-violated"


class NotBijectiveOnAbelianization(NilcspError, ValueError):
    code = "not-bijective"


class KernelNotInvariant(NilcspError, ValueError):
    code = "kernel-not-invariant"


class NotInFiltrationLevel(NilcspError, ValueError):
    code = "not-in-level"

    def __init__(self, level: int, detail: str = ""):
        self.level = level
        super().__init__(f"automorphism is not trivial on G/gamma_{level + 1}G" + (f" ({detail})" if detail else ""))


class LevelOutOfRange(NilcspError, ValueError):
    code = "level-range"


class BaseStrategyFailed(NilcspError):
    exit_code = 4
    code = "base-strategy"


class TranscriptMismatch(VerificationFailed):
    code = "transcript-mismatch"


class NotPrimitive(NilcspError, ValueError):
    code = "not-primitive"


class NotIsotropic(NilcspError, ValueError):
    code = "not-isotropic"


class NotAbelianImage(NilcspError, ValueError):
    code = "not-abelian"


class UnsupportedCurve(NilcspError, ValueError):
    code = "unsupported-curve"


class NotSurjective(NilcspError, ValueError):
    code = "not-surjective"
