"""Error hierarchy"""

from typing import Any, Dict, Optional


class HaalError(Exception):
    """Base error for the toolkit"""

    code = "HaalError"
    exit_code = 1

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form used by the command line"""
        return {
            "error": self.code,
            "message": self.message,
            "details": dict(self.details),
        }


class DomainError(HaalError):
    """A mathematical precondition does not hold"""

    code = "DomainError"
    exit_code = 1


class ParseError(HaalError):
    """Malformed textual or JSON input"""

    code = "ParseError"
    exit_code = 2

    def __init__(self, message: str, position: Optional[int] = None, **details: Any):
        super().__init__(message, position=position, **details)
        self.position = position


class NotDeltaMember(DomainError):
    code = "NotDeltaMember"


class CommonRoot(DomainError):
    code = "CommonRoot"


class NotNilpotent(DomainError):
    code = "NotNilpotent"


class NotQuaternionLinear(DomainError):
    code = "NotQuaternionLinear"


class BlockPatternMismatch(DomainError):
    code = "BlockPatternMismatch"


class IndexOutOfRange(DomainError):
    code = "IndexOutOfRange"


class DimensionMismatch(DomainError):
    code = "DimensionMismatch"


class InvalidParams(DomainError):
    code = "InvalidParams"


class ZeroPolynomial(DomainError):
    code = "ZeroPolynomial"


class NonUnitConstantTerm(DomainError):
    code = "NonUnitConstantTerm"


class NonMonic(DomainError):
    code = "NonMonic"


class SignPatternViolation(DomainError):
    code = "SignPatternViolation"


class NotConjugate(DomainError):
    code = "NotConjugate"


class HeisenbergExcluded(DomainError):
    code = "HeisenbergExcluded"


class NoAnticommutingL(DomainError):
    code = "NoAnticommutingL"
