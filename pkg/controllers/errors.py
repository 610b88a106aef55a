# controllers/errors.py
from __future__ import annotations

from typing import Any, Dict, List, Optional


class SrdmError(ValueError):
    """
    Input / contract failure with a short machine-readable code.
    The CLI maps every SrdmError to exit code 2.
    """

    code: str = "invalid_input"

    def __init__(self, detail: str, *, code: Optional[str] = None) -> None:
        super().__init__(detail)
        self.detail = detail
        if code is not None:
            self.code = code

    def as_dict(self) -> Dict[str, Any]:
        return {"code": self.code, "detail": self.detail}


class ImageDecodeError(SrdmError):
    code = "decode_failed"


class DimensionMismatchError(SrdmError):
    code = "dimension_mismatch"


class InvalidParameterError(SrdmError):
    code = "invalid_parameter"


class EmptyInputError(SrdmError):
    code = "empty_input"


class DegenerateInputError(SrdmError):
    code = "degenerate_input"


class NoSurvivingGroupsError(SrdmError):
    code = "no_surviving_groups"


class NumericalError(SrdmError):
    code = "non_finite"


class UnmatchedFilesError(SrdmError):
    code = "unmatched_files"

    def __init__(self, detail: str, missing: List[str]) -> None:
        super().__init__(detail)
        self.missing = list(missing)

    def as_dict(self) -> Dict[str, Any]:
        d = super().as_dict()
        d["missing"] = self.missing
        return d
