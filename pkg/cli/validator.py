from __future__ import annotations

import argparse
from typing import Callable, List, Tuple, Union

from controllers.imageio import PIXEL_OFFSET_NAMES


class Validator:
    """argparse `type=` converters. Each raises ArgumentTypeError on bad input."""

    @staticmethod
    def positive_int(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < 1:
            raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
        return value

    @staticmethod
    def non_negative_int(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < 0:
            raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
        return value

    @staticmethod
    def int_at_least(min_val: int) -> Callable[[str], int]:
        def _conv(text: str) -> int:
            value = Validator.positive_int(text) if min_val >= 1 else int(text)
            if value < min_val:
                raise argparse.ArgumentTypeError(f"must be >= {min_val}, got {value}")
            return value
        return _conv

    @staticmethod
    def odd_int(text: str) -> int:
        value = Validator.int_at_least(3)(text)
        if value % 2 == 0:
            raise argparse.ArgumentTypeError(f"must be odd, got {value}")
        return value

    @staticmethod
    def n_groups(text: str) -> Union[int, str]:
        if text.strip().lower() == "auto":
            return "auto"
        return Validator.positive_int(text)

    @staticmethod
    def pixel_offset(text: str) -> Union[str, Tuple[int, int]]:
        """A named offset or `dr,dc`."""
        t = text.strip().lower()
        if t in PIXEL_OFFSET_NAMES:
            return t
        parts = t.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"expected one of {', '.join(PIXEL_OFFSET_NAMES)} or 'dr,dc', got {text!r}"
            )
        return Validator.non_negative_int(parts[0]), Validator.non_negative_int(parts[1])

    @staticmethod
    def boolean(text: str) -> bool:
        t = text.strip().lower()
        if t in ("1", "true", "yes", "on"):
            return True
        if t in ("0", "false", "no", "off"):
            return False
        raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")

    @staticmethod
    def value_list(text: str) -> List[str]:
        items = [x.strip() for x in text.split(",") if x.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma-separated list")
        return items
