from __future__ import annotations

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

INITIAL_RATING = 1500.0
INITIAL_DEVIATION = 350.0


def _err(prefix: str, detail: str) -> str:
    return f"{prefix}: {detail}"


class PlayerRating(BaseModel):
    model_config = ConfigDict(frozen=True)

    method_id: str
    rating: float = INITIAL_RATING
    deviation: float = INITIAL_DEVIATION

    @field_validator("deviation")
    @classmethod
    def _v_deviation(cls, v: float) -> float:
        if not (0.0 < v <= INITIAL_DEVIATION):
            raise ValueError(_err("rating.deviation", f"must be in (0, {INITIAL_DEVIATION:g}]"))
        return v

    @property
    def lower_bound(self) -> float:
        """Conservative 95% bound, r - 1.96 sigma."""
        return self.rating - 1.96 * self.deviation


class VoteRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    winner: str
    loser: str

    @model_validator(mode="after")
    def _v_distinct(self) -> "VoteRecord":
        if self.winner == self.loser:
            raise ValueError(_err("vote", f"winner and loser are both {self.winner!r}"))
        return self


class RankedMethod(BaseModel):
    rank: int
    method_id: str
    rating: float
    deviation: float
    lower_bound: float
