from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, field_validator


def _err(prefix: str, detail: str) -> str:
    return f"{prefix}: {detail}"


class MethodScoreRow(BaseModel):
    model_config = ConfigDict(extra="ignore")

    method_id: str
    metric_score: float
    glicko: float
    backproj: Optional[float] = None


class MethodScoreTable(BaseModel):
    rows: List[MethodScoreRow]

    @field_validator("rows")
    @classmethod
    def _v_rows(cls, v: List[MethodScoreRow]) -> List[MethodScoreRow]:
        if len(v) < 2:
            raise ValueError(_err("score_table", "at least 2 methods are needed for a correlation"))
        seen = set()
        for row in v:
            if row.method_id in seen:
                raise ValueError(_err("score_table", f"duplicate method {row.method_id!r}"))
            seen.add(row.method_id)
        filled = sum(r.backproj is not None for r in v)
        if 0 < filled < len(v):
            raise ValueError(_err("score_table", f"backproj given for {filled} of {len(v)} methods; fill every row or none"))
        return v

    @property
    def has_backproj(self) -> bool:
        return all(r.backproj is not None for r in self.rows)


class ScatterPoint(BaseModel):
    method_id: str
    x: float
    y: float


class CorrelationResult(BaseModel):
    x_name: str
    y_name: str
    pearson: float
    slope: float
    intercept: float
    n: int
    # two points always lie on a line, so |r| = 1 carries no evidence
    degenerate: bool = False
    points: List[ScatterPoint]


class CorrelationReport(BaseModel):
    results: List[CorrelationResult]
