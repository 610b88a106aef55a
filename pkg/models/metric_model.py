from __future__ import annotations

import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DistanceName = Literal["wasserstein", "tv", "js", "kl"]
GroupingModeName = Literal["direct", "projected_fpc", "projected_ones"]


def _err(prefix: str, detail: str) -> str:
    return f"{prefix}: {detail}"


class MetricConfig(BaseModel):
    """
    Design choices of the grouped, projected metric.
    stride and pixel_offset are resolved from scale when left unset.
    """
    model_config = ConfigDict(extra="forbid")

    scale: int = 4
    patch_size: int = 13
    stride: Optional[int] = None
    n_groups: Union[int, Literal["auto"]] = "auto"
    min_group_samples: int = 50
    distance: DistanceName = "wasserstein"
    grouping_mode: GroupingModeName = "projected_fpc"
    pixel_offset: Optional[Tuple[int, int]] = None
    pixel_mode: Literal["single", "block"] = "single"
    per_image: bool = False
    export_histograms: bool = False
    # used only when LR images are synthesized from HR
    kernel: Literal["box", "bicubic"] = "bicubic"
    seed: int = 0

    # ---- Validators ----
    @field_validator("scale")
    @classmethod
    def _v_scale(cls, v: int) -> int:
        if v < 2:
            raise ValueError(_err("scale", "must be >= 2"))
        return v

    @field_validator("patch_size")
    @classmethod
    def _v_patch_size(cls, v: int) -> int:
        if v < 3 or v % 2 == 0:
            raise ValueError(_err("patch_size", "must be odd and >= 3"))
        return v

    @field_validator("stride")
    @classmethod
    def _v_stride(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(_err("stride", "must be >= 1"))
        return v

    @field_validator("n_groups")
    @classmethod
    def _v_n_groups(cls, v):
        if v != "auto" and int(v) < 1:
            raise ValueError(_err("n_groups", "must be >= 1 or 'auto'"))
        return v

    @field_validator("min_group_samples")
    @classmethod
    def _v_min_group_samples(cls, v: int) -> int:
        if v < 1:
            raise ValueError(_err("min_group_samples", "must be >= 1"))
        return v

    @model_validator(mode="after")
    def _resolve_defaults(self) -> "MetricConfig":
        if self.stride is None:
            self.stride = self.scale
        if self.pixel_offset is None:
            c = (self.scale - 1) // 2
            self.pixel_offset = (c, c)
        dr, dc = self.pixel_offset
        if not (0 <= dr < self.scale and 0 <= dc < self.scale):
            raise ValueError(_err("pixel_offset", f"must lie in [0, {self.scale})^2"))
        return self


class GroupResult(BaseModel):
    group: int
    gt_count: int
    gen_count: int
    distance: float
    image_id: Optional[int] = None
    gt_histogram: Optional[List[int]] = None
    gen_histogram: Optional[List[int]] = None


class ImageResult(BaseModel):
    image_id: int
    name: Optional[str] = None
    aggregate: Optional[float] = None
    groups_used: int = 0
    dropped_groups: int = 0


class MetricReport(BaseModel):
    aggregate: float
    per_group: List[GroupResult]
    dropped_groups: int
    n_groups: int
    total_samples: int
    config: MetricConfig
    per_image: Optional[List[ImageResult]] = None
    manifest: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def _v_consistency(self) -> "MetricReport":
        if self.dropped_groups + len(self.per_group) != self.n_groups:
            raise ValueError(_err("report", "dropped_groups + surviving groups must equal n_groups"))
        if self.per_image is None and self.per_group:
            mean = math.fsum(g.distance for g in self.per_group) / len(self.per_group)
            if not math.isclose(mean, self.aggregate, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(_err("report", "aggregate must be the mean of per-group distances"))
        return self


class SubsamplingResult(BaseModel):
    mean: float
    variance: float
    n_per_group: int
    repetitions: int
    values: List[float] = Field(default_factory=list)
    groups_used: List[int] = Field(default_factory=list)


class InstanceSample(BaseModel):
    """All HR draws observed for one exact LR instance x."""
    x_key: Union[int, str]
    gt_values: List[int]
    gen_values: List[int]

    @field_validator("gt_values", "gen_values")
    @classmethod
    def _v_non_empty(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError(_err("instance", "value lists must be non-empty"))
        return v
