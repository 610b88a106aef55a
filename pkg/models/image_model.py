from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Any, Tuple

import numpy as np

from controllers.errors import ImageDecodeError, InvalidParameterError


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale raster, row-major. `data` has shape (height, width)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ImageDecodeError(f"GrayImage expects a 2-D raster, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImageDecodeError("zero-dimension image")
        if arr.dtype != np.uint8:
            if np.issubdtype(arr.dtype, np.floating) or arr.min() < 0 or arr.max() > 255:
                raise ImageDecodeError("GrayImage data must be integer intensities in [0, 255]")
            arr = arr.astype(np.uint8)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # ---- Derived ----
    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @classmethod
    def from_rows(cls, rows) -> "GrayImage":
        return cls(np.asarray(rows, dtype=np.int64))

    @classmethod
    def constant(cls, height: int, width: int, value: int) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class PatchPairSet:
    """
    Aligned samples in struct-of-arrays form.

    lr_patches: (N, r*r) uint8
    gt_values / gen_values: (N, m) uint8; m == 1 for single-pixel projection,
        m == s*s when the whole HR block under the LR centre pixel is kept
    image_ids: (N,) int64
    positions: (N, 2) int64, top-left (row, col) of each LR patch
    """

    patch_size: int
    lr_patches: np.ndarray
    gt_values: np.ndarray
    gen_values: np.ndarray
    image_ids: np.ndarray
    positions: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        r = int(self.patch_size)
        if r < 1 or r % 2 == 0:
            raise InvalidParameterError(f"patch size must be odd, got {r}")
        n = self.lr_patches.shape[0]
        if self.lr_patches.ndim != 2 or self.lr_patches.shape[1] != r * r:
            raise InvalidParameterError("every lr_patch must have exactly r*r entries")
        for name in ("gt_values", "gen_values"):
            arr = getattr(self, name)
            if arr.ndim != 2 or arr.shape[0] != n:
                raise InvalidParameterError(f"{name} must have shape (N, m) with N={n}")
        if self.gt_values.shape != self.gen_values.shape:
            raise InvalidParameterError("gt_values and gen_values must be aligned")
        if self.image_ids.shape != (n,) or self.positions.shape != (n, 2):
            raise InvalidParameterError("image_ids / positions misaligned with samples")

    def __len__(self) -> int:
        return int(self.lr_patches.shape[0])

    @property
    def values_per_sample(self) -> int:
        return int(self.gt_values.shape[1])

    def sample(self, i: int) -> Dict[str, Any]:
        """One sample as a plain dict (single-pixel sets report scalar values)."""
        gt = self.gt_values[i]
        gen = self.gen_values[i]
        return {
            "lr_patch": self.lr_patches[i].tolist(),
            "gt_value": int(gt[0]) if gt.size == 1 else gt.tolist(),
            "gen_value": int(gen[0]) if gen.size == 1 else gen.tolist(),
            "image_id": int(self.image_ids[i]),
            "position": (int(self.positions[i, 0]), int(self.positions[i, 1])),
        }

    @classmethod
    def concat(cls, parts: "list[PatchPairSet]") -> "PatchPairSet":
        if not parts:
            raise InvalidParameterError("cannot concatenate zero patch sets")
        r = parts[0].patch_size
        if any(p.patch_size != r for p in parts):
            raise InvalidParameterError("patch sets with different patch sizes")
        return cls(
            patch_size=r,
            lr_patches=np.concatenate([p.lr_patches for p in parts], axis=0),
            gt_values=np.concatenate([p.gt_values for p in parts], axis=0),
            gen_values=np.concatenate([p.gen_values for p in parts], axis=0),
            image_ids=np.concatenate([p.image_ids for p in parts], axis=0),
            positions=np.concatenate([p.positions for p in parts], axis=0),
            meta=dict(parts[0].meta),
        )
