from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional

import numpy as np

from controllers.errors import InvalidParameterError

GroupingMode = Literal["direct", "projected_fpc", "projected_ones"]
GROUPING_MODES = ("direct", "projected_fpc", "projected_ones")


@dataclass(frozen=True, eq=False)
class KMeansResult:
    centroids: np.ndarray            # (k, d)
    assignments: np.ndarray          # (n,) int64
    objective: float                 # within-cluster sum of squared distances
    objective_history: List[float] = field(default_factory=list)
    iterations: int = 0


@dataclass(frozen=True, eq=False)
class GroupingModel:
    """
    Partition of LR patches into k groups.
    `projection` is a unit r*r vector for projected modes and None for direct.
    """

    mode: str
    k: int
    seed: int
    centroids: np.ndarray
    assignments: np.ndarray
    projection: Optional[np.ndarray] = None
    objective: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in GROUPING_MODES:
            raise InvalidParameterError(f"unknown grouping mode {self.mode!r}")
        if self.centroids.shape[0] != self.k:
            raise InvalidParameterError("centroid count must equal k")
        a = self.assignments
        if a.ndim != 1 or (a.size and (a.min() < 0 or a.max() >= self.k)):
            raise InvalidParameterError("assignments must be group indices in [0, k)")
        if self.mode == "direct":
            if self.projection is not None:
                raise InvalidParameterError("direct grouping carries no projection")
        else:
            if self.projection is None:
                raise InvalidParameterError(f"{self.mode} grouping requires a projection")
            if abs(float(np.linalg.norm(self.projection)) - 1.0) > 1e-9:
                raise InvalidParameterError("projection must have unit norm")
            if self.centroids.shape[1] != 1:
                raise InvalidParameterError("projected grouping uses 1-D centroids")

    def features(self, patches: np.ndarray) -> np.ndarray:
        """Map (n, r*r) patches into the space the centroids live in."""
        x = np.asarray(patches, dtype=np.float64)
        if self.projection is None:
            return x
        return (x @ self.projection)[:, None]

    def assign(self, patches: np.ndarray) -> np.ndarray:
        """Nearest-centroid group for new patches (ties -> lowest group index)."""
        from controllers.grouping import nearest_centroid

        labels, _ = nearest_centroid(self.features(patches), self.centroids)
        return labels

    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def export_dict(self) -> Dict[str, Any]:
        """JSON-safe audit / replay document (assignments excluded)."""
        return {
            "mode": self.mode,
            "k": int(self.k),
            "seed": int(self.seed),
            "objective": float(self.objective),
            "centroids": self.centroids.tolist(),
            "projection": None if self.projection is None else self.projection.tolist(),
            "group_sizes": self.group_sizes().tolist(),
        }
