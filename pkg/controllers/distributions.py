# controllers/distributions.py
"""
256-bin histograms of projected HR values, the distribution distances used by
the metric, and the sliced Wasserstein-2 loss with its gradient.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from controllers.errors import EmptyInputError, InvalidParameterError

log = logging.getLogger(__name__)

N_BINS = 256
KL_EPS = 1e-10

DISTANCES = ("wasserstein", "tv", "js", "kl")


@dataclass(frozen=True, eq=False)
class Histogram256:
    counts: np.ndarray   # (256,) int64

    def __post_init__(self) -> None:
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (N_BINS,):
            raise InvalidParameterError(f"histogram needs {N_BINS} bins, got {c.shape}")
        if (c < 0).any():
            raise InvalidParameterError("histogram counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def pmf(self) -> np.ndarray:
        t = self.total
        if t <= 0:
            raise EmptyInputError("empty histogram has no pmf")
        return self.counts / float(t)

    def __add__(self, other: "Histogram256") -> "Histogram256":
        return Histogram256(self.counts + other.counts)


def histogram(values) -> Histogram256:
    v = np.asarray(values).ravel()
    if v.size == 0:
        raise EmptyInputError("histogram of an empty value list")
    if v.min() < 0 or v.max() > 255:
        raise InvalidParameterError("histogram values must lie in [0, 255]")
    if np.issubdtype(v.dtype, np.floating) and not np.array_equal(v, np.floor(v)):
        raise InvalidParameterError("histogram values must be integer intensities")
    return Histogram256(np.bincount(v.astype(np.int64), minlength=N_BINS))


def _pmfs(a: Histogram256, b: Histogram256) -> Tuple[np.ndarray, np.ndarray]:
    if a.total <= 0 or b.total <= 0:
        raise EmptyInputError("distance between empty histograms")
    return a.pmf(), b.pmf()


# ---------------- Distances ----------------

def w1_distance(a: Histogram256, b: Histogram256) -> float:
    """Wasserstein-1 in intensity units: L1 distance between the two CDFs."""
    p, q = _pmfs(a, b)
    diff = np.cumsum(p)[:-1] - np.cumsum(q)[:-1]
    return float(np.abs(diff).sum())


def tv_distance(a: Histogram256, b: Histogram256) -> float:
    p, q = _pmfs(a, b)
    return float(0.5 * np.abs(p - q).sum())


def _smooth(p: np.ndarray) -> np.ndarray:
    s = p + KL_EPS
    return s / s.sum()


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_divergence(a: Histogram256, b: Histogram256) -> float:
    """KL(a || b), natural log, on epsilon-smoothed pmfs."""
    p, q = _pmfs(a, b)
    return max(0.0, _kl(_smooth(p), _smooth(q)))


def js_divergence(a: Histogram256, b: Histogram256) -> float:
    p, q = _pmfs(a, b)
    ps, qs = _smooth(p), _smooth(q)
    m = 0.5 * (ps + qs)
    return max(0.0, 0.5 * _kl(ps, m) + 0.5 * _kl(qs, m))


DISTANCE_FUNCS: Dict[str, Callable[[Histogram256, Histogram256], float]] = {
    "wasserstein": w1_distance,
    "tv": tv_distance,
    "js": js_divergence,
    "kl": kl_divergence,
}


def get_distance(name: str) -> Callable[[Histogram256, Histogram256], float]:
    try:
        return DISTANCE_FUNCS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown distance {name!r}; choose from {', '.join(DISTANCES)}") from None


# ---------------- Sliced Wasserstein-2 ----------------

def resample_quantiles(sorted_values: np.ndarray, n: int) -> np.ndarray:
    """Linear quantile interpolation of an ascending sequence onto n points."""
    m = sorted_values.size
    if m == n:
        return sorted_values.astype(np.float64)
    if m == 1:
        return np.full(n, float(sorted_values[0]))
    pos = np.linspace(0.0, m - 1.0, n) if n > 1 else np.array([(m - 1) / 2.0])
    return np.interp(pos, np.arange(m, dtype=np.float64), sorted_values.astype(np.float64))


def _as_samples(values: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInputError(f"{name} is empty")
    return v


def sliced_w2(gen: Sequence[float], gt: Sequence[float]) -> float:
    """
    Sum of squared differences between the sorted samples. When the lengths
    differ, the shorter sorted sequence is resampled to the longer length.
    """
    g = np.sort(_as_samples(gen, "gen"))
    t = np.sort(_as_samples(gt, "gt"))
    if g.size < t.size:
        g = resample_quantiles(g, t.size)
    elif t.size < g.size:
        t = resample_quantiles(t, g.size)
    return float(np.sum((g - t) ** 2))


def gt_for_grad(gt: Sequence[float], n: int) -> np.ndarray:
    """gt sorted and resampled to n values, the matched side expected by sliced_w2_grad."""
    t = np.sort(_as_samples(gt, "gt"))
    return t if t.size == n else resample_quantiles(t, n)


def sliced_w2_grad(gen: Sequence[float], gt: Sequence[float]) -> np.ndarray:
    """
    d sliced_w2 / d gen. Each gen element is matched to the gt value of the same
    rank (stable sort, so ties keep their original order).
    """
    g = _as_samples(gen, "gen")
    t = _as_samples(gt, "gt")
    if g.size != t.size:
        raise InvalidParameterError(
            f"gradient needs equal lengths after resampling (gen={g.size}, gt={t.size})"
        )
    order = np.argsort(g, kind="stable")
    grad = np.empty_like(g)
    grad[order] = 2.0 * (g[order] - np.sort(t, kind="stable"))
    return grad


def grouped_sliced_loss(
    gen: Sequence[float], gt: Sequence[float], gen_groups: Sequence[int], gt_groups: Sequence[int]
) -> Tuple[float, np.ndarray]:
    """
    Uniform mean over groups of sliced_w2 and its gradient w.r.t. gen.
    The gradient of a group whose gt count differs from its gen count uses gt
    resampled to the gen count.
    """
    g = _as_samples(gen, "gen")
    t = _as_samples(gt, "gt")
    gg = np.asarray(gen_groups, dtype=np.int64).ravel()
    tg = np.asarray(gt_groups, dtype=np.int64).ravel()
    if gg.size != g.size or tg.size != t.size:
        raise InvalidParameterError("group labels must align with values")
    groups = np.unique(gg)
    missing = np.setdiff1d(groups, np.unique(tg))
    if missing.size:
        raise InvalidParameterError(f"groups without ground-truth samples: {missing.tolist()}")

    grad = np.zeros_like(g)
    total = 0.0
    for label in groups:
        gi = np.flatnonzero(gg == label)
        tv = t[tg == label]
        total += sliced_w2(g[gi], tv)
        grad[gi] = sliced_w2_grad(g[gi], gt_for_grad(tv, gi.size))
    n = float(groups.size)
    log.debug("grouped sliced loss over %d groups", groups.size)
    return total / n, grad / n
