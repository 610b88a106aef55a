# controllers/grouping.py
"""
Partition LR patches into N_g groups with K-means, either directly in r*r patch
space or on a 1-D projection of each patch (first principal component, or the
normalized all-ones vector, i.e. mean intensity).
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from controllers.errors import DegenerateInputError, EmptyInputError, InvalidParameterError
from controllers.workers import ordered_map
from models.grouping_model import GROUPING_MODES, GroupingModel, KMeansResult
from models.image_model import PatchPairSet

log = logging.getLogger(__name__)

_PCA_MAX_ITER = 1000
_PCA_TOL = 1e-10
_KMEANS_MAX_ITER = 100
_KMEANS_TOL = 1e-4
# float64 elements per distance block in the assignment step
_BLOCK_ELEMS = 1 << 22


def default_n_groups(total_samples: int) -> int:
    return max(1, int(total_samples) // 1000)


# ---------------- Principal component ----------------

def first_principal_component(
    patches: np.ndarray,
    *,
    max_iter: int = _PCA_MAX_ITER,
    tol: float = _PCA_TOL,
    seed: int = 0,
) -> np.ndarray:
    """
    Unit eigenvector of the sample covariance with the largest eigenvalue, by
    power iteration. Sign is fixed so the largest-magnitude component is positive.
    """
    x = np.asarray(patches, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise EmptyInputError("first principal component needs at least 2 patches")
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / (x.shape[0] - 1)
    if float(np.trace(cov)) <= 1e-20:
        raise DegenerateInputError("all patches are identical; covariance is zero")

    rng = np.random.default_rng(seed)
    v = rng.normal(size=cov.shape[0])
    v /= np.linalg.norm(v)
    it = 0
    for it in range(1, max_iter + 1):
        w = cov @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # start landed in the null space
            v = rng.normal(size=cov.shape[0])
            v /= np.linalg.norm(v)
            continue
        w /= nw
        delta = float(np.linalg.norm(w - v))
        v = w
        if delta < tol:
            break
    log.debug("power iteration finished after %d iterations", it)

    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return v / np.linalg.norm(v)


# ---------------- K-means ----------------

def nearest_centroid(
    points: np.ndarray, centroids: np.ndarray, threads: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (labels, squared distances). Exact per-pair differences, so ties resolve to
    the lowest centroid index regardless of how the samples are chunked.
    """
    x = np.asarray(points, dtype=np.float64)
    c = np.asarray(centroids, dtype=np.float64)
    n = x.shape[0]
    step = max(1, _BLOCK_ELEMS // max(1, c.shape[0] * x.shape[1]))

    def _block(lo: int) -> Tuple[np.ndarray, np.ndarray]:
        hi = min(lo + step, n)
        d2 = ((x[lo:hi, None, :] - c[None, :, :]) ** 2).sum(axis=2)
        lab = np.argmin(d2, axis=1)
        return lab, d2[np.arange(hi - lo), lab]

    parts = ordered_map(_block, range(0, n, step), threads)
    if not parts:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
    labels = np.concatenate([p[0] for p in parts]).astype(np.int64)
    dists = np.concatenate([p[1] for p in parts])
    return labels, dists


def kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            # every point already sits on a centroid
            nxt = int(rng.integers(n))
        else:
            nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _update_centroids(x: np.ndarray, labels: np.ndarray, d2: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    k = centroids.shape[0]
    sums = np.zeros_like(centroids)
    np.add.at(sums, labels, x)
    counts = np.bincount(labels, minlength=k)
    new = centroids.copy()
    filled = counts > 0
    new[filled] = sums[filled] / counts[filled, None]

    empty = np.flatnonzero(~filled)
    if empty.size:
        far = d2.copy()
        for j in empty:
            i = int(np.argmax(far))
            log.debug("re-seeding empty cluster %d at sample %d", j, i)
            new[j] = x[i]
            far[i] = -1.0
    return new


def kmeans(
    points: np.ndarray,
    k: int,
    seed: int = 0,
    *,
    max_iter: int = _KMEANS_MAX_ITER,
    tol: float = _KMEANS_TOL,
    threads: Optional[int] = None,
) -> KMeansResult:
    """k-means++ seeding followed by Lloyd iterations (Euclidean)."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    k = int(k)
    if k < 1:
        raise InvalidParameterError("k must be >= 1")
    if k > x.shape[0]:
        raise InvalidParameterError(f"k={k} exceeds the number of points ({x.shape[0]})")

    # canonical (lexicographic) point order makes the result independent of input order
    order = np.lexsort(x.T[::-1])
    x = x[order]

    rng = np.random.default_rng(seed)
    centroids = kmeans_pp_init(x, k, rng)
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        labels, d2 = nearest_centroid(x, centroids, threads)
        history.append(float(d2.sum()))
        new = _update_centroids(x, labels, d2, centroids)
        movement = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        if movement < tol:
            break

    labels, d2 = nearest_centroid(x, centroids, threads)
    objective = float(d2.sum())
    history.append(objective)
    log.debug("kmeans k=%d converged in %d iterations, objective=%.6g", k, it, objective)
    assignments = np.empty_like(labels)
    assignments[order] = labels
    return KMeansResult(
        centroids=centroids,
        assignments=assignments,
        objective=objective,
        objective_history=history,
        iterations=it,
    )


# ---------------- Grouping ----------------

def ones_projection(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim))


def build_grouping(
    patchset: PatchPairSet,
    mode: str = "projected_fpc",
    k: Optional[int] = None,
    seed: int = 0,
    *,
    threads: Optional[int] = None,
) -> GroupingModel:
    """
    Group the LR patches. Patches are shared by the ground-truth and generated
    sides, so both distributions are split by one partition.
    """
    if len(patchset) == 0:
        raise EmptyInputError("no patches to group")
    if mode not in GROUPING_MODES:
        raise InvalidParameterError(f"unknown grouping mode {mode!r}")
    k = default_n_groups(len(patchset)) if k is None else int(k)
    if k > len(patchset):
        raise InvalidParameterError(f"n_groups={k} exceeds the sample count ({len(patchset)})")

    patches = patchset.lr_patches.astype(np.float64)
    projection: Optional[np.ndarray] = None
    if mode == "direct":
        feats = patches
    else:
        if mode == "projected_fpc":
            projection = first_principal_component(patches, seed=seed)
        else:
            projection = ones_projection(patches.shape[1])
        feats = (patches @ projection)[:, None]

    log.info("grouping %d patches into %d groups (%s)", len(patchset), k, mode)
    res = kmeans(feats, k, seed, threads=threads)
    return GroupingModel(
        mode=mode,
        k=k,
        seed=int(seed),
        centroids=res.centroids,
        assignments=res.assignments,
        projection=projection,
        objective=res.objective,
    )
