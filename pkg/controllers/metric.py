# controllers/metric.py
"""
The grouped, projected distribution metric over LR/HR datasets, the ideal
per-instance metric for synthetic data, the subsampled-group experiment and
back-projection fidelity.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from controllers.distributions import N_BINS, Histogram256, get_distance, histogram
from controllers.errors import (
    DimensionMismatchError,
    EmptyInputError,
    InvalidParameterError,
    NoSurvivingGroupsError,
)
from controllers.grouping import build_grouping, default_n_groups
from controllers.imageio import downsample, extract_patch_pairs
from controllers.workers import ordered_map
from models.grouping_model import GroupingModel
from models.image_model import GrayImage, PatchPairSet
from models.metric_model import (
    GroupResult,
    ImageResult,
    InstanceSample,
    MetricConfig,
    MetricReport,
    SubsamplingResult,
)

log = logging.getLogger(__name__)

# (lr, hr_gt, hr_gen); lr may be None to synthesize it from hr_gt with g
Triple = Tuple[Optional[GrayImage], GrayImage, GrayImage]


@dataclass(frozen=True, eq=False)
class MetricRun:
    report: MetricReport
    grouping: Optional[GroupingModel]
    patchset: Optional[PatchPairSet]


# ---------------- Extraction ----------------

def _extract_one(config: MetricConfig, image_id: int, triple: Triple) -> Optional[PatchPairSet]:
    lr, hr_gt, hr_gen = triple
    if lr is None:
        lr = downsample(hr_gt, config.scale, config.kernel)
    for name, hr in (("hr_gt", hr_gt), ("hr_gen", hr_gen)):
        if hr.shape != (lr.height * config.scale, lr.width * config.scale):
            raise DimensionMismatchError(
                f"image {image_id}: {name} is {hr.width}x{hr.height}, "
                f"expected {lr.width * config.scale}x{lr.height * config.scale}"
            )
    if config.patch_size > min(lr.shape):
        log.warning("image %d: LR %dx%d smaller than patch size %d; skipped",
                    image_id, lr.width, lr.height, config.patch_size)
        return None
    return extract_patch_pairs(
        lr, hr_gt, hr_gen,
        r=config.patch_size,
        s=config.scale,
        stride=config.stride,
        pixel_offset=config.pixel_offset,
        pixel_mode=config.pixel_mode,
        image_id=image_id,
    )


def extract_dataset(dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int] = None) -> PatchPairSet:
    """All samples of all triples, ordered by image then row-major position."""
    if not dataset:
        raise EmptyInputError("dataset is empty")
    parts = ordered_map(lambda it: _extract_one(config, it[0], it[1]), list(enumerate(dataset)), threads)
    parts = [p for p in parts if p is not None and len(p)]
    if not parts:
        raise EmptyInputError("no valid patches in the dataset")
    return PatchPairSet.concat(parts)


def resolve_n_groups(config: MetricConfig, total_samples: int) -> int:
    if config.n_groups == "auto":
        return default_n_groups(total_samples)
    return int(config.n_groups)


# ---------------- Grouped distances ----------------

def group_histograms(values: np.ndarray, assignments: np.ndarray, k: int) -> np.ndarray:
    """(k, 256) counts; each sample contributes all of its values to its group."""
    v = np.asarray(values, dtype=np.int64)
    if v.ndim == 1:
        v = v[:, None]
    labels = np.repeat(np.asarray(assignments, dtype=np.int64), v.shape[1])
    flat = labels * N_BINS + v.ravel()
    return np.bincount(flat, minlength=k * N_BINS).reshape(k, N_BINS)


def compute_grouped_metric(
    gt_values: np.ndarray,
    gen_values: np.ndarray,
    assignments: np.ndarray,
    n_groups: int,
    distance: str = "wasserstein",
    min_group_samples: int = 1,
    *,
    export_histograms: bool = False,
    image_id: Optional[int] = None,
    threads: Optional[int] = None,
) -> Tuple[List[GroupResult], int]:
    """
    Per-group distance between the generated and ground-truth value
    distributions. Groups where either side has fewer than min_group_samples
    values are dropped. Returns (surviving groups in index order, dropped count).
    """
    dist = get_distance(distance)
    gt_h = group_histograms(gt_values, assignments, n_groups)
    gen_h = group_histograms(gen_values, assignments, n_groups)

    def _one(g: int) -> Optional[GroupResult]:
        gt_n, gen_n = int(gt_h[g].sum()), int(gen_h[g].sum())
        if gt_n < min_group_samples or gen_n < min_group_samples:
            return None
        return GroupResult(
            group=g,
            gt_count=gt_n,
            gen_count=gen_n,
            distance=dist(Histogram256(gen_h[g]), Histogram256(gt_h[g])),
            image_id=image_id,
            gt_histogram=gt_h[g].tolist() if export_histograms else None,
            gen_histogram=gen_h[g].tolist() if export_histograms else None,
        )

    results = ordered_map(_one, range(n_groups), threads)
    kept = [r for r in results if r is not None]
    return kept, n_groups - len(kept)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


# ---------------- Metric ----------------

def prepare_grouping(
    dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int] = None
) -> Tuple[PatchPairSet, GroupingModel]:
    patchset = extract_dataset(dataset, config, threads)
    k = resolve_n_groups(config, len(patchset))
    grouping = build_grouping(patchset, config.grouping_mode, k, config.seed, threads=threads)
    return patchset, grouping


def _pooled(dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int]) -> MetricRun:
    patchset, grouping = prepare_grouping(dataset, config, threads)
    per_group, dropped = compute_grouped_metric(
        patchset.gt_values, patchset.gen_values, grouping.assignments, grouping.k,
        config.distance, config.min_group_samples,
        export_histograms=config.export_histograms, threads=threads,
    )
    if not per_group:
        raise NoSurvivingGroupsError(
            f"all {grouping.k} groups have fewer than {config.min_group_samples} samples"
        )
    report = MetricReport(
        aggregate=_mean([g.distance for g in per_group]),
        per_group=per_group,
        dropped_groups=dropped,
        n_groups=grouping.k,
        total_samples=len(patchset),
        config=config,
    )
    return MetricRun(report=report, grouping=grouping, patchset=patchset)


def _per_image(dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int]) -> MetricRun:
    per_group: List[GroupResult] = []
    images: List[ImageResult] = []
    dropped_total = 0
    n_total = 0
    samples = 0
    for image_id, triple in enumerate(dataset):
        ps = _extract_one(config, image_id, triple)
        if ps is None or not len(ps):
            images.append(ImageResult(image_id=image_id))
            continue
        k = min(resolve_n_groups(config, len(ps)), len(ps))
        grouping = build_grouping(ps, config.grouping_mode, k, config.seed, threads=threads)
        groups, dropped = compute_grouped_metric(
            ps.gt_values, ps.gen_values, grouping.assignments, k,
            config.distance, config.min_group_samples,
            export_histograms=config.export_histograms, image_id=image_id, threads=threads,
        )
        per_group.extend(groups)
        dropped_total += dropped
        n_total += k
        samples += len(ps)
        images.append(ImageResult(
            image_id=image_id,
            aggregate=_mean([g.distance for g in groups]) if groups else None,
            groups_used=len(groups),
            dropped_groups=dropped,
        ))
    scored = [im.aggregate for im in images if im.aggregate is not None]
    if not scored:
        raise NoSurvivingGroupsError("no image kept a group with enough samples")
    report = MetricReport(
        aggregate=_mean(scored),
        per_group=per_group,
        dropped_groups=dropped_total,
        n_groups=n_total,
        total_samples=samples,
        config=config,
        per_image=images,
    )
    return MetricRun(report=report, grouping=None, patchset=None)


def compute_metric_run(dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int] = None) -> MetricRun:
    log.info("computing %s metric over %d triples (%s grouping, r=%d, s=%d)",
             config.distance, len(dataset), config.grouping_mode, config.patch_size, config.scale)
    if config.per_image:
        return _per_image(dataset, config, threads)
    return _pooled(dataset, config, threads)


def compute_metric(dataset: Sequence[Triple], config: MetricConfig, threads: Optional[int] = None) -> MetricReport:
    return compute_metric_run(dataset, config, threads).report


def compute_instance_metric(samples: Sequence[InstanceSample], distance: str = "wasserstein") -> float:
    """Mean over exact LR instances of d(p_gen|x, p_gt|x)."""
    if not samples:
        raise EmptyInputError("no instances")
    dist = get_distance(distance)
    vals = []
    for s in samples:
        if not s.gt_values or not s.gen_values:
            raise EmptyInputError(f"instance {s.x_key!r} has an empty value list")
        vals.append(dist(histogram(s.gen_values), histogram(s.gt_values)))
    return _mean(vals)


def metric_with_subsampling(
    dataset: Sequence[Triple],
    config: MetricConfig,
    n_per_group: int,
    repetitions: int,
    seed: int = 0,
    threads: Optional[int] = None,
) -> SubsamplingResult:
    """
    Repeatedly draw n_per_group samples without replacement from each group's
    gt and gen sides; groups smaller than n_per_group sit that repetition out.
    """
    if repetitions < 1:
        raise InvalidParameterError("repetitions must be >= 1")
    if n_per_group < 1:
        raise InvalidParameterError("n_per_group must be >= 1")
    patchset, grouping = prepare_grouping(dataset, config, threads)
    dist = get_distance(config.distance)
    members = [np.flatnonzero(grouping.assignments == g) for g in range(grouping.k)]
    eligible = [g for g, idx in enumerate(members) if idx.size >= n_per_group]
    if not eligible:
        raise NoSurvivingGroupsError(f"every group has fewer than {n_per_group} samples")

    rng = np.random.default_rng(seed)
    values: List[float] = []
    for rep in range(repetitions):
        dists = []
        for g in eligible:
            idx = members[g]
            gi = rng.choice(idx, n_per_group, replace=False)
            ge = rng.choice(idx, n_per_group, replace=False)
            dists.append(dist(histogram(patchset.gen_values[ge]), histogram(patchset.gt_values[gi])))
        values.append(_mean(dists))
        log.debug("subsampling repetition %d: %.6g", rep, values[-1])

    arr = np.asarray(values)
    return SubsamplingResult(
        mean=float(arr.mean()),
        variance=float(arr.var()),
        n_per_group=n_per_group,
        repetitions=repetitions,
        values=values,
        groups_used=eligible,
    )


def back_projection_error(sr: GrayImage, lr: GrayImage, s: int, kernel: str = "bicubic") -> float:
    """RMSE on the 0-255 scale between g(SR) and the LR input."""
    if sr.shape != (lr.height * s, lr.width * s):
        raise DimensionMismatchError(
            f"SR is {sr.width}x{sr.height}, expected {lr.width * s}x{lr.height * s} for scale {s}"
        )
    down = downsample(sr, s, kernel).data.astype(np.float64)
    diff = down - lr.data.astype(np.float64)
    return float(np.sqrt(np.mean(diff * diff)))
