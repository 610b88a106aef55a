# controllers/imageio.py
"""
Image decoding, grayscale conversion, the fixed HR->LR operator g, and
aligned LR/HR patch-pair extraction.
"""
from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Literal, Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from PIL import Image, UnidentifiedImageError

from controllers.errors import DimensionMismatchError, ImageDecodeError, InvalidParameterError
from models.image_model import GrayImage, PatchPairSet

log = logging.getLogger(__name__)

Kernel = Literal["box", "bicubic"]
PixelMode = Literal["single", "block"]

# Pillow modes that are 8 bits per channel
_GRAY_MODES = {"L", "LA"}
_COLOR_MODES = {"RGB", "RGBA", "RGBX", "P", "PA"}

_CATMULL_ROM_A = -0.5

PIXEL_OFFSET_NAMES = ("center", "top-left", "bottom-right")


# ---------------- Decoding ----------------

def luma(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma, round-half-up, in exact integer arithmetic."""
    c = rgb.astype(np.int64)
    y = (299 * c[..., 0] + 587 * c[..., 1] + 114 * c[..., 2] + 500) // 1000
    return np.clip(y, 0, 255).astype(np.uint8)


def load_image(path: Union[str, Path]) -> GrayImage:
    """Decode an 8-bit PNG or binary PGM into a GrayImage. RGB is reduced to luma."""
    p = Path(path)
    if not p.is_file():
        raise ImageDecodeError(f"{p}: file not found or unreadable")
    try:
        with Image.open(p) as im:
            im.load()
            mode = im.mode
            if im.width < 1 or im.height < 1:
                raise ImageDecodeError(f"{p}: zero-dimension image")
            if mode in _GRAY_MODES:
                data = np.asarray(im.getchannel(0), dtype=np.uint8)
            elif mode in _COLOR_MODES:
                data = luma(np.asarray(im.convert("RGB"), dtype=np.uint8))
            else:
                raise ImageDecodeError(f"{p}: unsupported bit depth / mode {mode!r}")
    except ImageDecodeError:
        raise
    except (OSError, UnidentifiedImageError, ValueError) as e:
        raise ImageDecodeError(f"{p}: {e}") from e
    log.debug("loaded %s (%s, %dx%d)", p, mode, data.shape[1], data.shape[0])
    return GrayImage(data)


def save_image(img: GrayImage, path: Union[str, Path]) -> None:
    """Write a GrayImage as 8-bit grayscale (format from the suffix)."""
    Image.fromarray(np.asarray(img.data, dtype=np.uint8)).save(Path(path))


# ---------------- Downsampling (g) ----------------

def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def _cubic(x: np.ndarray, a: float = _CATMULL_ROM_A) -> np.ndarray:
    ax = np.abs(x)
    ax2 = ax * ax
    ax3 = ax2 * ax
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def _bicubic_matrix(n_in: int, scale: int) -> np.ndarray:
    """
    (n_in // scale, n_in) resampling matrix: Catmull-Rom stretched by `scale`
    (antialiasing), clamped edges, rows normalized to 1.
    """
    n_out = n_in // scale
    support = 2.0 * scale
    m = np.zeros((n_out, n_in), dtype=np.float64)
    for i in range(n_out):
        center = (i + 0.5) * scale - 0.5
        taps = np.arange(math.floor(center - support), math.ceil(center + support) + 1)
        w = _cubic((taps - center) / scale)
        w = w / w.sum()
        np.add.at(m[i], np.clip(taps, 0, n_in - 1), w)
    return m


def downsample(img: GrayImage, scale: int, kernel: Kernel = "bicubic") -> GrayImage:
    s = int(scale)
    if s < 2:
        raise InvalidParameterError(f"scale must be >= 2, got {scale}")
    h, w = img.shape
    if h % s or w % s:
        raise DimensionMismatchError(f"image {w}x{h} is not divisible by scale {s}")

    if kernel == "box":
        sums = img.data.astype(np.int64).reshape(h // s, s, w // s, s).sum(axis=(1, 3))
        n = s * s
        out = (2 * sums + n) // (2 * n)
        return GrayImage(out.astype(np.uint8))
    if kernel == "bicubic":
        rows = _bicubic_matrix(h, s)
        cols = _bicubic_matrix(w, s)
        out = rows @ img.data.astype(np.float64) @ cols.T
        return GrayImage(_round_half_up(out))
    raise InvalidParameterError(f"unknown kernel {kernel!r}")


def upsample_nearest(img: GrayImage, scale: int) -> GrayImage:
    """Constant (pixel-replication) upsampling; inverse of box downsampling on block-constant images."""
    s = int(scale)
    return GrayImage(np.repeat(np.repeat(img.data, s, axis=0), s, axis=1))


# ---------------- Patch pairs ----------------

def default_pixel_offset(scale: int) -> Tuple[int, int]:
    c = (int(scale) - 1) // 2
    return (c, c)


def resolve_pixel_offset(offset: Union[str, Tuple[int, int], None], scale: int) -> Tuple[int, int]:
    """Accepts None, a named position (center/top-left/bottom-right) or an explicit (dr, dc)."""
    s = int(scale)
    if offset is None or offset == "center":
        return default_pixel_offset(s)
    if offset == "top-left":
        return (0, 0)
    if offset == "bottom-right":
        return (s - 1, s - 1)
    if isinstance(offset, str):
        raise InvalidParameterError(f"unknown pixel offset {offset!r}")
    dr, dc = (int(v) for v in offset)
    if not (0 <= dr < s and 0 <= dc < s):
        raise InvalidParameterError(f"pixel offset {(dr, dc)} outside [0, {s})^2")
    return (dr, dc)


def window_starts(length: int, r: int, stride: int) -> np.ndarray:
    return np.arange(0, length - r + 1, stride, dtype=np.int64)


def extract_patch_pairs(
    lr: GrayImage,
    hr_gt: GrayImage,
    hr_gen: GrayImage,
    r: int,
    s: int,
    stride: Optional[int] = None,
    pixel_offset: Union[str, Tuple[int, int], None] = None,
    *,
    pixel_mode: PixelMode = "single",
    image_id: int = 0,
) -> PatchPairSet:
    """
    Slide an r x r window over `lr` (no padding). For each window centred on
    LR pixel (i, j) take the HR value(s) under it: one pixel at
    (s*i + dr, s*j + dc) in single mode, the whole s x s block in block mode.
    """
    r, s = int(r), int(s)
    stride = s if stride is None else int(stride)
    if r % 2 == 0:
        raise InvalidParameterError(f"patch size must be odd, got {r}")
    if stride < 1:
        raise InvalidParameterError("stride must be >= 1")
    for name, hr in (("hr_gt", hr_gt), ("hr_gen", hr_gen)):
        if hr.shape != (lr.height * s, lr.width * s):
            raise DimensionMismatchError(
                f"{name} is {hr.width}x{hr.height}, expected {lr.width * s}x{lr.height * s} (scale {s})"
            )
    if r > lr.height or r > lr.width:
        raise InvalidParameterError(f"patch size {r} larger than LR image {lr.width}x{lr.height}")
    dr, dc = resolve_pixel_offset(pixel_offset, s)

    rows = window_starts(lr.height, r, stride)
    cols = window_starts(lr.width, r, stride)
    windows = sliding_window_view(lr.data, (r, r))[rows][:, cols]
    n = rows.size * cols.size
    lr_patches = windows.reshape(n, r * r).copy()

    ci = (rows + r // 2)[:, None]
    cj = (cols + r // 2)[None, :]
    if pixel_mode == "single":
        gt = hr_gt.data[s * ci + dr, s * cj + dc].reshape(n, 1)
        gen = hr_gen.data[s * ci + dr, s * cj + dc].reshape(n, 1)
    elif pixel_mode == "block":
        def _blocks(hr: GrayImage) -> np.ndarray:
            b = hr.data.reshape(lr.height, s, lr.width, s).transpose(0, 2, 1, 3)
            return b[ci, cj].reshape(n, s * s)
        gt, gen = _blocks(hr_gt), _blocks(hr_gen)
    else:
        raise InvalidParameterError(f"unknown pixel mode {pixel_mode!r}")

    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    positions = np.stack([rr.ravel(), cc.ravel()], axis=1)
    return PatchPairSet(
        patch_size=r,
        lr_patches=lr_patches,
        gt_values=np.ascontiguousarray(gt, dtype=np.uint8),
        gen_values=np.ascontiguousarray(gen, dtype=np.uint8),
        image_ids=np.full(n, int(image_id), dtype=np.int64),
        positions=positions.astype(np.int64),
        meta={"scale": s, "stride": stride, "pixel_offset": (dr, dc), "pixel_mode": pixel_mode},
    )
