# tests/conftest.py
from __future__ import annotations

from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pytest

from controllers.imageio import save_image, upsample_nearest
from models.image_model import GrayImage


def smooth_hr(rng: np.random.Generator, lr_h: int, lr_w: int, s: int) -> GrayImage:
    """HR image whose LR (box) version varies smoothly: a blocky gradient plus mild noise."""
    base = rng.integers(40, 216, size=(lr_h, lr_w))
    hr = np.repeat(np.repeat(base, s, axis=0), s, axis=1)
    hr = hr + rng.integers(-20, 21, size=hr.shape)
    return GrayImage(np.clip(hr, 0, 255).astype(np.uint8))


def add_noise(rng: np.random.Generator, img: GrayImage, width: int) -> GrayImage:
    """Uniform integer noise in [-width, width], clipped."""
    noisy = img.data.astype(np.int64) + rng.integers(-width, width + 1, size=img.shape)
    return GrayImage(np.clip(noisy, 0, 255).astype(np.uint8))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def hr_images(rng) -> List[GrayImage]:
    """Five 64x64 HR images (16x16 LR at scale 4)."""
    return [smooth_hr(rng, 16, 16, 4) for _ in range(5)]


@pytest.fixture
def box_pair(rng):
    """(lr, sr) where sr is the pixel replication of lr, so box back-projection is exact."""
    lr = GrayImage(rng.integers(0, 256, size=(8, 10)).astype(np.uint8))
    return lr, upsample_nearest(lr, 4)


@pytest.fixture
def write_dirs(tmp_path) -> Callable[..., Dict[str, Path]]:
    """Write {dir_name: {stem: GrayImage}} as PNG directories under tmp_path."""
    def _write(sets: Dict[str, Dict[str, GrayImage]], root: Optional[Path] = None) -> Dict[str, Path]:
        base = root or tmp_path
        out = {}
        for name, images in sets.items():
            d = base / name
            d.mkdir(parents=True, exist_ok=True)
            for stem, img in images.items():
                save_image(img, d / f"{stem}.png")
            out[name] = d
        return out
    return _write


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI reconfigures the root logger; put it back after each test."""
    import logging

    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
