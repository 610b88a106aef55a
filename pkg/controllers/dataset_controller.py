# controllers/dataset_controller.py
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from controllers.errors import ImageDecodeError, UnmatchedFilesError
from controllers.imageio import load_image
from models.image_model import GrayImage

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = {".png", ".pgm"}


class DatasetController:
    """
    Pairs images across directories by file stem:
      - Enumerate the images of each directory
      - Require every stem to be present in every directory
      - Decode matched files into GrayImages
    """

    # ---------------- Discovery ----------------

    @staticmethod
    def list_images(directory: str | Path) -> Dict[str, Path]:
        """{stem: path} for every PNG / PGM file in `directory`."""
        d = Path(directory)
        if not d.is_dir():
            raise ImageDecodeError(f"{d}: not a directory")
        out: Dict[str, Path] = {}
        for p in sorted(d.iterdir()):
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES:
                if p.stem in out:
                    log.warning("duplicate stem %r in %s; keeping %s", p.stem, d, out[p.stem].name)
                    continue
                out[p.stem] = p
        return out

    def match_stems(self, directories: Sequence[str | Path]) -> List[Tuple[str, List[Path]]]:
        """
        [(stem, [path per directory]), ...] sorted by stem.
        Raises UnmatchedFilesError naming every stem missing somewhere.
        """
        listings = [self.list_images(d) for d in directories]
        all_stems = sorted(set().union(*[set(x) for x in listings]))
        missing = []
        for stem in all_stems:
            for d, listing in zip(directories, listings):
                if stem not in listing:
                    missing.append(f"{stem} (missing in {d})")
        if missing:
            raise UnmatchedFilesError(f"{len(missing)} unmatched file(s): {'; '.join(missing)}", missing)
        if not all_stems:
            raise UnmatchedFilesError("no images found", [])
        return [(stem, [listing[stem] for listing in listings]) for stem in all_stems]

    # ---------------- Loading ----------------

    def load_sets(self, directories: Sequence[str | Path]) -> List[Tuple[str, List[GrayImage]]]:
        matched = self.match_stems(directories)
        out = [(stem, [load_image(p) for p in paths]) for stem, paths in matched]
        log.info("loaded %d image set(s) from %d directories", len(out), len(directories))
        return out
