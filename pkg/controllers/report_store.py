# controllers/report_store.py
from __future__ import annotations

import csv
import io
import json
import logging
import os
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from controllers.errors import InvalidParameterError
from models.run_model import RunManifest

log = logging.getLogger(__name__)


def fmt_float(v: Any) -> str:
    """Stable text form for CSV cells."""
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


class ReportStore:
    """
    File-backed output writer.

    - Every document lands in `out_dir` under a plain file name (no separators).
    - Writes go to a temp file first and are moved into place with os.replace,
      so a failed run never leaves a half-written report behind.
    - The run manifest is embedded in every document: a `manifest` key in JSON,
      a leading `# manifest:` line in CSV, an XML comment in SVG.
    """

    def __init__(self, out_dir: os.PathLike | str, manifest: Optional[RunManifest] = None) -> None:
        self.out_dir = Path(out_dir)
        self.manifest = manifest

    # ---------------- Private helpers ----------------

    @staticmethod
    def _is_safe_name(name: str) -> bool:
        if not name or name in (".", ".."):
            return False
        if os.sep in name or (os.altsep and os.altsep in name):
            return False
        return not any(ch in set('<>:"/\\|?*') for ch in name)

    def path_for(self, name: str) -> Path:
        if not self._is_safe_name(name):
            raise InvalidParameterError(f"unsafe output file name {name!r}")
        return self.out_dir / name

    def _write_text(self, name: str, text: str) -> Path:
        path = self.path_for(name)
        os.makedirs(self.out_dir, exist_ok=True)
        tmp_path = path.with_name(path.name + ".tmp")
        try:
            with open(tmp_path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp_path, path)
        except OSError:
            log.error("failed to write %s", path)
            try:
                tmp_path.unlink(missing_ok=True)
            except OSError:
                pass
            raise
        log.info("wrote %s", path)
        return path

    def _manifest_dict(self) -> Optional[dict]:
        return None if self.manifest is None else self.manifest.model_dump(mode="json")

    # ---------------- Public API ----------------

    def write_json(self, name: str, data: dict) -> Path:
        doc = dict(data)
        if self.manifest is not None:
            doc["manifest"] = self._manifest_dict()
        return self._write_text(name, json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")

    def render_csv(self, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        buf = io.StringIO()
        if self.manifest is not None:
            buf.write(f"# manifest: {self.manifest.compact_json()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(v) for v in row])
        return buf.getvalue()

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        return self._write_text(name, self.render_csv(header, rows))

    def write_svg(self, name: str, svg_text: str) -> Path:
        # the SVG renderer embeds the manifest comment itself
        return self._write_text(name, svg_text)

    def manifest_comment(self) -> str:
        return "" if self.manifest is None else f"manifest: {self.manifest.compact_json()}"


def read_csv_rows(path: os.PathLike | str) -> List[dict]:
    """DictReader over a CSV that may start with `#` comment lines."""
    p = Path(path)
    with open(p, "r", encoding="utf-8", newline="") as f:
        lines = [ln for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    return [{(k or "").strip(): (v or "").strip() for k, v in row.items()} for row in reader]
