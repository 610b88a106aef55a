from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict

from controllers.errors import InvalidParameterError

log = logging.getLogger(__name__)


class ConfigFile:
    """Tiny `key = value` settings file.

    UTF-8, one setting per line, `#` starts a comment, blank lines ignored.
    Keys are normalized to option dests (`n-groups` -> `n_groups`).
    """

    @staticmethod
    def normalize_key(key: str) -> str:
        return key.strip().lstrip("-").replace("-", "_")

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> Dict[str, str]:
        out: Dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"{source}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            key = cls.normalize_key(key)
            if not key:
                raise InvalidParameterError(f"{source}:{lineno}: empty key")
            if key in out:
                log.warning("[config] %s:%d overrides earlier %r", source, lineno, key)
            out[key] = value.strip()
        return out

    @classmethod
    def load(cls, path: str | Path) -> Dict[str, str]:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise InvalidParameterError(f"cannot read config file {p}: {e}") from e
        values = cls.parse(text, source=str(p))
        log.info("[config] loaded %d settings from %s", len(values), p)
        return values
