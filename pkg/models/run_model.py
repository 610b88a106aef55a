from __future__ import annotations

import json
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field

TOOL_VERSION = "0.4.0"


class RunManifest(BaseModel):
    """
    Echoed into every output document. Deliberately free of timestamps and of
    the worker count, so identical manifests mean byte-identical outputs.
    """
    model_config = ConfigDict(extra="forbid")

    subcommand: str
    config: Dict[str, Any] = Field(default_factory=dict)
    inputs: Dict[str, Any] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    seed: int = 0
    tool_version: str = TOOL_VERSION

    def compact_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
