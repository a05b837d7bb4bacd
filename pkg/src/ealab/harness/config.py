"""Flat ``key=value`` configuration files and environment overrides.

Precedence, lowest first: built-in defaults, config file, ``EALAB_*``
environment variables, command-line flags.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Mapping, Optional

from ..errors import UsageError

ENV_PREFIX = "EALAB_"


def load_config(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[_norm(key)] = value.strip()
    return out


def env_overrides(environ: Optional[Mapping[str, str]] = None, prefix: str = ENV_PREFIX) -> dict:
    environ = os.environ if environ is None else environ
    return {_norm(k[len(prefix):]): v for k, v in environ.items() if k.startswith(prefix)}


def _norm(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def merge(defaults: dict, *layers: Mapping) -> dict:
    out = dict(defaults)
    for layer in layers:
        for k, v in layer.items():
            if v is not None:
                out[k] = v
    return out
