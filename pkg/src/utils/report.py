#!/usr/bin/env python3
"""
Deterministic line-oriented reports.

A report is a header (experiment, config hash, grid, horizon and every
tolerance in use), one ``record`` line per level or time window, and a
summary block.  Numbers are printed with 12 significant digits and
nothing time-dependent is written, so identical configs produce
byte-identical files.
"""

import hashlib
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import yaml

logger = logging.getLogger("fhclab.report")

REPORT_VERSION = 1


def format_value(value: Any) -> str:
    """Render a value for a report line."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    if value is None:
        return "-"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(format_value(v) for v in value) + "]"
    return str(value).replace(" ", "_")


def canonical_yaml(data: Mapping[str, Any]) -> str:
    return yaml.safe_dump(_plain(data), default_flow_style=False, sort_keys=True)


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def config_hash(data: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical YAML rendering of a config mapping."""
    return hashlib.sha256(canonical_yaml(data).encode("utf-8")).hexdigest()


class Report:
    """Collects header fields, records and a summary, then renders them."""

    def __init__(self, experiment: str, header: Optional[Dict[str, Any]] = None):
        self.experiment = experiment
        self.header: Dict[str, Any] = dict(header or {})
        self.records: List[Tuple[str, Dict[str, Any]]] = []
        self.summary: Dict[str, Any] = {}

    def add(self, kind: str, **fields: Any):
        """Append one record line; fields keep their insertion order."""
        self.records.append((kind, fields))

    def set_summary(self, **fields: Any):
        self.summary.update(fields)

    def render(self) -> str:
        lines = [f"# fhclab report v{REPORT_VERSION}", f"experiment: {self.experiment}"]
        lines += [f"{key}: {format_value(value)}" for key, value in self.header.items()]
        lines.append("")
        for kind, fields in self.records:
            body = " ".join(f"{key}={format_value(value)}" for key, value in fields.items())
            lines.append(f"record {kind} {body}".rstrip())
        lines.append("")
        lines.append("summary")
        lines += [f"  {key}: {format_value(value)}" for key, value in self.summary.items()]
        return "\n".join(lines) + "\n"

    def write(self, path: Path) -> Path:
        path = Path(path).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        logger.info(f"Report written to {path}")
        return path


def write_yaml(data: Mapping[str, Any], path: Path) -> Path:
    """Write a payload (e.g. a constructed vector) as canonical YAML."""
    path = Path(path).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_yaml(data), encoding="utf-8")
    return path
