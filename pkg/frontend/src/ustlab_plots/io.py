"""Readers for the artifact formats the simulation CLI publishes.

CSV files carry `# key=value` comment lines, a column-name row, then data
rows; an empty field encodes an infinite distance.  JSON artifacts are
either comparison reports (flat, with a "pass" key) or nested estimate
payloads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CsvTable:
    path: str
    meta: dict[str, str]
    columns: list[str]
    rows: list[list[float]] = field(repr=False)

    def column(self, name: str) -> list[float]:
        if name not in self.columns:
            raise ValueError(f"{self.path}: no column {name!r} (has {self.columns})")
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def read_table(path: str) -> CsvTable:
    meta: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            if not columns:
                columns = [c.strip() for c in line.split(",")]
                continue
            fields = line.split(",")
            if len(fields) != len(columns):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(columns)} fields, "
                    f"got {len(fields)}"
                )
            try:
                rows.append([math.inf if f == "" else float(f) for f in fields])
            except ValueError:
                bad = next(f for f in fields if f and not _is_float(f))
                raise ValueError(
                    f"{path}:{lineno}: non-numeric field {bad!r}"
                ) from None
    if not columns:
        raise ValueError(f"{path}: no column header found")
    if not rows:
        raise ValueError(f"{path}: no data rows (header only)")
    return CsvTable(path, meta, columns, rows)


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def distance_column(table: CsvTable, column: str | None = None) -> str:
    """The column a distance figure should draw, mirroring the CLI's choice."""
    if column is not None:
        if column not in table.columns:
            raise ValueError(
                f"{table.path}: no column {column!r} (has {table.columns})"
            )
        return column
    for name in table.columns:
        if name.startswith("d_") or name in ("T", "le_length"):
            return name
    raise ValueError(f"{table.path}: no distance column found in {table.columns}")


def read_json(path: str) -> dict:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return payload


def json_metric(payload: dict, dotted: str, path: str) -> float:
    """Extract a numeric field by dotted path, e.g. "value" or "gamma.value"."""
    node = payload
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ValueError(f"{path}: no field {dotted!r}")
        node = node[part]
    if not isinstance(node, (int, float)) or isinstance(node, bool):
        raise ValueError(f"{path}: field {dotted!r} is not numeric")
    return float(node)
