"""Deterministic CSV artifacts: UTF-8, comma-separated, '.' decimal point,
scientific notation with 12 significant digits, '#' header comment lines."""

from __future__ import annotations

import os
from typing import Sequence


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.11e}"
    return str(v)


def write_csv(
    path: str,
    comments: Sequence[str],
    columns: Sequence[str],
    rows: Sequence[Sequence],
) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
    return path
