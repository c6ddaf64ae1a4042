"""Small shared helpers: CSV emission and thread capping."""

from __future__ import annotations

import os


def format_float(v: float) -> str:
    """Fixed text form for emitted numbers: 12 significant digits, '.' decimal."""
    return f"{float(v):.12g}"


def write_csv(path, header, rows) -> None:
    """Write rows of numbers (or strings) with a mandatory header, LF endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(c if isinstance(c, str) else format_float(c) for c in row) + "\n"
            )


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, "r") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def max_threads() -> int:
    """Worker cap for embarrassingly parallel solves (NLAFFINE_THREADS)."""
    raw = os.environ.get("NLAFFINE_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))
