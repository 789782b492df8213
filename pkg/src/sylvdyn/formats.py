"""Text formats: matrix files and trajectory tables.

Matrix file::

    3
    0,0 1.5,0 0,0
    -1.5,0 0,0 -2,0
    0,0 2,0 0,0

The first line is ``n``; each of the next ``n`` lines holds ``n`` entries
``re,im`` separated by whitespace. Numbers are written with 17 significant
digits so a write/read cycle reproduces every double exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .exceptions import SylvdynError

NUMBER_FORMAT = "{:.16e}"


class FormatError(SylvdynError, ValueError):
    """Malformed input file; messages carry the 1-based line number."""


def fmt(x: float) -> str:
    return NUMBER_FORMAT.format(float(x))


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"line {lineno}: cannot parse number {token!r}") from None
    if not np.isfinite(value):
        raise FormatError(f"line {lineno}: non-finite value {token!r}")
    return value


def parse_matrix(text: str) -> np.ndarray:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError("line 1: empty matrix file")
    head = lines[0].strip()
    try:
        n = int(head)
    except ValueError:
        raise FormatError(f"line 1: expected the dimension n, got {head!r}") from None
    if n < 1:
        raise FormatError(f"line 1: dimension must be positive, got {n}")
    if len(lines) - 1 < n:
        raise FormatError(f"line {len(lines) + 1}: expected {n} matrix rows, found {len(lines) - 1}")
    if len(lines) - 1 > n:
        raise FormatError(f"line {n + 2}: unexpected extra row (n = {n})")
    M = np.zeros((n, n), dtype=complex)
    for i, line in enumerate(lines[1:]):
        lineno = i + 2
        entries = line.split()
        if len(entries) != n:
            raise FormatError(f"line {lineno}: expected {n} entries, got {len(entries)}")
        for j, entry in enumerate(entries):
            parts = entry.split(",")
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: entry {j + 1} {entry!r} is not of the form re,im")
            M[i, j] = complex(_parse_float(parts[0], lineno), _parse_float(parts[1], lineno))
    return M


def format_matrix(M) -> str:
    M = np.asarray(M, dtype=complex)
    rows = [str(M.shape[0])]
    for row in M:
        rows.append(" ".join(f"{fmt(z.real)},{fmt(z.imag)}" for z in row))
    return "\n".join(rows) + "\n"


def read_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix(text)


def write_matrix(path, M) -> None:
    Path(path).write_text(format_matrix(M))


def format_trajectory(times, states, labels) -> str:
    """Comma-separated table: header ``t,<labels>`` then one row per time."""
    states = np.asarray(states)
    if np.iscomplexobj(states):
        header = ["t"] + [f"{lab}_{part}" for lab in labels for part in ("re", "im")]
        cols = np.empty((states.shape[0], 2 * states.shape[1]))
        cols[:, 0::2], cols[:, 1::2] = states.real, states.imag
    else:
        header = ["t", *labels]
        cols = states
    out = [",".join(header)]
    for t, row in zip(times, cols):
        out.append(",".join([fmt(t), *(fmt(x) for x in row)]))
    return "\n".join(out) + "\n"


def parse_trajectory(text: str):
    """Inverse of :func:`format_trajectory` for real tables: ``(labels, times, states)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header[1:], data[:, 0], data[:, 1:]
