"""Plain-text sequence files and deterministic JSON helpers.

A sequence file is UTF-8 text holding whitespace-separated base-10 letters
(1..d), optionally preceded by ``#``-prefixed header lines carrying the
generation parameters as decimal strings, e.g.::

    # alpha 0.5 0.3 0.2
    # C 0.7
    # C_prime 0.7
    # x0 0.0 0.0 0.0
    # kind tijdeman
    1 2 1 3 ...

Decimals are written with ``repr`` so parsing them back yields bit-identical
doubles.
"""

from __future__ import annotations

import json

import numpy as np

from .sequences import LetterSequence

LETTERS_PER_LINE = 50


def write_sequence(path, word: LetterSequence, header: dict | None = None) -> None:
    lines = []
    for key, value in (header or {}).items():
        if isinstance(value, (list, tuple, np.ndarray)):
            text = " ".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"# {key} {text}")
    letters = word.letters
    for start in range(0, letters.size, LETTERS_PER_LINE):
        chunk = letters[start : start + LETTERS_PER_LINE]
        lines.append(" ".join(str(int(v)) for v in chunk))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_sequence(path) -> tuple[LetterSequence, dict]:
    header: dict = {}
    letters: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) >= 2:
                    key, values = parts[0], parts[1:]
                    if key in ("alpha", "x0"):
                        header[key] = [float(v) for v in values]
                    elif key in ("C", "C_prime"):
                        header[key] = float(values[0])
                    else:
                        header[key] = " ".join(values)
                continue
            letters.extend(int(tok) for tok in line.split())
    if "alpha" in header:
        d = len(header["alpha"])
    else:
        d = max(letters) if letters else 2
    return LetterSequence(np.array(letters or [], dtype=np.int64), d), header


def dump_json(obj, path) -> None:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def decimate_curve(values: np.ndarray, max_points: int = 1000) -> list:
    """Thin a running curve to at most max_points (index, value) pairs."""
    n = values.size
    if n == 0:
        return []
    idx = np.unique(np.linspace(0, n - 1, min(n, max_points)).astype(int))
    return [[int(i), float(values[i])] for i in idx]
