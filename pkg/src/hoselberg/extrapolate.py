"""Sequence acceleration: Richardson extrapolation and Wynn's epsilon algorithm."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Extrapolated:
    value: complex
    error: float
    table: tuple = ()


def richardson(seq: Sequence[complex], exponents: Sequence[float] | None = None, ratio: float = 2.0) -> Extrapolated:
    """Eliminate error terms c h^p from values taken at h, h/ratio, h/ratio^2, ...

    With ``exponents`` given, column c removes the term h^{exponents[c]}.
    Without them every entry estimates its own contraction factor from the
    three entries of the previous column it is built from (iterated Aitken).
    """
    col = [complex(s) for s in seq]
    if not col:
        raise ValueError("empty sequence")
    table = [tuple(col)]
    c = 0
    while len(col) > 1:
        if exponents is not None:
            if c >= len(exponents):
                break
            f = ratio ** exponents[c]
            nxt = [(f * col[i + 1] - col[i]) / (f - 1.0) for i in range(len(col) - 1)]
        else:
            nxt = []
            for i in range(len(col) - 2):
                d0 = col[i + 1] - col[i]
                d1 = col[i + 2] - col[i + 1]
                if d0 == 0 or d1 == d0:
                    nxt = None
                    break
                q = d1 / d0
                nxt.append((col[i + 2] - q * col[i + 1]) / (1.0 - q))
            if not nxt:
                break
        col = nxt
        table.append(tuple(col))
        c += 1
    return Extrapolated(table[-1][-1], _tableau_error(table), tuple(table))


def _tableau_error(table) -> float:
    diffs = []
    if len(table[-1]) > 1:
        diffs.append(abs(table[-1][-1] - table[-1][-2]))
    if len(table) > 1:
        diffs.append(abs(table[-1][-1] - table[-2][-1]))
    return float(max(diffs)) if diffs else float(np.inf)


def wynn_epsilon(seq: Sequence[complex]) -> Extrapolated:
    """Wynn's epsilon algorithm (Shanks transform); exact on sums of geometric terms."""
    s = [complex(x) for x in seq]
    if not s:
        raise ValueError("empty sequence")
    prev = [0j] * (len(s) + 1)
    cur = list(s)
    evens = [tuple(cur)]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if d == 0:
                nxt = None
                break
            nxt.append(prev[i + 1] + 1.0 / d)
        if nxt is None:
            break
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            evens.append(tuple(cur))
    return Extrapolated(evens[-1][-1], _tableau_error(evens), tuple(evens))
