"""Vectorized n-gram window coding shared by counting, replay, and pami."""

from __future__ import annotations

import numpy as np

# Window codes live in int64; base-r Horner packing needs r**n < 2**62.
MAX_CODE_BITS = 62


def check_code_width(r: int, n: int) -> None:
    if n * np.log2(r) > MAX_CODE_BITS:
        raise ValueError(f"window of {n} symbols over r={r} exceeds the int64 code space")


def ngram_codes(data: np.ndarray, n: int, r: int) -> np.ndarray:
    """Base-r codes of all length-n windows, one per start position.

    Returns an array of length T - n + 1; requires T >= n and n >= 1.
    """
    check_code_width(r, n)
    m = data.size - n + 1
    codes = data[:m].astype(np.int64, copy=True)
    for i in range(1, n):
        codes *= r
        codes += data[i : m + i]
    return codes


def occurrence_index(codes: np.ndarray) -> np.ndarray:
    """Number of earlier positions holding the same code, per position."""
    order = np.argsort(codes, kind="stable")
    srt = codes[order]
    boundary = np.empty(srt.size, dtype=bool)
    if srt.size:
        boundary[0] = True
        np.not_equal(srt[1:], srt[:-1], out=boundary[1:])
    starts = np.flatnonzero(boundary)
    run_start = np.repeat(starts, np.diff(np.append(starts, srt.size)))
    out = np.empty(codes.size, dtype=np.int64)
    out[order] = np.arange(codes.size, dtype=np.int64) - run_start
    return out


def position_counts(codes: np.ndarray) -> np.ndarray:
    """Total count of each position's code over the whole array."""
    _, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
    return counts[inverse]
