"""Serial-dependence measures for categorical sequences.

pami (partial auto mutual information) is the conditional mutual information
between symbols h apart given the symbols in between, the categorical
analogue of the partial autocorrelation function; its argmax lag is the
context-order selector. Cramer's nu and Cohen's kappa are the classical
unsigned/signed lag-h association measures on the lagged contingency table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._ngrams import ngram_codes, position_counts
from .sequences import SymbolSequence

MEASURES = ("pami", "cramers_v", "cohens_kappa")
DEFAULT_H_MAX = 10


class DependenceError(ValueError):
    """Invalid lag or sequence for a dependence measure."""


@dataclass(frozen=True)
class DependenceProfile:
    """Per-lag values of one dependence measure over lags 1..h_max."""

    measure: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise DependenceError(f"unknown measure {self.measure!r}")

    @property
    def h_max(self) -> int:
        return int(self.values.size)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1, self.h_max + 1)


@dataclass(frozen=True)
class LaggedJoint:
    """Empirical joint distribution of (Y_t, Y_{t-h}) and the marginals."""

    h: int
    joint: np.ndarray = field(repr=False)
    marginals: np.ndarray = field(repr=False)


def marginals(seq: SymbolSequence) -> np.ndarray:
    """Relative symbol frequencies p_i = count(i)/T."""
    if seq.T < 1:
        raise DependenceError("marginals need T >= 1")
    return np.bincount(seq.data, minlength=seq.alphabet.r) / seq.T


def lagged_joint(seq: SymbolSequence, h: int) -> LaggedJoint:
    """Joint relative frequencies joint[i][j] = #{t: Y_t=i, Y_{t-h}=j} / (T-h)."""
    if h < 1:
        raise DependenceError("lag must be >= 1")
    if h >= seq.T:
        raise DependenceError(f"lag {h} needs T > {h}")
    r = seq.alphabet.r
    pair = seq.data[h:] * r + seq.data[:-h]
    joint = np.bincount(pair, minlength=r * r).reshape(r, r) / (seq.T - h)
    return LaggedJoint(h=h, joint=joint, marginals=marginals(seq))


def cramers_v(seq: SymbolSequence, h: int) -> float:
    """Cramer's nu at lag h.

    nu(h) = sqrt( 1/(r_eff - 1) * sum_ij (p_ij - p_i p_j)^2 / (p_i p_j) )
    over the cells with p_i p_j > 0, where r_eff counts the symbols that
    actually occur. A constant sequence (r_eff < 2) is degenerate and
    returns 0.0.
    """
    lj = lagged_joint(seq, h)
    p = lj.marginals
    r_eff = int(np.count_nonzero(p))
    if r_eff < 2:
        return 0.0
    expected = np.outer(p, p)
    mask = expected > 0
    chi2 = float(((lj.joint[mask] - expected[mask]) ** 2 / expected[mask]).sum())
    return math.sqrt(chi2 / (r_eff - 1))


def cohens_kappa(seq: SymbolSequence, h: int) -> float:
    """Cohen's kappa at lag h.

    kappa(h) = sum_i (p_ii(h) - p_i^2) / (1 - sum_i p_i^2). For a constant
    sequence the denominator vanishes and the value is undefined; NaN is
    returned as the degenerate flag.
    """
    lj = lagged_joint(seq, h)
    p = lj.marginals
    denom = 1.0 - float(p @ p)
    if denom <= 0.0:
        return math.nan
    return float((np.diag(lj.joint) - p * p).sum() / denom)


def pami(seq: SymbolSequence, h: int) -> float:
    """Partial auto mutual information at lag h (natural log).

    Plug-in conditional mutual information I(Y_t; Y_{t+h} | in-between) over
    the N = T - h sliding windows of length h+1: each window w contributes
    (c(w)/N) * log( c(w)*c(mid) / (c(left)*c(right)) ), with c(mid) the count
    of its interior (h-1)-gram (c(mid) := N when h = 1), c(left)/c(right)
    the counts of its leading/trailing h-grams. Relative frequencies only,
    no smoothing. The result is clamped at 0 against fp round-off.
    """
    if h < 1:
        raise DependenceError("lag must be >= 1")
    if h >= seq.T:
        raise DependenceError(f"lag {h} needs T > {h}")
    data = seq.data
    r = seq.alphabet.r
    n = seq.T - h
    cw = position_counts(ngram_codes(data, h + 1, r))
    hgrams = ngram_codes(data, h, r)
    cl = position_counts(hgrams[:n])
    cr = position_counts(hgrams[1:])
    if h == 1:
        cm = np.full(n, n, dtype=np.int64)
    else:
        cm = position_counts(ngram_codes(data, h - 1, r)[1:n + 1])
    value = float(np.log((cw * cm.astype(float)) / (cl * cr.astype(float))).sum()) / n
    return max(value, 0.0)


_MEASURE_FUNCS = {"pami": pami, "cramers_v": cramers_v, "cohens_kappa": cohens_kappa}


def profile(seq: SymbolSequence, measure: str = "pami",
            h_max: int = DEFAULT_H_MAX) -> DependenceProfile:
    """Evaluate one measure at every lag 1..h_max."""
    if measure not in _MEASURE_FUNCS:
        raise DependenceError(f"unknown measure {measure!r}")
    if h_max < 1:
        raise DependenceError("h_max must be >= 1")
    if h_max >= seq.T:
        raise DependenceError(f"h_max {h_max} needs T > {h_max}")
    func = _MEASURE_FUNCS[measure]
    values = np.array([func(seq, h) for h in range(1, h_max + 1)])
    return DependenceProfile(measure=measure, values=values)


def select_k(prof: DependenceProfile) -> int:
    """Smallest lag attaining the maximum profile value."""
    values = prof.values
    if values.size == 0:
        raise DependenceError("empty profile")
    finite = np.isfinite(values)
    if not finite.any():
        raise DependenceError("profile has no finite values")
    best = np.where(finite, values, -np.inf)
    return int(np.argmax(best)) + 1
