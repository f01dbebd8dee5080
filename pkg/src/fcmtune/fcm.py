"""Order-k finite-context models: counting, Lidstone prediction, adaptive
generation, and the theoretical bitrate of the adaptive replay.

The model predicts the next symbol from the previous k symbols with the
Lidstone estimator P(s|c) = (n_s + alpha) / (sum_a n_a + r*alpha); alpha = 1
is Laplace, alpha = 1/2 the Jeffreys/Krichevsky-Trofimov rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._ngrams import check_code_width, ngram_codes, occurrence_index
from .sequences import DEFAULT_ALPHABET, Alphabet, SymbolSequence

# Probability floor for alpha = 0 evaluation: an unseen symbol in a seen
# context has empirical probability 0; it is charged 32 bits instead of
# infinity and the event is counted.
FLOOR_PROB = 2.0 ** -32
FLOOR_BITS = 32.0


class FcmError(ValueError):
    """Invalid model parameters or sequence/model mismatch."""


@dataclass(frozen=True)
class HyperParams:
    """Context order k and smoothing factor alpha."""

    k: int
    alpha: float

    def __post_init__(self):
        if self.k < 0:
            raise FcmError("k must be >= 0")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise FcmError("alpha must be a finite value >= 0")

    @property
    def no_smoothing(self) -> bool:
        return self.alpha == 0.0


@dataclass(frozen=True)
class BitrateResult:
    """Theoretical average bitrate of the adaptive replay."""

    bits_per_symbol: float
    total_bits: float
    symbols_coded: int
    floored_events: int = 0


@dataclass
class ContextCounts:
    """Per-context symbol counts for a fixed order k.

    Contexts are keyed by their base-r integer codes; only observed contexts
    are materialized (unseen contexts are semantically all-zero vectors).
    ``codes`` is sorted ascending and aligned with the rows of ``counts``.
    """

    k: int
    alphabet: Alphabet
    codes: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)
    truncated: bool = False

    @property
    def r(self) -> int:
        return self.alphabet.r

    @property
    def n_contexts(self) -> int:
        return int(self.codes.size)

    @property
    def total(self) -> int:
        """Total transition mass; equals T - k for an untruncated build."""
        return int(self.counts.sum())

    def encode_context(self, context) -> int:
        if isinstance(context, (int, np.integer)):
            return int(context)
        if isinstance(context, str):
            context = [self.alphabet.index(ch) for ch in context]
        context = list(context)
        if len(context) != self.k:
            raise FcmError(f"context length {len(context)} != k={self.k}")
        code = 0
        for c in context:
            code = code * self.r + int(c)
        return code

    def vector(self, context) -> np.ndarray:
        """Length-r count vector for a context; zeros when unseen."""
        code = self.encode_context(context)
        pos = int(np.searchsorted(self.codes, code))
        if pos < self.codes.size and self.codes[pos] == code:
            return self.counts[pos].copy()
        return np.zeros(self.r, dtype=np.int64)

    def items(self):
        """Iterate (context tuple, count vector) over observed contexts."""
        for code, row in zip(self.codes.tolist(), self.counts):
            digits = []
            c = code
            for _ in range(self.k):
                digits.append(c % self.r)
                c //= self.r
            yield tuple(reversed(digits)), row


def lidstone_prob(counts, s: int, alpha: float, r: int) -> float:
    """Lidstone estimate (n_s + alpha) / (sum_a n_a + r*alpha).

    With alpha = 0 and an all-zero count vector the distribution is
    undefined; callers evaluating bitrates apply the probability floor
    policy instead of calling this.
    """
    if alpha < 0:
        raise FcmError("alpha must be >= 0")
    counts = np.asarray(counts)
    total = counts.sum()
    if alpha == 0.0 and total == 0:
        raise FcmError("alpha = 0 with an empty context gives an undefined distribution")
    return float((counts[s] + alpha) / (total + r * alpha))


def build_counts(seq: SymbolSequence, k: int) -> ContextCounts:
    """Count every order-k transition of the sequence.

    For each position t in {k, ..., T-1} the count of seq[t-k..t-1] -> seq[t]
    is incremented; the total mass is exactly T - k. With T < k no window
    fits and an empty table is returned with ``truncated`` set.
    """
    if k < 0:
        raise FcmError("k must be >= 0")
    r = seq.alphabet.r
    if seq.T < k + 1:
        return ContextCounts(
            k=k,
            alphabet=seq.alphabet,
            codes=np.empty(0, dtype=np.int64),
            counts=np.empty((0, r), dtype=np.int64),
            truncated=seq.T < k,
        )
    full = ngram_codes(seq.data, k + 1, r)
    uniq, cnt = np.unique(full, return_counts=True)
    ctx_of_uniq = uniq // r
    sym_of_uniq = uniq % r
    ctx_codes = np.unique(ctx_of_uniq)
    counts = np.zeros((ctx_codes.size, r), dtype=np.int64)
    rows = np.searchsorted(ctx_codes, ctx_of_uniq)
    counts[rows, sym_of_uniq] = cnt
    return ContextCounts(k=k, alphabet=seq.alphabet, codes=ctx_codes, counts=counts)


def generate(
    params: HyperParams,
    T: int,
    seed: int,
    alphabet: Alphabet = DEFAULT_ALPHABET,
) -> SymbolSequence:
    """Generate a sequence from an adaptive order-k FCM.

    The first min(k, T) symbols are i.i.d. uniform over the alphabet; every
    later symbol is drawn from the Lidstone predictive distribution given the
    counts accumulated over the prefix generated so far, after which the
    counts are updated with the emitted symbol. Sampling is inverse-CDF in
    alphabet index order on a PCG64 stream, so output is a deterministic
    function of (params, T, seed).
    """
    if T < 1:
        raise FcmError("T must be >= 1")
    if params.alpha <= 0:
        raise FcmError("generation requires alpha > 0; the first visit to a "
                       "context is undefined without smoothing")
    r = alphabet.r
    k = params.k
    check_code_width(r, max(k, 1))
    alpha = float(params.alpha)
    ralpha = r * alpha
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(T)
    out = np.empty(T, dtype=np.int64)
    nboot = min(k, T)
    for t in range(nboot):
        s = int(u[t] * r)
        out[t] = r - 1 if s >= r else s
    rk = r ** k
    code = 0
    for t in range(nboot):
        code = (code * r + int(out[t])) % rk
    counts: dict[int, list[int]] = {}
    last = r - 1
    for t in range(nboot, T):
        vec = counts.get(code)
        x = u[t]
        if vec is None:
            # empty counts: the Lidstone predictive is exactly uniform
            s = int(x * r)
            if s > last:
                s = last
            counts[code] = vec = [0] * (r + 1)
        else:
            y = x * (vec[r] + ralpha)
            acc = 0.0
            s = last
            for i in range(last):
                acc += vec[i] + alpha
                if y < acc:
                    s = i
                    break
        out[t] = s
        vec[s] += 1
        vec[r] += 1
        code = (code * r + s) % rk
    return SymbolSequence(alphabet, out)


def replay_occurrences(seq: SymbolSequence, k: int):
    """Prior-occurrence counts driving the adaptive replay at order k.

    For each prediction position t in {k, ..., T-1}, m[t-k] is the number of
    earlier positions with the same (k+1)-gram ending at t, and M[t-k] the
    number of earlier positions with the same k-gram context; the adaptive
    Lidstone charge at t is (m + alpha) / (M + r*alpha). Always m <= M.
    """
    r = seq.alphabet.r
    n = seq.T - k
    if n <= 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    full = ngram_codes(seq.data, k + 1, r) if k > 0 else seq.data
    ctx = (full // r) if k > 0 else np.zeros(n, dtype=np.int64)
    return occurrence_index(full), occurrence_index(ctx)


def prediction_bits(m: np.ndarray, M: np.ndarray, alpha: float, r: int):
    """Total bits charged over the prediction positions, plus floored count."""
    if alpha == 0.0:
        ok = m > 0
        floored = int(m.size - np.count_nonzero(ok))
        bits = np.full(m.size, FLOOR_BITS)
        bits[ok] = np.log2(M[ok]) - np.log2(m[ok])
        return float(bits.sum()), floored
    bits = np.log2(M + r * alpha) - np.log2(m + alpha)
    return float(bits.sum()), 0


def bitrate(seq: SymbolSequence, params: HyperParams) -> BitrateResult:
    """Theoretical average bitrate of the adaptive replay.

    Replays the sequence through a fresh model: positions t < k are charged
    log2(r) bits each (uniform bootstrap); every later position is charged
    -log2 of the Lidstone probability of the observed symbol given the
    counts accumulated so far, after which the counts absorb it. With
    alpha = 0, zero-probability events are charged via the probability
    floor and counted in ``floored_events``.
    """
    if seq.T < 1:
        raise FcmError("bitrate needs T >= 1")
    r = seq.alphabet.r
    nboot = min(params.k, seq.T)
    total = nboot * float(np.log2(r))
    m, M = replay_occurrences(seq, params.k)
    charged, floored = prediction_bits(m, M, params.alpha, r)
    total += charged
    return BitrateResult(
        bits_per_symbol=total / seq.T,
        total_bits=total,
        symbols_coded=seq.T,
        floored_events=floored,
    )
