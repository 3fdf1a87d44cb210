#!/usr/bin/env python3
"""
Similarity density of binary words: exact SD of finite words, prefix
density curves and tail estimators of LSD/USD for infinite words, and the
sliding-window (Weyl) variant
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np

from .config import get_config
from .errors import EmptyWord, LengthMismatch
from .performance import check_symbol_budget, performance_tracker
from .words import Characteristic, FiniteWord, Word, WordSpec, as_word

logger = logging.getLogger(__name__)

CURVE_HEADER = "prefix_length,sd_num,sd_den,sd_float"

# symbols processed per chunk when building long curves
CHUNK_SYMBOLS = 1 << 22

_POPCOUNT = np.array([bin(i).count('1') for i in range(256)], dtype=np.int64)


def kronecker(a: int, b: int) -> int:
    return 1 if a == b else 0


def matches(x: Word, y: Word) -> int:
    """Number of positions where two equal-length words agree"""
    x, y = as_word(x), as_word(y)
    if len(x) != len(y):
        raise LengthMismatch(f"words have lengths {len(x)} and {len(y)}")
    # padding bits are zero in both, so they never count as mismatches
    mismatches = int(_POPCOUNT[np.bitwise_xor(x.packed, y.packed)].sum())
    return len(x) - mismatches


def sd(x: Word, y: Word) -> Fraction:
    """SD(x, y) as an exact fraction"""
    x, y = as_word(x), as_word(y)
    if len(x) != len(y):
        raise LengthMismatch(f"words have lengths {len(x)} and {len(y)}")
    if len(x) == 0:
        raise EmptyWord("similarity density of empty words is undefined")
    return Fraction(matches(x, y), len(x))


def exact_argmin(num: np.ndarray, den: np.ndarray) -> int:
    """Index of the exact minimum of num/den (first one on ties).

    Floats pick a candidate; exact int64 cross-multiplication settles it.
    Products num * den must fit in int64.
    """
    num = num.astype(np.int64, copy=False)
    den = den.astype(np.int64, copy=False)
    best = int(np.argmin(num / den))
    while True:
        diff = num * den[best] - num[best] * den
        if diff.min() >= 0:
            break
        best = int(np.argmin(diff))
    # first index among exact ties
    ties = np.flatnonzero(num * den[best] == num[best] * den)
    return int(ties[0])


def exact_argmax(num: np.ndarray, den: np.ndarray) -> int:
    return exact_argmin(-num.astype(np.int64), den)


def equality_bits(x: WordSpec, y: WordSpec, start: int, count: int) -> np.ndarray:
    """δ(x[i], y[i]) for i in [start, start+count)"""
    return (1 - (x.bits(start, count) ^ y.bits(start, count))).astype(np.uint8)


class DensityCurve:
    """SD samples of growing prefixes, stored as (length, match count) arrays.

    A curve may describe a segment starting at `offset`; segments over
    adjacent ranges merge exactly by adding match counts.
    """

    def __init__(self, lengths: np.ndarray, match_counts: np.ndarray, horizon: int,
                 total_matches: int, tail_fraction: Fraction, offset: int = 0):
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.match_counts = np.asarray(match_counts, dtype=np.int64)
        self.horizon = horizon
        self.total_matches = total_matches
        self.tail_fraction = Fraction(tail_fraction)
        self.offset = offset

    def __len__(self) -> int:
        return int(self.lengths.size)

    @property
    def samples(self) -> List[Tuple[int, Fraction]]:
        return [(int(n), Fraction(int(m), int(n)))
                for n, m in zip(self.lengths, self.match_counts)]

    def value_at(self, i: int) -> Fraction:
        return Fraction(int(self.match_counts[i]), int(self.lengths[i]))

    def _extreme(self, mask: Optional[np.ndarray], largest: bool) -> Fraction:
        lengths, counts = self.lengths, self.match_counts
        if mask is not None:
            lengths, counts = lengths[mask], counts[mask]
        if lengths.size == 0:
            raise ValueError("curve has no samples in the requested range")
        pick = exact_argmax if largest else exact_argmin
        i = pick(counts, lengths)
        return Fraction(int(counts[i]), int(lengths[i]))

    def tail_mask(self) -> np.ndarray:
        """Samples with prefix length strictly inside the last tail_fraction of the horizon"""
        f = self.tail_fraction
        # length > (1 - f) * horizon, in integers
        mask = self.lengths * f.denominator > (f.denominator - f.numerator) * self.horizon
        if not mask.any():
            mask = np.zeros_like(mask)
            mask[-1] = True
        return mask

    @property
    def running_min(self) -> Fraction:
        return self._extreme(None, largest=False)

    @property
    def running_max(self) -> Fraction:
        return self._extreme(None, largest=True)

    @property
    def tail_min(self) -> Fraction:
        return self._extreme(self.tail_mask(), largest=False)

    @property
    def tail_max(self) -> Fraction:
        return self._extreme(self.tail_mask(), largest=True)

    def merge(self, other: "DensityCurve") -> "DensityCurve":
        """Concatenate a curve over the range that starts where this one ends"""
        if other.offset != self.offset + self.horizon:
            raise ValueError(f"cannot merge segment at {other.offset} after range ending at "
                             f"{self.offset + self.horizon}")
        return DensityCurve(
            np.concatenate([self.lengths, other.lengths + self.horizon]),
            np.concatenate([self.match_counts, other.match_counts + self.total_matches]),
            self.horizon + other.horizon,
            self.total_matches + other.total_matches,
            self.tail_fraction,
            self.offset,
        )

    def write_csv(self, out: TextIO, delimiter: str = ",") -> None:
        """Rationals are authoritative; sd_float is there for plotting"""
        out.write(CURVE_HEADER.replace(",", delimiter) + "\n")
        for n, value in self.samples:
            row = [str(n), str(value.numerator), str(value.denominator), f"{float(value):.10f}"]
            out.write(delimiter.join(row) + "\n")


def _curve_segment(x: WordSpec, y: WordSpec, start: int, span: int, stride: int,
                   tail_fraction: Fraction) -> DensityCurve:
    eq = equality_bits(x, y, start, span)
    running = np.cumsum(eq, dtype=np.int64)
    lengths = np.arange(stride, span + 1, stride, dtype=np.int64)
    counts = running[lengths - 1] if lengths.size else np.zeros(0, dtype=np.int64)
    total = int(running[-1]) if span else 0
    return DensityCurve(lengths, counts, span, total, tail_fraction, offset=start)


@performance_tracker("sd_curve")
def sd_curve(x: WordSpec, y: WordSpec, horizon: int, stride: int = 1,
             tail_fraction: Optional[Fraction] = None) -> DensityCurve:
    """SD of the prefixes of length stride, 2*stride, ... <= horizon"""
    if not horizon >= stride >= 1:
        raise ValueError("need horizon >= stride >= 1")
    check_symbol_budget(horizon, "sd_curve")
    if tail_fraction is None:
        tail_fraction = get_config().tail_fraction
    chunk = stride * max(1, CHUNK_SYMBOLS // stride)
    curve = None
    start = 0
    while start < horizon:
        span = min(chunk, horizon - start)
        segment = _curve_segment(x, y, start, span, stride, tail_fraction)
        curve = segment if curve is None else curve.merge(segment)
        start += span
    logger.debug(f"sd_curve({x}, {y}) horizon={horizon} stride={stride}: {len(curve)} samples")
    return curve


def _tail_extrema(x: WordSpec, y: WordSpec, horizon: int, stride: int,
                  tail_fraction: Fraction) -> Tuple[Fraction, Fraction]:
    """Exact tail min and max of the SD curve, one chunk in memory at a time"""
    num, den = tail_fraction.numerator, tail_fraction.denominator
    # first multiple of stride with length > (1 - f) * horizon
    first = ((den - num) * horizon // den) // stride * stride + stride
    if first > horizon:
        first = horizon // stride * stride
    chunk = stride * max(1, CHUNK_SYMBOLS // stride)
    base = 0
    low: Optional[Fraction] = None
    high: Optional[Fraction] = None
    start = 0
    while start < horizon:
        span = min(chunk, horizon - start)
        eq = equality_bits(x, y, start, span)
        if start + span < first:
            base += int(eq.sum())
            start += span
            continue
        running = base + np.cumsum(eq, dtype=np.int64)
        lengths = np.arange(max(first, start + stride), start + span + 1, stride, dtype=np.int64)
        if lengths.size:
            counts = running[lengths - start - 1]
            i, j = exact_argmin(counts, lengths), exact_argmax(counts, lengths)
            lo = Fraction(int(counts[i]), int(lengths[i]))
            hi = Fraction(int(counts[j]), int(lengths[j]))
            low = lo if low is None else min(low, lo)
            high = hi if high is None else max(high, hi)
        base = int(running[-1])
        start += span
    return low, high


@dataclass(frozen=True)
class DensityEstimate:
    lsd_lower: Fraction
    usd_upper: Fraction
    horizon: int
    block_size: int
    tail_fraction: Fraction


def estimate_lsd_usd(x: WordSpec, y: WordSpec, horizon: Optional[int] = None,
                     block_size: int = 1,
                     tail_fraction: Optional[Fraction] = None) -> DensityEstimate:
    """Tail minimum and maximum of SD over prefix lengths that are multiples of block_size"""
    config = get_config()
    horizon = horizon or config.default_horizon
    tail_fraction = Fraction(tail_fraction) if tail_fraction is not None else config.tail_fraction
    if horizon < block_size:
        raise ValueError("horizon must be at least the block size")
    check_symbol_budget(min(horizon, CHUNK_SYMBOLS), "estimate_lsd_usd")
    low, high = _tail_extrema(x, y, horizon, block_size, tail_fraction)
    estimate = DensityEstimate(low, high, horizon, block_size, tail_fraction)
    logger.info(f"LSD/USD estimate for ({x}, {y}) at {horizon}: "
                f"[{float(estimate.lsd_lower):.4f}, {float(estimate.usd_upper):.4f}]")
    return estimate


def complement_bounds(lsd: Fraction, usd: Fraction) -> Tuple[Fraction, Fraction]:
    """(LSD, USD) of (x̄, y) given (LSD, USD) of (x, y)"""
    return 1 - usd, 1 - lsd


def weyl_estimate(x: WordSpec, y: WordSpec, block_length: int,
                  horizon: int) -> Tuple[Fraction, Fraction]:
    """inf and sup of block SD over all windows of block_length inside [0, horizon)"""
    if not 1 <= block_length <= horizon:
        raise ValueError("need 1 <= block_length <= horizon")
    check_symbol_budget(horizon, "weyl_estimate")
    eq = equality_bits(x, y, 0, horizon)
    running = np.concatenate([[0], np.cumsum(eq, dtype=np.int64)])
    windows = running[block_length:] - running[:-block_length]
    return Fraction(int(windows.min()), block_length), Fraction(int(windows.max()), block_length)


def weyl_table(x: WordSpec, y: WordSpec, horizon: int,
               exponents: Iterable[int] = range(4, 13)) -> List[Tuple[int, Fraction, Fraction]]:
    rows = []
    for e in exponents:
        n = 1 << e
        if n > horizon:
            break
        low, high = weyl_estimate(x, y, n, horizon)
        rows.append((n, low, high))
    return rows


_ALL_INDICES = Characteristic(lambda idx: np.ones(idx.shape, dtype=bool), name="N", vectorized=True)


def asymptotic_density(oracle: Union[Callable[[int], bool], Characteristic], horizon: int,
                       tail_fraction: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
    """Tail extrema of |A ∩ [0,n)|/n, computed as SD(χ_A, 1^ω)"""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    chi = oracle if isinstance(oracle, Characteristic) else Characteristic(oracle)
    estimate = estimate_lsd_usd(chi, _ALL_INDICES, horizon, 1, tail_fraction)
    return estimate.lsd_lower, estimate.usd_upper


__all__ = [
    'kronecker', 'matches', 'sd', 'sd_curve', 'estimate_lsd_usd', 'weyl_estimate',
    'weyl_table', 'asymptotic_density', 'complement_bounds', 'DensityCurve',
    'DensityEstimate', 'exact_argmin', 'exact_argmax', 'CURVE_HEADER',
]
