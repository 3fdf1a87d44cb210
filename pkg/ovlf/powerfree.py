#!/usr/bin/env python3
"""
Overlap and fractional-power detection on binary words, plus the
flip-fragility check on the Thue-Morse word
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional

import numpy as np

from .config import get_config
from .errors import InvalidExponent
from .performance import performance_tracker
from .words import FiniteWord, Word, as_word, thue_morse_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OverlapWitness:
    """word[position : position + total_length] is axaxa with |ax| = period_length"""
    position: int
    period_length: int

    @property
    def total_length(self) -> int:
        return 2 * self.period_length + 1

    def factor(self, w: Word) -> FiniteWord:
        return as_word(w)[self.position:self.position + self.total_length]

    def __str__(self) -> str:
        return f"overlap at {self.position}, period {self.period_length}, length {self.total_length}"


def _as_int(bits: np.ndarray) -> int:
    """Bit i of the result is bits[i]"""
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _runs_at_least(mask: int, length: int) -> int:
    """Bits i of mask such that bits i .. i+length-1 are all set"""
    have = 1
    while 2 * have <= length:
        mask &= mask >> have
        have *= 2
    if have < length:
        mask &= mask >> (length - have)
    return mask


def _first_overlap(x: int, n: int, min_end: int = 0) -> Optional[OverlapWitness]:
    """Leftmost, then shortest, overlap in the n-bit word x ending at or after min_end"""
    best = None
    for p in range(1, (n - 1) // 2 + 1):
        span = n - p
        eq = ~(x ^ (x >> p)) & ((1 << span) - 1)
        starts = _runs_at_least(eq, p + 1)
        skip = min_end - 2 * p
        if skip > 0:
            starts = (starts >> skip) << skip
        if best is not None:
            starts &= (1 << best.position) - 1
        if starts:
            best = OverlapWitness((starts & -starts).bit_length() - 1, p)
    return best


@performance_tracker("find_overlap")
def find_overlap(w: Word) -> Optional[OverlapWitness]:
    """Leftmost (then shortest) factor axaxa of w, or None if w is overlap-free"""
    word = as_word(w)
    return _first_overlap(_as_int(word.bits), len(word))


def find_overlap_bits(bits: np.ndarray, min_end: int = 0) -> Optional[OverlapWitness]:
    """find_overlap on a raw 0/1 array, restricted to overlaps ending at index >= min_end"""
    return _first_overlap(_as_int(bits), int(bits.size), min_end)


def is_overlap_free(w: Word) -> bool:
    return find_overlap(w) is None


def _longest_run(eq: np.ndarray) -> int:
    if eq.size == 0:
        return 0
    breaks = np.flatnonzero(~eq)
    edges = np.concatenate([[-1], breaks, [eq.size]])
    return int(np.diff(edges).max()) - 1


def smallest_period(w: Word) -> int:
    bits = as_word(w).bits
    n = bits.size
    for p in range(1, n):
        if np.array_equal(bits[p:], bits[:-p]):
            return p
    return n


def critical_exponent(w: Word) -> Fraction:
    """Largest ℓ/π over factors of length ℓ and period π"""
    bits = as_word(w).bits
    n = bits.size
    if n == 0:
        raise ValueError("critical exponent of the empty word is undefined")
    best = Fraction(1)
    for p in range(1, n):
        run = _longest_run(bits[p:] == bits[:-p])
        if run:
            best = max(best, Fraction(run + p, p))
    return best


def is_pq_power_free(w: Word, p: int, q: int, strict: bool = False) -> bool:
    """True iff w has no factor of exponent > p/q (strict: >= p/q)"""
    r = Fraction(p, q)
    if r <= 1:
        raise InvalidExponent(f"exponent {p}/{q} must exceed 1")
    if len(as_word(w)) == 0:
        return True
    e = critical_exponent(w)
    return e < r if strict else e <= r


def iter_power_free_words(length: int, p: int, q: int,
                          strict: bool = False) -> Iterator[np.ndarray]:
    """All binary words of the given length avoiding exponents > p/q (strict: >= p/q),
    in lexicographic order. Each yielded array is a fresh copy."""
    r = Fraction(p, q)
    if r <= 1:
        raise InvalidExponent(f"exponent {p}/{q} must exceed 1")
    if length <= 0:
        return
    word = np.zeros(length, dtype=np.uint8)
    periods = np.arange(1, length, dtype=np.int64)
    # runs[k]: the current suffix of length runs[k] + k + 1 has period k + 1
    empty = np.zeros(max(length - 1, 0), dtype=np.int64)
    stack = [(0, 1, empty), (0, 0, empty)]
    while stack:
        n, symbol, runs = stack.pop()
        if n:
            pis = periods[:n]
            agree = word[n - pis] == symbol
            new = np.where(agree, runs[:n] + 1, 0)
            suffix = new + pis
            over = suffix * q >= p * pis if strict else suffix * q > p * pis
            if over.any():
                continue
            runs = runs.copy()
            runs[:n] = new
        word[n] = symbol
        if n + 1 == length:
            yield word.copy()
            continue
        stack.append((n + 1, 1, runs))
        stack.append((n + 1, 0, runs))


def find_flip_overlap(flips: Iterable[int], window: int) -> Optional[OverlapWitness]:
    """Flip the given positions of t's length-`window` prefix and look for an overlap.

    None means the window was too small to expose one, never that the
    flipped word is overlap-free.
    """
    positions = sorted(set(int(i) for i in flips))
    if not positions:
        raise ValueError("at least one flip position is required")
    if positions[0] < 0:
        raise ValueError("flip positions must be nonnegative")
    if window < 2 * positions[-1] + 4:
        raise ValueError(f"window {window} is below 2*{positions[-1]}+4")
    bits = thue_morse_bits(0, window)
    bits[positions] ^= 1
    witness = find_overlap_bits(bits)
    if witness is None:
        logger.warning(f"no overlap within window {window} after flipping {positions[:8]}")
    return witness


def random_flips(count: int, window: int, seed: Optional[int] = None) -> List[int]:
    """`count` distinct flip positions that find_flip_overlap accepts for `window`,
    drawn with the configured seed unless one is given"""
    limit = (window - 4) // 2 + 1
    if count < 1 or count > limit:
        raise ValueError(f"cannot draw {count} flip positions below {limit}")
    if seed is None:
        seed = get_config().seed
    rng = np.random.default_rng(seed)
    positions = sorted(int(i) for i in rng.choice(limit, size=count, replace=False))
    logger.debug(f"seed {seed}: flipping {positions}")
    return positions


__all__ = [
    'OverlapWitness', 'find_overlap', 'find_overlap_bits', 'is_overlap_free',
    'smallest_period', 'critical_exponent', 'is_pq_power_free', 'iter_power_free_words',
    'find_flip_overlap', 'random_flips',
]
