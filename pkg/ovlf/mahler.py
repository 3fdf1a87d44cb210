"""
Autocorrelation σ(k) of the Thue-Morse word: exact recurrence values,
partial sums, and the shift similarity density (σ(k) + 1) / 2
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List

import numpy as np
from scipy import signal

from .errors import ZeroShift
from .performance import check_symbol_budget, performance_tracker
from .words import thue_morse_bits

logger = logging.getLogger(__name__)

SIGMA_BOUND = Fraction(1, 3)


@lru_cache(maxsize=None)
def sigma(k: int) -> Fraction:
    """Exact σ(k): σ(0)=1, σ(1)=-1/3, σ(2n)=σ(n), σ(2n+1)=-(σ(n)+σ(n+1))/2"""
    if k < 0:
        raise ValueError("sigma is defined for k >= 0")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 3)
    n, odd = divmod(k, 2)
    if not odd:
        return sigma(n)
    return -(sigma(n) + sigma(n + 1)) / 2


class SigmaTable:
    """Immutable table of σ(0..k_max), filled bottom-up"""

    def __init__(self, k_max: int):
        if k_max < 0:
            raise ValueError("k_max must be >= 0")
        self.k_max = k_max
        values: List[Fraction] = [Fraction(1)]
        if k_max >= 1:
            values.append(Fraction(-1, 3))
        for k in range(2, k_max + 1):
            n, odd = divmod(k, 2)
            values.append(-(values[n] + values[n + 1]) / 2 if odd else values[n])
        self._values = tuple(values)

    def __getitem__(self, k: int) -> Fraction:
        return self._values[k]

    def __len__(self) -> int:
        return len(self._values)

    @property
    def values(self) -> Dict[int, Fraction]:
        return dict(enumerate(self._values))

    def recurrence_violations(self) -> List[int]:
        """Indices where the stored values break the recurrence"""
        bad = []
        v = self._values
        for k in range(2, self.k_max + 1):
            n, odd = divmod(k, 2)
            expected = -(v[n] + v[n + 1]) / 2 if odd else v[n]
            if v[k] != expected:
                bad.append(k)
        return bad

    def bound_violations(self) -> List[int]:
        return [k for k in range(1, self.k_max + 1) if abs(self._values[k]) > SIGMA_BOUND]


def sigma_table(k_max: int) -> SigmaTable:
    table = SigmaTable(k_max)
    bad = table.recurrence_violations()
    if bad:
        logger.error(f"sigma table breaks the recurrence at {bad[:5]}")
    return table


def empirical_sigma(k: int, n: int) -> Fraction:
    """(1/n) Σ_{i<n} (-1)^(t[i] + t[i+k]), exactly"""
    if k < 0 or n <= 0:
        raise ValueError("need k >= 0 and n > 0")
    check_symbol_budget(n + k, "empirical_sigma")
    bits = thue_morse_bits(0, n + k)
    agree = int(np.count_nonzero(bits[:n] == bits[k:k + n]))
    return Fraction(2 * agree - n, n)


@performance_tracker("empirical_sigma_table")
def empirical_sigma_table(k_max: int, n: int) -> List[Fraction]:
    """empirical_sigma(k, n) for every k <= k_max in one correlation pass"""
    check_symbol_budget(n + k_max, "empirical_sigma_table")
    signs = 1 - 2 * thue_morse_bits(0, n + k_max).astype(np.int64)
    sums = signal.correlate(signs, signs[:n], mode="valid", method="direct")
    return [Fraction(int(s), n) for s in sums]


def shift_density(k: int) -> Fraction:
    """LSD(t, t[k..]) = USD(t, t[k..]) = (σ(k) + 1) / 2 for k >= 1"""
    if k == 0:
        raise ZeroShift("shift density needs a nontrivial shift k >= 1")
    return (sigma(k) + 1) / 2


__all__ = [
    'sigma', 'SigmaTable', 'sigma_table', 'empirical_sigma', 'empirical_sigma_table',
    'shift_density', 'SIGMA_BOUND',
]
