#!/usr/bin/env python3
"""
Finite binary words, the Thue-Morse morphism and random-access generators
for the named infinite words (t, h, Fife-decoded words and their variants)
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

from .config import get_config
from .errors import LimitExceeded, SpecSyntaxError
from .performance import check_symbol_budget

logger = logging.getLogger(__name__)

_BITS_RE = re.compile(r'^[01]*$')


class FiniteWord:
    """Immutable binary word stored 8 symbols per byte.

    Padding bits in the last byte are always zero, so byte equality of the
    packed buffers is word equality for equal lengths.
    """

    __slots__ = ('_packed', '_length')

    def __init__(self, symbols: Union[str, Iterable[int], np.ndarray] = ()):
        if isinstance(symbols, str):
            if not _BITS_RE.match(symbols):
                raise SpecSyntaxError(f"binary word may contain only 0 and 1: {symbols!r}")
            bits = np.frombuffer(symbols.encode('ascii'), dtype=np.uint8) - ord('0') \
                if symbols else np.zeros(0, dtype=np.uint8)
        else:
            bits = np.asarray(list(symbols) if not isinstance(symbols, np.ndarray) else symbols,
                              dtype=np.int64)
            if bits.size and (bits.min() < 0 or bits.max() > 1):
                raise SpecSyntaxError("binary word symbols must be 0 or 1")
            bits = bits.astype(np.uint8, copy=False)
        self._length = int(bits.size)
        self._packed = np.packbits(bits)
        self._packed.setflags(write=False)

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "FiniteWord":
        """Wrap a 0/1 uint8 array without validation"""
        word = cls.__new__(cls)
        word._length = int(bits.size)
        word._packed = np.packbits(bits.astype(np.uint8, copy=False))
        word._packed.setflags(write=False)
        return word

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def bits(self) -> np.ndarray:
        """Unpacked symbols as a fresh uint8 array"""
        return np.unpackbits(self._packed, count=self._length)

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, key):
        if isinstance(key, slice):
            return FiniteWord.from_bits(self.bits[key])
        n = self._length
        if key < 0:
            key += n
        if not 0 <= key < n:
            raise IndexError("word index out of range")
        return int((self._packed[key >> 3] >> (7 - (key & 7))) & 1)

    def slice(self, m: int, n: int) -> "FiniteWord":
        """The factor w[m..n], both ends inclusive"""
        if m < 0 or n >= self._length or n < m - 1:
            raise IndexError(f"slice [{m}..{n}] outside word of length {self._length}")
        return FiniteWord.from_bits(self.bits[m:n + 1])

    def complement(self) -> "FiniteWord":
        word = FiniteWord.__new__(FiniteWord)
        word._length = self._length
        packed = np.invert(self._packed)
        spare = (-self._length) % 8
        if spare:
            packed[-1] &= (0xFF << spare) & 0xFF
        packed.setflags(write=False)
        word._packed = packed
        return word

    def __invert__(self) -> "FiniteWord":
        return self.complement()

    def __add__(self, other: "FiniteWord") -> "FiniteWord":
        return FiniteWord.from_bits(np.concatenate([self.bits, other.bits]))

    def __eq__(self, other) -> bool:
        if isinstance(other, str):
            return str(self) == other
        if not isinstance(other, FiniteWord):
            return NotImplemented
        return self._length == other._length and np.array_equal(self._packed, other._packed)

    def __hash__(self) -> int:
        return hash((self._length, self._packed.tobytes()))

    def __str__(self) -> str:
        return (self.bits + ord('0')).tobytes().decode('ascii')

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 40:
            text = text[:37] + "..."
        return f"FiniteWord('{text}', length={self._length})"


Word = Union[FiniteWord, str]


def as_word(w: Word) -> FiniteWord:
    return w if isinstance(w, FiniteWord) else FiniteWord(w)


# Bit tricks on index arrays

def parity_u64(x: np.ndarray) -> np.ndarray:
    """Parity of the number of 1-bits of each entry"""
    x = x.astype(np.uint64, copy=True)
    for s in (32, 16, 8, 4, 2, 1):
        x ^= x >> np.uint64(s)
    return (x & np.uint64(1)).astype(np.uint8)


def bit_length_u64(x: np.ndarray) -> np.ndarray:
    """Binary length of each entry; 0 has length 0"""
    x = x.astype(np.uint64, copy=True)
    n = np.zeros(x.shape, dtype=np.int64)
    for s in (32, 16, 8, 4, 2, 1):
        hi = x >> np.uint64(s)
        moved = hi != 0
        n[moved] += s
        x = np.where(moved, hi, x)
    n += (x != 0)
    return n


def thue_morse_bits(start: int, count: int) -> np.ndarray:
    """t[start .. start+count-1] as a uint8 array"""
    return parity_u64(np.arange(start, start + count, dtype=np.uint64))


def h_bits(start: int, count: int) -> np.ndarray:
    """h[start .. start+count-1]: parity of the 0-bits of each index"""
    idx = np.arange(start, start + count, dtype=np.uint64)
    return parity_u64(idx) ^ (bit_length_u64(idx) & 1).astype(np.uint8)


# Operations on finite words

def mu(w: Word) -> FiniteWord:
    """Thue-Morse morphism 0 -> 01, 1 -> 10"""
    bits = as_word(w).bits
    out = np.empty(2 * bits.size, dtype=np.uint8)
    out[0::2] = bits
    out[1::2] = 1 - bits
    return FiniteWord.from_bits(out)


def mu_power(w: Word, k: int) -> FiniteWord:
    """μ applied k times; kept as the morphism-based cross-check of t_n"""
    word = as_word(w)
    check_symbol_budget(len(word) << k, "mu_power")
    for _ in range(k):
        word = mu(word)
    return word


def thue_morse_prefix(n: int) -> FiniteWord:
    check_symbol_budget(n, "thue_morse_prefix")
    return FiniteWord.from_bits(thue_morse_bits(0, n))


def h_prefix(n: int) -> FiniteWord:
    check_symbol_budget(n, "h_prefix")
    return FiniteWord.from_bits(h_bits(0, n))


def t_n(n: int) -> FiniteWord:
    """t_n = μ^n(0), of length 2^n"""
    cap = get_config().t_n_max
    if n < 0:
        raise ValueError("t_n needs n >= 0")
    if n > cap:
        raise LimitExceeded("t_n", n, cap)
    return thue_morse_prefix(1 << n)


def t_n_bar(n: int) -> FiniteWord:
    return t_n(n).complement()


def complement(w: Word) -> FiniteWord:
    return as_word(w).complement()


# Infinite words

class WordSpec:
    """Symbolic infinite binary word with random-access evaluation"""

    def bits(self, start: int, count: int) -> np.ndarray:
        raise NotImplementedError

    def prefix(self, n: int) -> FiniteWord:
        return eval_spec(self, 0, n)


@dataclass(frozen=True)
class ThueMorse(WordSpec):
    def bits(self, start: int, count: int) -> np.ndarray:
        return thue_morse_bits(start, count)

    def __str__(self) -> str:
        return "t"


@dataclass(frozen=True)
class HWord(WordSpec):
    def bits(self, start: int, count: int) -> np.ndarray:
        return h_bits(start, count)

    def __str__(self) -> str:
        return "h"


@dataclass(frozen=True)
class Fife(WordSpec):
    """FBE of an eventually periodic Fife path"""
    path: "object"  # fife.FifePath; typed loosely to avoid the import cycle

    def bits(self, start: int, count: int) -> np.ndarray:
        from .fife import fbe_bits
        return fbe_bits(self.path, start, count)

    def __str__(self) -> str:
        return f"fife:{self.path}"


@dataclass(frozen=True)
class Shift(WordSpec):
    inner: WordSpec
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("shift must be nonnegative")

    def bits(self, start: int, count: int) -> np.ndarray:
        return self.inner.bits(start + self.k, count)

    def __str__(self) -> str:
        return f"{self.inner}>>{self.k}"


@dataclass(frozen=True)
class Complement(WordSpec):
    inner: WordSpec

    def bits(self, start: int, count: int) -> np.ndarray:
        return 1 - self.inner.bits(start, count)

    def __str__(self) -> str:
        return f"~{self.inner}"


@dataclass(frozen=True)
class Prepend(WordSpec):
    """A finite word followed by an infinite one"""
    junk: FiniteWord
    inner: WordSpec

    def bits(self, start: int, count: int) -> np.ndarray:
        j = len(self.junk)
        out = np.empty(count, dtype=np.uint8)
        head = max(0, min(count, j - start))
        if head:
            out[:head] = self.junk.bits[start:start + head]
        if head < count:
            out[head:] = self.inner.bits(start + head - j, count - head)
        return out

    def __str__(self) -> str:
        return f"{self.junk}+{self.inner}"


@dataclass(frozen=True)
class Characteristic(WordSpec):
    """χ_A for a set A given by a membership predicate over indices.

    With vectorized=True the oracle receives an int64 index array and
    returns a boolean array.
    """
    oracle: Callable = field(compare=False)
    name: str = "A"
    vectorized: bool = False

    def bits(self, start: int, count: int) -> np.ndarray:
        if self.vectorized:
            idx = np.arange(start, start + count, dtype=np.int64)
            return np.asarray(self.oracle(idx), dtype=bool).astype(np.uint8)
        return np.fromiter((1 if self.oracle(i) else 0 for i in range(start, start + count)),
                           dtype=np.uint8, count=count)

    def __str__(self) -> str:
        return f"chi[{self.name}]"


def eval_spec(spec: WordSpec, start: int, count: int) -> FiniteWord:
    """The symbols of spec at positions start .. start+count-1"""
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    check_symbol_budget(count, f"eval {spec}")
    return FiniteWord.from_bits(spec.bits(start, count))


def parse_spec(text: str) -> WordSpec:
    """Parse `t`, `~t`, `h`, `~h`, `t>>k`, `fife:<path>` and `<bits>+<spec>`"""
    s = text.strip()
    if not s:
        raise SpecSyntaxError("empty word spec")
    if s.startswith('~'):
        return Complement(parse_spec(s[1:]))
    m = re.match(r'^([01]*)\+(.+)$', s)
    if m:
        return Prepend(FiniteWord(m.group(1)), parse_spec(m.group(2)))
    if '>>' in s:
        inner, _, k = s.rpartition('>>')
        if not k.strip().isdigit():
            raise SpecSyntaxError(f"bad shift amount in {text!r}")
        return Shift(parse_spec(inner), int(k))
    if s == 't':
        return ThueMorse()
    if s == 'h':
        return HWord()
    if s.startswith('fife:'):
        from .fife import FifePath
        return Fife(FifePath.parse(s[5:]))
    raise SpecSyntaxError(f"unknown word spec {text!r}")


def is_bit_string(text: str) -> bool:
    return bool(text) and bool(_BITS_RE.match(text))


__all__ = [
    'FiniteWord', 'WordSpec', 'ThueMorse', 'HWord', 'Fife', 'Shift', 'Complement',
    'Prepend', 'Characteristic', 'mu', 'mu_power', 'thue_morse_prefix', 'h_prefix',
    't_n', 't_n_bar', 'complement', 'eval_spec', 'parse_spec', 'thue_morse_bits',
    'h_bits', 'as_word', 'is_bit_string',
]
