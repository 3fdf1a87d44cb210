#!/usr/bin/env python3
"""
Fife automaton over Σ5 = {0,1,2,3,4}, eventually periodic paths, the
Fife-to-binary encoding FBE, path validation, enumeration and classification

A path x decodes to FBE(x) = c(x[0]) μ(c(x[1])) μ²(c(x[2])) ...; a path
ending in 0^ω carries a tail letter a and decodes to FBE(prefix) μ^ω(a).
"""
import enum
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from .config import get_config
from .errors import InvalidPath, LimitExceeded, MissingTailLetter, SpecSyntaxError
from .performance import check_symbol_budget
from .words import FiniteWord, thue_morse_bits

logger = logging.getLogger(__name__)

SIGMA5 = "01234"

# c(letter) as (symbol, repeat count)
LETTER_CODES: Dict[str, Tuple[int, int]] = {
    "0": (0, 0),
    "1": (0, 1),
    "2": (0, 2),
    "3": (1, 1),
    "4": (1, 2),
}

# 1<->3 and 2<->4 complement the decoded word
COMPLEMENT_LETTERS = str.maketrans("1234", "3412")


def c(letter) -> FiniteWord:
    """c(0)=ε, c(1)=0, c(2)=00, c(3)=1, c(4)=11"""
    symbol, count = LETTER_CODES[str(letter)]
    return FiniteWord([symbol] * count)


def decoded_length(letters: str) -> int:
    """Σ_k 2^k |c(x[k])| for a finite Σ5 word"""
    return sum(LETTER_CODES[ch][1] << k for k, ch in enumerate(letters))


# Paths

_PATH_RE = re.compile(r'^([0-4]*)\(([0-4]+)\)(?:@([01]))?$')
_POWER_RE = re.compile(r'([0-4])\^(\d+)')


@dataclass(frozen=True, eq=False)
class FifePath:
    """Eventually periodic Σ5 word prefix·period^ω, with a tail letter when period is 0"""
    prefix: str
    period: str
    tail: Optional[int] = None

    def __post_init__(self):
        if not self.period:
            raise SpecSyntaxError("path period must be nonempty")
        for part in (self.prefix, self.period):
            if any(ch not in SIGMA5 for ch in part):
                raise SpecSyntaxError(f"path letters must be in {{0,...,4}}: {part!r}")
        if set(self.period) == {"0"}:
            object.__setattr__(self, "period", "0")
            if self.tail is None:
                raise MissingTailLetter(f"path {self.prefix}({self.period}) ends in 0^ω "
                                        f"and needs a tail letter @0 or @1")
            if self.tail not in (0, 1):
                raise SpecSyntaxError("tail letter must be 0 or 1")
        elif self.tail is not None:
            raise SpecSyntaxError("a tail letter is only allowed when the period is 0")

    @classmethod
    def parse(cls, text: str) -> "FifePath":
        """Parse PREFIX(PERIOD)[@BIT]; `0^n` style powers are expanded and
        whitespace is dropped afterwards, so "0^3 1(0)@0" is 0001(0)@0"""
        s = _POWER_RE.sub(lambda m: m.group(1) * int(m.group(2)), text.strip())
        s = re.sub(r'\s+', '', s)
        m = _PATH_RE.match(s)
        if not m:
            raise SpecSyntaxError(f"not a Fife path (expected PREFIX(PERIOD)[@BIT]): {text!r}")
        tail = int(m.group(3)) if m.group(3) is not None else None
        return cls(m.group(1), m.group(2), tail)

    @property
    def ends_in_zeros(self) -> bool:
        return self.period == "0"

    def letter(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def unrolled(self, n: int) -> str:
        return "".join(self.letter(i) for i in range(n))

    def canonical(self) -> Tuple[str, str, Optional[int]]:
        """Shortest prefix and primitive period describing the same stream"""
        period = self.period
        for d in range(1, len(period) + 1):
            if len(period) % d == 0 and period[:d] * (len(period) // d) == period:
                period = period[:d]
                break
        prefix = self.prefix
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1] + period[:-1]
        return prefix, period, self.tail

    def complement(self) -> "FifePath":
        """The path whose decoding is the bitwise complement of this one's"""
        tail = None if self.tail is None else 1 - self.tail
        return FifePath(self.prefix.translate(COMPLEMENT_LETTERS),
                        self.period.translate(COMPLEMENT_LETTERS), tail)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FifePath):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __str__(self) -> str:
        text = f"{self.prefix}({self.period})"
        return text + (f"@{self.tail}" if self.tail is not None else "")


def complement_path(path: FifePath) -> FifePath:
    return path.complement()


# Decoding

def _write_block(out: np.ndarray, pos: int, depth: int, letter: str, tm: np.ndarray) -> int:
    """Write μ^depth(c(letter)) at out[pos:], truncated to out's size; return the new position"""
    symbol, count = LETTER_CODES[letter]
    size = 1 << depth
    cap = out.size
    for _ in range(count):
        if pos >= cap:
            return pos + size
        m = min(size, cap - pos)
        out[pos:pos + m] = tm[:m] ^ symbol
        pos += size
    return pos


def fbe_decode(path: FifePath, n: int) -> FiniteWord:
    """First n symbols of FBE(path)"""
    if n <= 0:
        raise ValueError("decode length must be positive")
    return FiniteWord.from_bits(fbe_bits(path, 0, n))


def fbe_bits(path: FifePath, start: int, count: int) -> np.ndarray:
    """FBE(path)[start .. start+count-1] as a uint8 array.

    Only the blocks meeting the requested range are generated, so the cost
    depends on count and not on start.
    """
    if path.ends_in_zeros and path.tail is None:
        raise MissingTailLetter(f"path {path} needs a tail letter")
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    check_symbol_budget(count, f"decode {path}")
    end = start + count
    out = np.empty(count, dtype=np.uint8)
    pos = 0
    k = 0
    letters = len(path.prefix) if path.ends_in_zeros else None
    while pos < end and (letters is None or k < letters):
        symbol, copies = LETTER_CODES[path.letter(k)]
        size = 1 << k
        for _ in range(copies):
            lo, hi = max(pos, start), min(pos + size, end)
            if lo < hi:
                out[lo - start:hi - start] = thue_morse_bits(lo - pos, hi - lo) ^ np.uint8(symbol)
            pos += size
        k += 1
    if path.ends_in_zeros and pos < end:
        lo = max(pos, start)
        out[lo - start:] = thue_morse_bits(lo - pos, end - lo) ^ np.uint8(path.tail)
    return out


# Automaton

class CaseTag(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"

    def __str__(self) -> str:
        return self.value


class FifeAutomaton:
    """Deterministic automaton whose infinite paths from `start` encode the
    overlap-free infinite binary words.

    tail_sets maps each 0-labelled cycle (as a frozenset of states) to the
    tail letters allowed for paths that end circling it.
    """

    def __init__(self, states: Tuple[str, ...], start: str,
                 transitions: Dict[Tuple[str, str], str],
                 tail_sets: Dict[FrozenSet[str], FrozenSet[int]]):
        self.states = tuple(states)
        self.start = start
        self.transitions = dict(transitions)
        self.tail_sets = dict(tail_sets)
        self._check()

    def _check(self):
        known = set(self.states)
        if self.start not in known:
            raise ValueError(f"start state {self.start} is not a state")
        for (state, letter), target in self.transitions.items():
            if state not in known or target not in known:
                raise ValueError(f"transition {state} -{letter}-> {target} uses an unknown state")
            if letter not in SIGMA5:
                raise ValueError(f"transition label {letter!r} is not in Σ5")
        for cycle in self.tail_sets:
            if self.zero_cycle(next(iter(cycle))) != cycle:
                raise ValueError(f"tail set key {sorted(cycle)} is not a 0-labelled cycle")

    def step(self, state: Optional[str], letter: str) -> Optional[str]:
        if state is None:
            return None
        return self.transitions.get((state, letter))

    def run(self, letters: str, state: Optional[str] = None) -> Optional[str]:
        """End state after reading letters, None if a transition is missing"""
        state = self.start if state is None else state
        for letter in letters:
            state = self.transitions.get((state, letter))
            if state is None:
                return None
        return state

    def out_letters(self, state: str) -> List[str]:
        return [letter for letter in SIGMA5 if (state, letter) in self.transitions]

    def zero_cycle(self, state: str) -> Optional[FrozenSet[str]]:
        """States of the 0-cycle reached by reading 0^ω from state, None if 0^ω dies"""
        seen: List[str] = []
        while state is not None and state not in seen:
            seen.append(state)
            state = self.transitions.get((state, "0"))
        if state is None:
            return None
        return frozenset(seen[seen.index(state):])

    def tail_letters(self, state: str) -> FrozenSet[int]:
        """Tail letters a for which (0^ω, a) is a valid continuation from state"""
        cycle = self.zero_cycle(state)
        if cycle is None:
            return frozenset()
        return self.tail_sets.get(cycle, frozenset())

    def zero_closure(self, state: str) -> List[str]:
        """States reachable from state by reading 0s, in reading order"""
        seen: List[str] = []
        while state is not None and state not in seen:
            seen.append(state)
            state = self.transitions.get((state, "0"))
        return seen

    def with_transition(self, state: str, letter: str, target: str) -> "FifeAutomaton":
        """Copy with one transition added or replaced"""
        transitions = dict(self.transitions)
        transitions[(state, letter)] = target
        return FifeAutomaton(self.states, self.start, transitions, self.tail_sets)

    def __repr__(self) -> str:
        return f"FifeAutomaton({len(self.states)} states, {len(self.transitions)} transitions)"


# State meanings, as constraints on the word still to be decoded:
#   A: none           B: starts with a square uu, u ending in 1
#   D: starts with uu, u ending in 0
#   C: B, or starts with 0, or starts with 100
#   E: D, or starts with 1, or starts with 011
#   F: D, or starts with 0, or starts with 10
#   I: none of the words F allows
#   G: D or starts with 0     H: B or starts with 0
#   J: B or starts with 1     K: D or starts with 1
FIFE_TRANSITIONS: Dict[Tuple[str, str], str] = {
    ("A", "0"): "A", ("A", "1"): "B", ("A", "2"): "C", ("A", "3"): "D", ("A", "4"): "E",
    ("B", "0"): "D", ("B", "1"): "B", ("B", "3"): "E",
    ("D", "0"): "B", ("D", "3"): "D", ("D", "1"): "C",
    ("C", "0"): "F", ("C", "3"): "E",
    ("E", "0"): "I", ("E", "1"): "C",
    ("F", "3"): "G",
    ("I", "1"): "J",
    ("G", "0"): "H", ("G", "3"): "D",
    ("H", "0"): "G", ("H", "3"): "E",
    ("J", "0"): "K", ("J", "1"): "B",
    ("K", "0"): "J", ("K", "1"): "C",
}

FIFE_TAIL_SETS: Dict[FrozenSet[str], FrozenSet[int]] = {
    frozenset({"A"}): frozenset({0, 1}),
    frozenset({"B", "D"}): frozenset({0, 1}),
    frozenset({"G", "H"}): frozenset({1}),
    frozenset({"J", "K"}): frozenset({0}),
}


def build_automaton() -> FifeAutomaton:
    return FifeAutomaton(tuple("ABCDEFGHIJK"), "A", FIFE_TRANSITIONS, FIFE_TAIL_SETS)


@lru_cache(maxsize=1)
def default_automaton() -> FifeAutomaton:
    return build_automaton()


def validate_path(aut: FifeAutomaton, path: FifePath) -> bool:
    """True iff the path can be read forever (with an admissible tail letter)"""
    state = aut.run(path.prefix)
    if state is None:
        return False
    if path.ends_in_zeros:
        return path.tail in aut.tail_letters(state)
    seen = set()
    pos = 0
    while (state, pos) not in seen:
        seen.add((state, pos))
        state = aut.step(state, path.period[pos])
        if state is None:
            return False
        pos = (pos + 1) % len(path.period)
    return True


def classify_path(path: FifePath, aut: Optional[FifeAutomaton] = None) -> CaseTag:
    """The four-way split used for the 1/4-3/4 bounds"""
    aut = aut or default_automaton()
    if not validate_path(aut, path):
        raise InvalidPath(f"path {path} is not accepted by the automaton")
    if path.ends_in_zeros:
        return CaseTag.CASE1
    n = 0
    while path.letter(n) == "0":
        n += 1
    first = path.letter(n)
    if first in "13":
        return CaseTag.CASE4
    if "0" in path.period or path.prefix.count("0") > n:
        return CaseTag.CASE3
    return CaseTag.CASE2


# Enumeration

class PathNode(NamedTuple):
    letters: str
    state: str
    length: int

    @property
    def depth(self) -> int:
        return len(self.letters)


class PathWalker:
    """Depth-first walk over automaton-valid finite paths, decoding into one
    shared buffer.

    A yielded node's decoded word is buffer[:min(node.length, length_cap)];
    it is only valid until the walk resumes.
    """

    def __init__(self, aut: FifeAutomaton, length_cap: int = 0):
        self.aut = aut
        self.length_cap = length_cap
        self.buffer = np.zeros(length_cap, dtype=np.uint8)
        self._tm = thue_morse_bits(0, length_cap)

    def decoded(self, node: PathNode) -> np.ndarray:
        return self.buffer[:min(node.length, self.length_cap)]

    def walk(self, max_depth: int, root: str = "",
             expand: Optional[Callable[[PathNode], bool]] = None) -> Iterator[PathNode]:
        """Preorder walk of the subtree under `root`, children in letter order"""
        state = self.aut.run(root)
        if state is None:
            raise InvalidPath(f"{root!r} is not a valid path prefix")
        pos = 0
        for k, letter in enumerate(root):
            pos = _write_block(self.buffer, pos, k, letter, self._tm)
        stack = [(PathNode(root, state, pos), pos)]
        while stack:
            node, parent_length = stack.pop()
            if node.letters != root:
                _write_block(self.buffer, parent_length, node.depth - 1, node.letters[-1], self._tm)
            yield node
            if node.depth >= max_depth:
                continue
            if expand is not None and not expand(node):
                continue
            d = node.depth
            for letter in reversed(self.aut.out_letters(node.state)):
                child_length = node.length + (LETTER_CODES[letter][1] << d)
                stack.append((PathNode(node.letters + letter,
                                       self.aut.transitions[(node.state, letter)],
                                       child_length), node.length))


def iter_paths(aut: FifeAutomaton, depth: int) -> Iterator[PathNode]:
    """All valid Σ5 words of exactly `depth` letters, in lexicographic order"""
    cap = get_config().depth_cap
    if depth > cap:
        raise LimitExceeded("enumeration depth", depth, cap)
    if depth <= 0:
        raise ValueError("depth must be positive")
    for node in PathWalker(aut).walk(depth):
        if node.depth == depth:
            yield node


def enumerate_paths(aut: FifeAutomaton, depth: int) -> List[PathNode]:
    paths = list(iter_paths(aut, depth))
    logger.info(f"Enumerated {len(paths)} valid paths of depth {depth}")
    return paths


# Generalized families

class FamilyMatcher:
    """Deterministic automaton over Σ5 plus a set of states allowed to recur
    forever; a path matches when its periodic part only cycles through those
    states."""

    def __init__(self, name: str, pattern: str, start: str,
                 transitions: Dict[Tuple[str, str], str], recurring: FrozenSet[str]):
        self.name = name
        self.pattern = pattern
        self.start = start
        self.transitions = transitions
        self.recurring = recurring

    def accepts(self, path: FifePath) -> bool:
        state = self.start
        for letter in path.prefix:
            state = self.transitions.get((state, letter))
            if state is None:
                return False
        order: List[Tuple[str, int]] = []
        index: Dict[Tuple[str, int], int] = {}
        pos = 0
        while (state, pos) not in index:
            index[(state, pos)] = len(order)
            order.append((state, pos))
            state = self.transitions.get((state, path.period[pos]))
            if state is None:
                return False
            pos = (pos + 1) % len(path.period)
        loop = order[index[(state, pos)]:]
        return all(s in self.recurring for s, _ in loop)


def _edges(pairs: Dict[str, Dict[str, str]]) -> Dict[Tuple[str, str], str]:
    return {(state, letter): target
            for state, row in pairs.items()
            for letters, target in row.items()
            for letter in letters}


GENERALIZED_FAMILIES: Tuple[FamilyMatcher, ...] = (
    # zero-tail takes leading 0s: any nonzero letter followed by 0^ω matches
    FamilyMatcher(
        "zero-tail", "0*{1,2,3,4}Σ5*0^ω", "s",
        _edges({"s": {"0": "s", "1234": "n"}, "n": {"1234": "n", "0": "z"}, "z": {"0": "z", "1234": "n"}}),
        frozenset({"z"})),
    FamilyMatcher(
        "edge-words", "0*{2(31)^ω, 4(13)^ω}", "s",
        _edges({"s": {"0": "s", "2": "a", "4": "b"},
                "a": {"3": "a3"}, "a3": {"1": "a"},
                "b": {"1": "b1"}, "b1": {"3": "b"}}),
        frozenset({"a", "a3", "b", "b1"})),
    FamilyMatcher(
        "edge-then-zero", "0*{2(31)*{ε,3}, 4(13)*{ε,1}}0{1,3}{0,1,3}^ω", "s",
        _edges({"s": {"0": "s", "2": "a", "4": "b"},
                "a": {"3": "a3", "0": "z"}, "a3": {"1": "a", "0": "z"},
                "b": {"1": "b1", "0": "z"}, "b1": {"3": "b", "0": "z"},
                "z": {"13": "r"}, "r": {"013": "r"}}),
        frozenset({"r"})),
    FamilyMatcher(
        "two-odd-letters", "(0*{1,3})^2{0,1,3}^ω", "u0",
        _edges({"u0": {"0": "u0", "13": "u1"}, "u1": {"0": "u1", "13": "u2"},
                "u2": {"013": "u2"}}),
        frozenset({"u2"})),
)


def matching_families(path: FifePath) -> List[str]:
    return [family.name for family in GENERALIZED_FAMILIES if family.accepts(path)]


def in_generalized_family(path: FifePath) -> bool:
    return any(family.accepts(path) for family in GENERALIZED_FAMILIES)


__all__ = [
    'c', 'decoded_length', 'FifePath', 'complement_path', 'fbe_decode', 'fbe_bits',
    'CaseTag', 'FifeAutomaton', 'build_automaton', 'default_automaton', 'validate_path',
    'classify_path', 'PathNode', 'PathWalker', 'iter_paths', 'enumerate_paths',
    'FamilyMatcher', 'GENERALIZED_FAMILIES', 'matching_families', 'in_generalized_family',
    'LETTER_CODES', 'SIGMA5',
]
