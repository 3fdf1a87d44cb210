#!/usr/bin/env python3
"""
Finite-scale verification: exhaustive checks of the technical window lemma,
the h-word and edge-word identities, σ bounds, the tightness witnesses, the
Fife automaton cross-check, and the bounded sweep over Fife paths
"""
import enum
import hashlib
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import wraps
from typing import Any, Dict, Iterator, List, Optional, TextIO, Tuple

import numpy as np
from scipy import signal

from .config import get_config, set_config
from .errors import LimitExceeded
from .fife import (
    LETTER_CODES, SIGMA5, CaseTag, FifeAutomaton, FifePath, GENERALIZED_FAMILIES, PathNode,
    PathWalker, complement_path, default_automaton, fbe_bits, matching_families, validate_path,
)
from .mahler import SIGMA_BOUND, empirical_sigma_table, sigma_table
from .performance import check_symbol_budget, metrics, performance_tracker
from .powerfree import find_overlap_bits, iter_power_free_words
from .similarity import estimate_lsd_usd, exact_argmax, exact_argmin
from .words import Fife, HWord, ThueMorse, h_bits, thue_morse_bits

logger = logging.getLogger(__name__)

ONE_THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)
SWEEP_HEADER = "path,case,sd_num,sd_den,tail_min_float,tail_max_float"

# empirical regression window for the sweep (not a theorem)
SWEEP_SLACK = Fraction(1, 20)

# preorder depth at which the sweep hands subtrees to workers
SPLIT_DEPTH = 2
BATCH_ROWS = 512

LEMMA_MAX_N = 16
COROLLARY_MAX_N = 14
PROP_EDGE_MAX_N = 10
AUTOMATON_MAX_DEPTH = 16


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self) -> str:
        return self.value


EXIT_CODES = {Verdict.PASS: 0, Verdict.FAIL: 1, Verdict.INCONCLUSIVE: 3}


def _plain(value: Any) -> Any:
    """JSON-friendly copy: fractions as 'p/q', enums by value"""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    return value


@dataclass
class VerificationReport:
    """Outcome of one check; FAIL reports carry a reproducible counter-instance"""
    check_name: str
    parameters: Dict[str, Any]
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)
    elapsed_s: float = 0.0
    counter_instance: Optional[Dict[str, Any]] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'check_name': self.check_name,
            'parameters': _plain(self.parameters),
            'verdict': self.verdict.value,
            'evidence': _plain(self.evidence),
            'elapsed_s': round(self.elapsed_s, 3),
            'counter_instance': _plain(self.counter_instance),
        }

    def print_report(self, out: Optional[TextIO] = None):
        """Print the report in banner style"""
        out = out or sys.stdout
        print("\n" + "=" * 60, file=out)
        print(f"CHECK: {self.check_name}", file=out)
        print("=" * 60, file=out)
        print(f"  verdict: {self.verdict}", file=out)
        print(f"  elapsed_s: {self.elapsed_s:.2f}", file=out)
        sections = [("PARAMETERS", self.parameters), ("EVIDENCE", self.evidence)]
        if self.counter_instance:
            sections.append(("COUNTER-INSTANCE", self.counter_instance))
        for title, values in sections:
            print(f"\n{title}:", file=out)
            print("-" * 30, file=out)
            for key, value in _plain(values).items():
                print(f"  {key}: {value}", file=out)


def save_reports(reports: List[VerificationReport], filename: str,
                 timings: Optional[Dict[str, Any]] = None):
    """Save reports, and optionally the tracker statistics, to a JSON file"""
    data: Dict[str, Any] = {'reports': [r.to_dict() for r in reports]}
    if timings is not None:
        data['timings'] = timings
    with open(filename, 'w') as f:
        json.dump(data, f, indent=2)
    logger.info(f"Reports saved to {filename}")


def overall_verdict(reports: List[VerificationReport]) -> Verdict:
    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


def verification_check(name: str):
    """Time a check through the performance tracker and stamp the report"""
    def decorator(func):
        tracked = performance_tracker(f"verify.{name}")(func)

        @wraps(func)
        def wrapper(*args, **kwargs):
            logger.info(f"Running check {name}")
            report = tracked(*args, **kwargs)
            report.elapsed_s = metrics.last(f"verify.{name}") / 1000
            log = logger.info if report.verdict is Verdict.PASS else logger.warning
            log(f"Check {name}: {report.verdict} in {report.elapsed_s:.2f}s")
            return report
        return wrapper
    return decorator


def _verdict(counter: Optional[Dict[str, Any]]) -> Verdict:
    return Verdict.FAIL if counter else Verdict.PASS


def _window_matches(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """matches(x, y[i .. i+|x|-1]) for every window start i inside y"""
    sx = 1 - 2 * x.astype(np.int64)
    sy = 1 - 2 * y.astype(np.int64)
    corr = signal.correlate(sy, sx, mode="valid", method="direct")
    return (x.size + corr) // 2


# Technical window lemma

# (name, complement x, second word, complement y, value at i = 2^(n-1))
LEMMA_CASES: Tuple[Tuple[str, bool, str, bool, Fraction], ...] = (
    ("a", False, "next", False, Fraction(1, 2)),
    ("a~x", True, "next", False, Fraction(1, 2)),
    ("a~y", False, "next", True, Fraction(1, 2)),
    ("a~xy", True, "next", True, Fraction(1, 2)),
    ("b", False, "square", False, Fraction(0)),
    ("b~x", True, "square", False, Fraction(1)),
    ("b~y", False, "square", True, Fraction(1)),
    ("b~xy", True, "square", True, Fraction(0)),
)


class _Extremes:
    """Running exact min/max of m/size values with the instance that attains them"""

    def __init__(self):
        self.low: Optional[Fraction] = None
        self.high: Optional[Fraction] = None
        self.low_at: Optional[Dict[str, Any]] = None
        self.high_at: Optional[Dict[str, Any]] = None

    def update(self, m: np.ndarray, size: int, positions: np.ndarray, **where):
        if m.size == 0:
            return
        i, j = int(np.argmin(m)), int(np.argmax(m))
        lo, hi = Fraction(int(m[i]), size), Fraction(int(m[j]), size)
        if self.low is None or lo < self.low:
            self.low, self.low_at = lo, dict(where, i=int(positions[i]))
        if self.high is None or hi > self.high:
            self.high, self.high_at = hi, dict(where, i=int(positions[j]))

    def as_evidence(self) -> Dict[str, Any]:
        return {'min_value': self.low, 'min_at': self.low_at,
                'max_value': self.high, 'max_at': self.high_at}


@verification_check("lemma")
def verify_lemma_technical(n_max: int = 12) -> VerificationReport:
    """All eight window cases for every n <= n_max and i in [1, 2^n - 1]"""
    if n_max > LEMMA_MAX_N:
        raise LimitExceeded("lemma n_max", n_max, LEMMA_MAX_N)
    check_symbol_budget(1 << (n_max + 1), "verify_lemma_technical")
    counter = None
    instances = 0
    extremes = _Extremes()
    for n in range(1, n_max + 1):
        size = 1 << n
        half = size >> 1
        tn = thue_morse_bits(0, size)
        tn1 = thue_morse_bits(0, 2 * size)
        positions = np.arange(1, size)
        regular = positions != half
        for name, flip_x, kind, flip_y, special in LEMMA_CASES:
            x = tn ^ np.uint8(flip_x)
            y = (tn1 if kind == "next" else np.concatenate([tn, tn])) ^ np.uint8(flip_y)
            m = _window_matches(x, y)[1:size]
            instances += m.size
            at_half = Fraction(int(m[half - 1]), size)
            if at_half != special:
                counter = {'case': name, 'n': n, 'i': half, 'value': at_half, 'expected': special}
                break
            outside = np.flatnonzero(regular & ((4 * m < size) | (4 * m > 3 * size)))
            if outside.size:
                i = int(positions[outside[0]])
                counter = {'case': name, 'n': n, 'i': i,
                           'value': Fraction(int(m[i - 1]), size), 'expected': "[1/4, 3/4]"}
                break
            extremes.update(m[regular], size, positions[regular], case=name, n=n)
        if counter:
            break
    evidence = {'instances': instances, 'cases': len(LEMMA_CASES)}
    evidence.update(extremes.as_evidence())
    return VerificationReport("lemma", {'n_max': n_max}, _verdict(counter), evidence,
                              counter_instance=counter)


@verification_check("cor")
def verify_cor_technical_finite(n_max: int = 12) -> VerificationReport:
    """SD(x, (y0 y1)[i..i+2^n-1]) in [1/4, 3/4] whenever gcd(i, 2^n) <= 2^(n-2)"""
    if n_max > COROLLARY_MAX_N:
        raise LimitExceeded("corollary n_max", n_max, COROLLARY_MAX_N)
    check_symbol_budget(1 << (n_max + 1), "verify_cor_technical_finite")
    counter = None
    instances = 0
    extremes = _Extremes()
    # n < 2 admits no i
    for n in range(2, n_max + 1):
        size = 1 << n
        tn = thue_morse_bits(0, size)
        words = {'t': tn, '~t': tn ^ np.uint8(1)}
        positions = np.arange(size)
        admissible = positions % (size >> 1) != 0
        for xn, x in words.items():
            for y0n, y0 in words.items():
                for y1n, y1 in words.items():
                    m = _window_matches(x, np.concatenate([y0, y1]))[:size]
                    m = m[admissible]
                    instances += m.size
                    combo = f"({xn},{y0n}{y1n})"
                    outside = np.flatnonzero((4 * m < size) | (4 * m > 3 * size))
                    if outside.size:
                        i = int(positions[admissible][outside[0]])
                        counter = {'words': combo, 'n': n, 'i': i,
                                   'value': Fraction(int(m[outside[0]]), size)}
                        break
                    extremes.update(m, size, positions[admissible], words=combo, n=n)
                if counter:
                    break
            if counter:
                break
        if counter:
            break
    evidence = {'instances': instances}
    evidence.update(extremes.as_evidence())
    return VerificationReport("cor", {'n_max': n_max}, _verdict(counter), evidence,
                              counter_instance=counter)


@verification_check("tightness")
def verify_tightness(n_max: int = 10) -> VerificationReport:
    """SD(t_{n+2}, t_{n+3}[2^n .. 2^{n+2} + 2^n - 1]) = 1/4 exactly"""
    check_symbol_budget(1 << (n_max + 3), "verify_tightness")
    counter = None
    for n in range(n_max + 1):
        x = thue_morse_bits(0, 1 << (n + 2))
        y = thue_morse_bits(1 << n, 1 << (n + 2))
        value = Fraction(int(np.count_nonzero(x == y)), x.size)
        if value != Fraction(1, 4):
            counter = {'n': n, 'value': value}
            break
    return VerificationReport("tightness", {'n_max': n_max}, _verdict(counter),
                              {'witnesses': n_max + 1 if counter is None else counter['n'],
                               'value': Fraction(1, 4)},
                              counter_instance=counter)


# The h word and the edge words

@verification_check("prop-h")
def verify_prop_h(k_max: int = 10, horizon: Optional[int] = None) -> VerificationReport:
    """Block identities, exact 2/3 and 1/3 values, monotone stretches and
    the estimator for (h, t)"""
    config = get_config()
    size = 1 << (2 * k_max + 1)
    check_symbol_budget(size, "verify_prop_h")
    eq = h_bits(0, size) == thue_morse_bits(0, size)
    running = np.cumsum(eq, dtype=np.int64)
    counter = None

    for n in range(2 * k_max + 1):
        block = eq[1 << n:1 << (n + 1)]
        # h = ~t on even blocks and h = t on odd ones
        expected = bool(n % 2)
        if not np.all(block == expected):
            counter = {'identity': 'block', 'n': n,
                       'first_index': int((1 << n) + np.flatnonzero(block != expected)[0])}
            break

    for n in range(1, k_max + 1):
        if counter:
            break
        b = (1 << (2 * n)) - 1
        high = Fraction(int(running[b] - running[0]), b)
        b = (1 << (2 * n + 1)) - 1
        low = Fraction(int(running[b] - running[1]), b - 1)
        if high != TWO_THIRDS:
            counter = {'identity': 'SD(h[1..4^n-1], t) = 2/3', 'n': n, 'value': high}
        elif low != ONE_THIRD:
            counter = {'identity': 'SD(h[2..2*4^n-1], t) = 1/3', 'n': n, 'value': low}

    # S(k) = SD(h[1..k], t[1..k]) = a_k / k with a_k = running[k] - running[0]
    for n in range(k_max):
        if counter:
            break
        for lo, hi, decreasing in (((1 << (2 * n)) - 1, (1 << (2 * n + 1)) - 1, True),
                                   ((1 << (2 * n + 1)) - 1, (1 << (2 * n + 2)) - 1, False)):
            k = np.arange(max(lo, 1), hi, dtype=np.int64)
            a_k = running[k] - running[0]
            a_next = running[k + 1] - running[0]
            # a_{k+1}/(k+1) vs a_k/k, cross-multiplied
            step = a_next * k - a_k * (k + 1)
            bad = np.flatnonzero(step > 0 if decreasing else step < 0)
            if bad.size:
                counter = {'identity': 'monotone', 'n': n, 'k': int(k[bad[0]]),
                           'direction': 'decreasing' if decreasing else 'increasing'}
                break

    evidence: Dict[str, Any] = {'blocks_checked': 2 * k_max + 1, 'exact_values_checked': 2 * k_max}
    if counter is None:
        horizon = horizon or config.default_horizon
        estimate = estimate_lsd_usd(HWord(), ThueMorse(), horizon)
        evidence.update(lsd_lower=estimate.lsd_lower, usd_upper=estimate.usd_upper,
                        horizon=horizon)
        tol = config.tolerance
        if abs(estimate.lsd_lower - ONE_THIRD) > tol or abs(estimate.usd_upper - TWO_THIRDS) > tol:
            counter = {'identity': 'estimator', 'horizon': horizon,
                       'lsd_lower': estimate.lsd_lower, 'usd_upper': estimate.usd_upper,
                       'tolerance': tol}
    return VerificationReport("prop-h", {'k_max': k_max}, _verdict(counter), evidence,
                              counter_instance=counter)


def edge_path(n: int, letter: str = "2") -> FifePath:
    """0^n 2 (31)^ω, or 0^n 4 (13)^ω for letter 4"""
    period = "31" if letter == "2" else "13"
    return FifePath("0" * n + letter, period)


@verification_check("prop-edge")
def verify_prop_edge(n_max: int = 4, identity_length: int = 1 << 14,
                     horizon_exponent: int = 16) -> VerificationReport:
    """FBE(0^n 2(31)^ω) agrees with h (n even) or ~h (n odd) from 2^n on, and
    its tail estimates sit within tolerance of 1/3 and 2/3"""
    if n_max > PROP_EDGE_MAX_N:
        raise LimitExceeded("edge n_max", n_max, PROP_EDGE_MAX_N)
    tol = get_config().tolerance
    counter = None
    estimates = {}
    for n in range(n_max + 1):
        path = edge_path(n)
        start = 1 << n
        decoded = fbe_bits(path, start, identity_length)
        reference = h_bits(start, identity_length) ^ np.uint8(n % 2)
        if not np.array_equal(decoded, reference):
            counter = {'path': str(path), 'identity': 'h' if n % 2 == 0 else '~h',
                       'first_index': int(start + np.flatnonzero(decoded != reference)[0])}
            break
        horizon = 1 << (n + horizon_exponent)
        estimate = estimate_lsd_usd(Fife(path), ThueMorse(), horizon)
        estimates[str(path)] = [estimate.lsd_lower, estimate.usd_upper]
        if abs(estimate.lsd_lower - ONE_THIRD) > tol or abs(estimate.usd_upper - TWO_THIRDS) > tol:
            counter = {'path': str(path), 'horizon': horizon, 'lsd_lower': estimate.lsd_lower,
                       'usd_upper': estimate.usd_upper, 'tolerance': tol}
            break
    return VerificationReport(
        "prop-edge",
        {'n_max': n_max, 'identity_length': identity_length, 'horizon_exponent': horizon_exponent},
        _verdict(counter), {'estimates': estimates}, counter_instance=counter)


@verification_check("duality")
def verify_complement_duality(n_max: int = 8, length: int = 1 << 14) -> VerificationReport:
    """FBE(0^n 4(13)^ω) is the complement of FBE(0^n 2(31)^ω), and the latter
    matches h or ~h from 2^n on"""
    counter = None
    for n in range(n_max + 1):
        p2, p4 = edge_path(n, "2"), edge_path(n, "4")
        if complement_path(p2) != p4:
            counter = {'n': n, 'identity': 'complement_path', 'path': str(p2)}
            break
        d2, d4 = fbe_bits(p2, 0, length), fbe_bits(p4, 0, length)
        if not np.array_equal(d4, 1 - d2):
            counter = {'n': n, 'identity': 'complement',
                       'first_index': int(np.flatnonzero(d4 == d2)[0])}
            break
        start = 1 << n
        if start < length:
            reference = h_bits(start, length - start) ^ np.uint8(n % 2)
            if not np.array_equal(d2[start:], reference):
                counter = {'n': n, 'identity': 'h' if n % 2 == 0 else '~h',
                           'first_index': int(start + np.flatnonzero(d2[start:] != reference)[0])}
                break
    return VerificationReport("duality", {'n_max': n_max, 'length': length}, _verdict(counter),
                              {'pairs_checked': n_max + 1 if counter is None else counter['n']},
                              counter_instance=counter)


# σ bounds

@verification_check("mahler")
def verify_mahler(k_max: int = 100_000, horizon: int = 1 << 20, empirical_k_max: int = 64,
                  shift_k_max: int = 10_000) -> VerificationReport:
    """|σ(k)| <= 1/3, shift densities in [1/3, 2/3], partial sums near σ"""
    tol = get_config().tolerance
    table = sigma_table(k_max)
    counter = None
    bad = table.recurrence_violations()
    if bad:
        counter = {'identity': 'recurrence', 'k': bad[0], 'sigma': table[bad[0]]}
    bad = table.bound_violations()
    if counter is None and bad:
        counter = {'identity': '|sigma(k)| <= 1/3', 'k': bad[0], 'sigma': table[bad[0]]}
    if counter is None:
        for k in range(1, min(shift_k_max, k_max) + 1):
            density = (table[k] + 1) / 2
            if not ONE_THIRD <= density <= TWO_THIRDS:
                counter = {'identity': 'shift density', 'k': k, 'density': density}
                break
    worst_k, worst_gap = 0, Fraction(0)
    if counter is None:
        k_top = min(empirical_k_max, k_max)
        empirical = empirical_sigma_table(k_top, horizon)
        for k in range(k_top + 1):
            gap = abs(empirical[k] - table[k])
            if gap > worst_gap:
                worst_k, worst_gap = k, gap
        if worst_gap > tol:
            counter = {'identity': 'empirical sigma', 'k': worst_k, 'horizon': horizon,
                       'empirical': empirical[worst_k], 'exact': table[worst_k]}
    values = [table[k] for k in range(1, k_max + 1)]
    evidence = {
        'sigma_min': min(values) if values else None,
        'sigma_max': max(values) if values else None,
        'bound': SIGMA_BOUND,
        'worst_empirical_k': worst_k,
        'worst_empirical_gap': worst_gap,
    }
    return VerificationReport(
        "mahler",
        {'k_max': k_max, 'horizon': horizon, 'empirical_k_max': empirical_k_max,
         'shift_k_max': shift_k_max},
        _verdict(counter), evidence, counter_instance=counter)


# Generalized families

def _short_periods() -> List[str]:
    return list(SIGMA5) + [a + b for a in SIGMA5 for b in SIGMA5 if a != b]


@verification_check("families")
def verify_generalized_families(depth: int = 8) -> VerificationReport:
    """Every valid path with a short prefix and a period of one or two letters,
    other than those decoding to t or ~t, lies in some generalized family"""
    aut = default_automaton()
    counts = {family.name: 0 for family in GENERALIZED_FAMILIES}
    seen = set()
    counter = None
    for node in PathWalker(aut).walk(depth):
        for period in _short_periods():
            if period == "0":
                paths = [FifePath(node.letters, "0", a) for a in sorted(aut.tail_letters(node.state))]
            else:
                path = FifePath(node.letters, period)
                paths = [path] if validate_path(aut, path) else []
            for path in paths:
                if path in seen or set(node.letters + period) == {"0"}:
                    continue
                seen.add(path)
                names = matching_families(path)
                if not names:
                    counter = {'path': str(path)}
                    break
                for name in names:
                    counts[name] += 1
            if counter:
                break
        if counter:
            break
    return VerificationReport("families", {'depth': depth}, _verdict(counter),
                              {'paths_checked': len(seen), 'family_counts': counts},
                              counter_instance=counter)


# Automaton cross-validation

def _decode_letters(letters: str) -> np.ndarray:
    if not letters:
        return np.zeros(0, dtype=np.uint8)
    return fbe_bits(FifePath(letters, "0", 0), 0, sum(LETTER_CODES[ch][1] << k
                                                      for k, ch in enumerate(letters)))


def _state_representatives(aut: FifeAutomaton, depth: int) -> Dict[str, str]:
    """Shortest (then lexicographically first) path reaching each state"""
    reps = {aut.start: ""}
    frontier = [aut.start]
    for _ in range(depth):
        following = []
        for state in frontier:
            for letter in aut.out_letters(state):
                target = aut.transitions[(state, letter)]
                if target not in reps:
                    reps[target] = reps[state] + letter
                    following.append(target)
        frontier = following
    return reps


def _surviving_continuation(prefix: str, extra: int) -> Optional[np.ndarray]:
    """A decoded continuation of `prefix` by Fife blocks, `extra` symbols long
    and free of overlaps, or None when every one of them dies"""
    base = _decode_letters(prefix)
    if find_overlap_bits(base) is not None:
        return None
    target = base.size + extra
    tm = thue_morse_bits(0, target)
    stack: List[Tuple[np.ndarray, int]] = [(base, len(prefix))]
    while stack:
        word, k = stack.pop()
        remaining = target - word.size
        if remaining <= 0:
            return word
        if (1 << k) >= remaining:
            # every nonzero letter or zero tail from here fills with t or ~t
            for b in (0, 1):
                candidate = np.concatenate([word, tm[:remaining] ^ np.uint8(b)])
                if find_overlap_bits(candidate, word.size) is None:
                    return candidate
            continue
        stack.append((word, k + 1))
        for letter in "4321":
            symbol, copies = LETTER_CODES[letter]
            block = np.tile(tm[:1 << k] ^ np.uint8(symbol), copies)[:remaining]
            candidate = np.concatenate([word, block])
            if find_overlap_bits(candidate, word.size) is None:
                stack.append((candidate, k + 1))
    return None


def _forward_candidates(walker: PathWalker, node: PathNode, depth: int, window: int,
                        tm: np.ndarray) -> Iterator[Tuple[str, np.ndarray]]:
    prefix = walker.decoded(node)
    if node.depth == depth:
        yield node.letters, prefix
    if node.letters.endswith("0") or node.length >= window:
        return
    for a in sorted(walker.aut.tail_letters(node.state)):
        yield f"{node.letters}(0)@{a}", np.concatenate([prefix, tm[:window - node.length] ^ np.uint8(a)])


@verification_check("automaton")
def cross_validate_automaton(depth: int = 12, continuation_length: int = 256,
                             aut: Optional[FifeAutomaton] = None,
                             window: int = 1024) -> VerificationReport:
    """Forward: decoded prefixes of valid paths (and their zero-tail
    completions), up to `window` symbols, are overlap-free.

    Reverse: for each state and each letter it lacks, every continuation by
    Fife blocks dies within continuation_length symbols. Survivors make the
    verdict INCONCLUSIVE.
    """
    if depth > AUTOMATON_MAX_DEPTH:
        raise LimitExceeded("automaton depth", depth, AUTOMATON_MAX_DEPTH)
    aut = aut or default_automaton()
    walker = PathWalker(aut, window)
    tm = thue_morse_bits(0, window)
    seen = set()
    counter = None
    for node in walker.walk(depth):
        for label, bits in _forward_candidates(walker, node, depth, window, tm):
            key = bits.tobytes()
            if key in seen:
                continue
            seen.add(key)
            witness = find_overlap_bits(bits)
            if witness is not None:
                counter = {'direction': 'forward', 'path': label, 'position': witness.position,
                           'period': witness.period_length,
                           'factor': "".join(map(str, bits[witness.position:
                                                           witness.position + witness.total_length]))}
                break
        if counter:
            break
    evidence: Dict[str, Any] = {'forward_words': len(seen)}
    if counter:
        return VerificationReport(
            "automaton", {'depth': depth, 'continuation_length': continuation_length,
                          'window': window},
            Verdict.FAIL, evidence, counter_instance=counter)

    reps = _state_representatives(aut, depth)
    checked = 0
    survivors = []
    for state in aut.states:
        if state not in reps:
            continue
        for letter in SIGMA5:
            if (state, letter) in aut.transitions:
                continue
            checked += 1
            prefix = reps[state] + letter
            survivor = _surviving_continuation(prefix, continuation_length)
            if survivor is not None:
                survivors.append({'state': state, 'letter': letter, 'prefix': prefix,
                                  'word': "".join(map(str, survivor[:64]))})
    evidence.update(reverse_checked=checked, reverse_survivors=len(survivors))
    if survivors:
        logger.warning(f"{len(survivors)} missing transitions have overlap-free continuations "
                       f"of {continuation_length} symbols")
    verdict = Verdict.INCONCLUSIVE if survivors else Verdict.PASS
    return VerificationReport(
        "automaton", {'depth': depth, 'continuation_length': continuation_length,
                      'window': window},
        verdict, evidence, counter_instance=survivors[0] if survivors else None)


# Sweep

@dataclass(frozen=True)
class SweepRow:
    path: str
    case: CaseTag
    sd: Fraction
    tail_min: Fraction
    tail_max: Fraction
    excluded: bool = False

    def csv_fields(self) -> List[str]:
        return [self.path, str(self.case), str(self.sd.numerator), str(self.sd.denominator),
                f"{float(self.tail_min):.10f}", f"{float(self.tail_max):.10f}"]


@dataclass
class SweepResult:
    """Rows in enumeration order. Extrema skip rows decoding to t or ~t.

    global_min/global_max bound the per-row tail extrema; sd_min/sd_max
    are the extrema of SD at prefix_length itself.
    """
    depth: int
    prefix_length: int
    tail_fraction: Fraction
    rows: List[SweepRow]
    global_min: Optional[Fraction]
    global_max: Optional[Fraction]
    sd_min: Optional[Fraction]
    sd_max: Optional[Fraction]
    truncated: int = 0

    def tripwires(self, slack: Fraction = SWEEP_SLACK) -> Dict[str, bool]:
        """Empirical regression bounds on SD at prefix_length"""
        return {
            'sd_min_above_quarter_minus_slack': self.sd_min is None or self.sd_min > Fraction(1, 4) - slack,
            'sd_max_below_three_quarters_plus_slack': self.sd_max is None or self.sd_max < Fraction(3, 4) + slack,
        }

    def write_csv(self, out: TextIO, delimiter: str = ","):
        out.write(f"# depth={self.depth} prefix_length={self.prefix_length} "
                  f"tail_fraction={self.tail_fraction}\n")
        out.write(SWEEP_HEADER.replace(",", delimiter) + "\n")
        for row in self.rows:
            out.write(delimiter.join(row.csv_fields()) + "\n")

    def summary(self) -> Dict[str, Any]:
        return {
            'depth': self.depth,
            'prefix_length': self.prefix_length,
            'tail_fraction': self.tail_fraction,
            'rows': len(self.rows),
            'excluded_rows': sum(1 for r in self.rows if r.excluded),
            'truncated_paths': self.truncated,
            'global_min': self.global_min,
            'global_max': self.global_max,
            'sd_min': self.sd_min,
            'sd_max': self.sd_max,
            'conjectured_window': "[1/3, 2/3] (empirical comparison only)",
            'tripwires': self.tripwires(),
        }

    def to_dict(self) -> Dict[str, Any]:
        return _plain(self.summary())

    def print_report(self, out: Optional[TextIO] = None):
        out = out or sys.stdout
        print("\n" + "=" * 60, file=out)
        print("SWEEP RESULTS", file=out)
        print("=" * 60, file=out)
        for key, value in _plain(self.summary()).items():
            print(f"  {key}: {value}", file=out)


def _prefix_case(letters: str) -> CaseTag:
    body = letters.lstrip("0")
    if not body:
        return CaseTag.CASE1
    if body[0] in "13":
        return CaseTag.CASE4
    return CaseTag.CASE3 if "0" in body else CaseTag.CASE2


def _closure_fills(aut: FifeAutomaton, state: str) -> List[Tuple[int, str, int]]:
    """(symbol, letter, zeros read) for the first nonzero letter of each
    symbol reachable from state through 0s"""
    found: Dict[int, Tuple[str, int]] = {}
    for zeros, s in enumerate(aut.zero_closure(state)):
        for letter in aut.out_letters(s):
            if letter != "0":
                found.setdefault(LETTER_CODES[letter][0], (letter, zeros))
    return [(b, letter, zeros) for b, (letter, zeros) in sorted(found.items())]


class _LeafStats:
    """Batches decoded leaves and computes SD statistics against t"""

    def __init__(self, n: int, tail_fraction: Fraction):
        self.n = n
        self.reference = thue_morse_bits(0, n)
        num, den = tail_fraction.numerator, tail_fraction.denominator
        first = (den - num) * n // den + 1
        self.tail_lengths = np.arange(min(first, n), n + 1, dtype=np.int64)
        self.words = np.empty((BATCH_ROWS, n), dtype=np.uint8)
        self.pending: List[Tuple[bytes, str, CaseTag]] = []
        self.rows: List[Tuple[bytes, SweepRow]] = []
        self.seen = set()

    def fill(self, prefix: np.ndarray, symbol: int) -> np.ndarray:
        return np.concatenate([prefix, self.reference[:self.n - prefix.size] ^ np.uint8(symbol)])

    def add(self, word: np.ndarray, label: str, case: CaseTag):
        digest = hashlib.blake2b(np.packbits(word).tobytes(), digest_size=16).digest()
        if digest in self.seen:
            return
        self.seen.add(digest)
        self.words[len(self.pending)] = word
        self.pending.append((digest, label, case))
        if len(self.pending) == BATCH_ROWS:
            self.flush()

    def flush(self):
        k = len(self.pending)
        if not k:
            return
        running = np.cumsum(self.words[:k] == self.reference, axis=1, dtype=np.int64)
        counts = running[:, self.tail_lengths - 1]
        n = self.n
        for r, (digest, label, case) in enumerate(self.pending):
            total = int(running[r, -1])
            row_counts = counts[r]
            i = exact_argmin(row_counts, self.tail_lengths)
            j = exact_argmax(row_counts, self.tail_lengths)
            self.rows.append((digest, SweepRow(
                label, case, Fraction(total, n),
                Fraction(int(row_counts[i]), int(self.tail_lengths[i])),
                Fraction(int(row_counts[j]), int(self.tail_lengths[j])),
                excluded=total in (0, n))))
        self.pending.clear()


def _sweep_expand(n: int):
    def expand(node: PathNode) -> bool:
        return node.length < n and (1 << node.depth) < n - node.length
    return expand


def _emit_leaves(walker: PathWalker, node: PathNode, stats: _LeafStats, depth: int) -> int:
    """Record every decoded length-n word determined at node; return 1 if the
    node was cut off by the depth limit"""
    n = stats.n
    aut = walker.aut
    if node.length >= n:
        stats.add(walker.buffer[:n], node.letters + "...", _prefix_case(node.letters))
        return 0
    prefix = walker.buffer[:node.length]
    if not node.letters.endswith("0"):
        for a in sorted(aut.tail_letters(node.state)):
            stats.add(stats.fill(prefix, a), f"{node.letters}(0)@{a}", CaseTag.CASE1)
    if (1 << node.depth) >= n - node.length:
        for b, letter, zeros in _closure_fills(aut, node.state):
            label = node.letters + "0" * zeros + letter
            stats.add(stats.fill(prefix, b), label + "...", _prefix_case(label))
        return 0
    return 1 if node.depth >= depth else 0


def _sweep_items(items: List[Tuple[str, bool]], depth: int, n: int,
                 tail_fraction: Fraction) -> Tuple[List[Tuple[bytes, SweepRow]], int]:
    """Process (root, whole subtree?) items in order"""
    aut = default_automaton()
    walker = PathWalker(aut, n)
    stats = _LeafStats(n, tail_fraction)
    expand = _sweep_expand(n)
    truncated = 0
    for root, whole in items:
        limit = depth if whole else len(root)
        for node in walker.walk(limit, root, expand):
            truncated += _emit_leaves(walker, node, stats, depth)
    stats.flush()
    return stats.rows, truncated


def _sweep_plan(depth: int, n: int) -> List[Tuple[str, bool]]:
    expand = _sweep_expand(n)
    split = min(SPLIT_DEPTH, depth)
    plan = []
    for node in PathWalker(default_automaton()).walk(split, expand=expand):
        plan.append((node.letters, node.depth >= split or not expand(node)))
    return plan


def _extreme(values: List[Fraction], largest: bool) -> Optional[Fraction]:
    if not values:
        return None
    return max(values) if largest else min(values)


@performance_tracker("sweep")
def sweep(depth: int = 20, prefix_length: int = 1 << 14,
          tail_fraction: Optional[Fraction] = None, jobs: Optional[int] = None) -> SweepResult:
    """Every length-prefix_length word decoded from a valid path (and each
    zero-tail completion), with SD against t"""
    config = get_config()
    if depth > config.depth_cap:
        raise LimitExceeded("sweep depth", depth, config.depth_cap)
    if prefix_length <= 0:
        raise ValueError("prefix length must be positive")
    check_symbol_budget(prefix_length * BATCH_ROWS, "sweep batch", bytes_per_symbol=9.0)
    tail_fraction = Fraction(tail_fraction) if tail_fraction is not None else config.tail_fraction
    jobs = jobs or config.jobs

    plan = _sweep_plan(depth, prefix_length)
    logger.info(f"Sweep depth={depth} prefix_length={prefix_length}: {len(plan)} work items, "
                f"{jobs} job(s)")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=set_config,
                                 initargs=(config,)) as executor:
            futures = [executor.submit(_sweep_items, [item], depth, prefix_length, tail_fraction)
                       for item in plan]
            results = [f.result() for f in futures]
    else:
        results = [_sweep_items(plan, depth, prefix_length, tail_fraction)]

    rows: List[SweepRow] = []
    seen = set()
    truncated = 0
    for item_rows, item_truncated in results:
        truncated += item_truncated
        for digest, row in item_rows:
            if digest not in seen:
                seen.add(digest)
                rows.append(row)
    if truncated:
        logger.warning(f"{truncated} paths reached depth {depth} before {prefix_length} symbols")

    kept = [r for r in rows if not r.excluded]
    result = SweepResult(
        depth, prefix_length, tail_fraction, rows,
        _extreme([r.tail_min for r in kept], largest=False),
        _extreme([r.tail_max for r in kept], largest=True),
        _extreme([r.sd for r in kept], largest=False),
        _extreme([r.sd for r in kept], largest=True),
        truncated,
    )
    logger.info(f"Sweep finished: {len(rows)} words, SD range "
                f"[{result.sd_min}, {result.sd_max}]")
    return result


@dataclass
class PowerFreeSweep:
    """SD extrema against t over all p/q-power-free words of one length"""
    length: int
    p: int
    q: int
    strict: bool
    count: int
    sd_min: Optional[Fraction]
    sd_max: Optional[Fraction]
    argmin_word: Optional[str]
    argmax_word: Optional[str]

    def print_report(self, out: Optional[TextIO] = None):
        out = out or sys.stdout
        print("\n" + "=" * 60, file=out)
        print("POWER-FREE SWEEP", file=out)
        print("=" * 60, file=out)
        for key, value in _plain(self.__dict__).items():
            print(f"  {key}: {value}", file=out)


@performance_tracker("sweep_power_free")
def sweep_power_free(length: int, p: int = 7, q: int = 3, strict: bool = False) -> PowerFreeSweep:
    """Count the p/q-power-free words of a length and their SD range against t,
    leaving out t's and ~t's own prefixes"""
    reference = thue_morse_bits(0, length)
    count = 0
    low = high = None
    low_word = high_word = None
    for word in iter_power_free_words(length, p, q, strict):
        count += 1
        m = int(np.count_nonzero(word == reference))
        if m in (0, length):
            continue
        if low is None or m < low:
            low, low_word = m, "".join(map(str, word))
        if high is None or m > high:
            high, high_word = m, "".join(map(str, word))
    logger.info(f"{count} words of length {length} avoid exponents "
                f"{'>=' if strict else '>'} {p}/{q}")
    return PowerFreeSweep(length, p, q, strict, count,
                          None if low is None else Fraction(low, length),
                          None if high is None else Fraction(high, length),
                          low_word, high_word)


# All checks

CHECKS = {
    'lemma': (verify_lemma_technical, {'n_max': 12}),
    'cor': (verify_cor_technical_finite, {'n_max': 12}),
    'tightness': (verify_tightness, {'n_max': 10}),
    'prop-h': (verify_prop_h, {'k_max': 10}),
    'prop-edge': (verify_prop_edge, {'n_max': 4}),
    'mahler': (verify_mahler, {}),
    'duality': (verify_complement_duality, {}),
    'families': (verify_generalized_families, {}),
    'automaton': (cross_validate_automaton, {}),
}


def run_check(name: str, **overrides) -> VerificationReport:
    """Run one named check with its default parameters, updated by overrides"""
    func, defaults = CHECKS[name]
    return func(**{**defaults, **overrides})


def verify_all(jobs: Optional[int] = None) -> List[VerificationReport]:
    """Every check at default parameters, sorted by check name"""
    config = get_config()
    jobs = jobs or config.jobs
    names = sorted(CHECKS)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=set_config,
                                 initargs=(config,)) as executor:
            reports = list(executor.map(run_check, names))
    else:
        reports = [run_check(name) for name in names]
    return sorted(reports, key=lambda r: r.check_name)


__all__ = [
    'Verdict', 'VerificationReport', 'SweepRow', 'SweepResult', 'PowerFreeSweep',
    'verify_lemma_technical', 'verify_cor_technical_finite', 'verify_tightness',
    'verify_prop_h', 'verify_prop_edge', 'verify_complement_duality', 'verify_mahler',
    'verify_generalized_families', 'cross_validate_automaton', 'sweep', 'sweep_power_free',
    'verify_all', 'run_check', 'CHECKS', 'EXIT_CODES', 'SWEEP_HEADER', 'LEMMA_CASES',
    'save_reports', 'overall_verdict', 'edge_path',
]
