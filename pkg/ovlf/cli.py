#!/usr/bin/env python3
"""
Command-line entry point: one subcommand per toolkit operation

Data (words, CSV rows, reports) goes to stdout; logs go to stderr.
Exit codes: 0 success/PASS, 1 FAIL, 2 usage error, 3 INCONCLUSIVE.
"""
import argparse
import inspect
import json
import logging
import sys
from fractions import Fraction
from typing import Callable, Dict, List, Optional, TextIO

from .config import Config, parse_fraction, set_config
from .fife import (
    FifePath, classify_path, default_automaton, fbe_decode, iter_paths, matching_families,
    validate_path,
)
from .logging_setup import setup_logging
from .performance import metrics
from .mahler import empirical_sigma_table, shift_density, sigma_table
from .powerfree import (
    critical_exponent, find_overlap, find_flip_overlap, is_pq_power_free, random_flips,
)
from .similarity import estimate_lsd_usd, sd, sd_curve, weyl_table
from .verify import (
    CHECKS, EXIT_CODES, overall_verdict, run_check, save_reports, sweep,
    sweep_power_free, verify_all,
)
from .words import FiniteWord, eval_spec, is_bit_string, parse_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _flips(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"flips must be comma-separated integers: {text!r}")


def _emit_word(word: FiniteWord, width: Optional[int], out: TextIO):
    text = str(word)
    if not width:
        print(text, file=out)
        return
    for i in range(0, len(text), width):
        print(text[i:i + width], file=out)


def _rational(value: Fraction, with_float: bool) -> str:
    text = f"{value.numerator}/{value.denominator}"
    return f"{text} {float(value):.10f}" if with_float else text


def _rational_fields(value: Fraction) -> List[str]:
    return [str(value.numerator), str(value.denominator), f"{float(value):.10f}"]


def _delimiter(config: Config) -> str:
    return "\t" if config.output_format == "tsv" else ","


def _finite(text: str, n: Optional[int]) -> FiniteWord:
    """A bit-string literal, or the first n symbols of a word spec"""
    if is_bit_string(text):
        return FiniteWord(text)
    if not n:
        raise ValueError(f"{text!r} is a word spec; give its prefix length with -n")
    return eval_spec(parse_spec(text), 0, n)


class Toolkit:
    """Dispatches parsed arguments to the toolkit operations"""

    def __init__(self, config: Config, out: TextIO):
        self.config = config
        self.out = out

    def gen(self, args) -> int:
        word = eval_spec(parse_spec(args.spec), args.start, args.n)
        _emit_word(word, args.width, self.out)
        return EXIT_OK

    def sd(self, args) -> int:
        x, y = _finite(args.x, args.n), _finite(args.y, args.n)
        print(_rational(sd(x, y), args.float), file=self.out)
        return EXIT_OK

    def sd_curve(self, args) -> int:
        x, y = parse_spec(args.x), parse_spec(args.y)
        curve = sd_curve(x, y, args.n, args.stride, self.config.tail_fraction)
        target = open(args.csv, "w") if args.csv else self.out
        try:
            target.write(f"# x={x} y={y} horizon={args.n} stride={args.stride}\n")
            if self.config.output_format == "human":
                for n, value in curve.samples:
                    target.write(f"{n}: {_rational(value, args.float)}\n")
            else:
                curve.write_csv(target, delimiter=_delimiter(self.config))
        finally:
            if args.csv:
                target.close()
        logger.info(f"Tail of the curve: [{curve.tail_min}, {curve.tail_max}]")
        if args.csv:
            logger.info(f"Wrote {len(curve)} samples to {args.csv}")
        return EXIT_OK

    def estimate(self, args) -> int:
        estimate = estimate_lsd_usd(parse_spec(args.x), parse_spec(args.y), args.n,
                                    args.block, self.config.tail_fraction)
        print(f"lsd_lower: {_rational(estimate.lsd_lower, args.float)}", file=self.out)
        print(f"usd_upper: {_rational(estimate.usd_upper, args.float)}", file=self.out)
        return EXIT_OK

    def sigma(self, args) -> int:
        d = _delimiter(self.config)
        if args.empirical:
            k_max, n = args.empirical
            table = sigma_table(k_max)
            self.out.write(d.join(["k", "empirical", "exact"]) + "\n")
            for k, value in enumerate(empirical_sigma_table(k_max, n)):
                self.out.write(d.join([str(k), _rational(value, args.float),
                                       _rational(table[k], args.float)]) + "\n")
            return EXIT_OK
        if args.shift_density:
            ks = range(1, args.max + 1)
            values = [shift_density(k) for k in ks]
        else:
            ks = range(args.max + 1)
            table = sigma_table(args.max)
            values = [table[k] for k in ks]
        self.out.write(d.join(["k", "num", "den", "float"]) + "\n")
        for k, value in zip(ks, values):
            self.out.write(d.join([str(k)] + _rational_fields(value)) + "\n")
        return EXIT_OK

    def decode(self, args) -> int:
        _emit_word(fbe_decode(FifePath.parse(args.path), args.n), args.width, self.out)
        return EXIT_OK

    def validate(self, args) -> int:
        valid = validate_path(default_automaton(), FifePath.parse(args.path))
        print("valid" if valid else "invalid", file=self.out)
        return EXIT_OK if valid else EXIT_FAIL

    def classify(self, args) -> int:
        print(classify_path(FifePath.parse(args.path)), file=self.out)
        return EXIT_OK

    def families(self, args) -> int:
        names = matching_families(FifePath.parse(args.path))
        print(", ".join(names) if names else "none", file=self.out)
        return EXIT_OK

    def enumerate(self, args) -> int:
        d = _delimiter(self.config)
        header = ["path", "end_state", "decoded_length"] + (["word"] if args.emit_words else [])
        self.out.write(d.join(header) + "\n")
        count = 0
        aut = default_automaton()
        for node in iter_paths(aut, args.depth):
            row = [node.letters, node.state, str(node.length)]
            if args.emit_words:
                n = node.length if args.emit_length is None else min(node.length, args.emit_length)
                row.append(str(fbe_decode(FifePath(node.letters, "0", 0), n)) if n else "")
            self.out.write(d.join(row) + "\n")
            count += 1
        logger.info(f"{count} valid paths of depth {args.depth}")
        return EXIT_OK

    def overlap(self, args) -> int:
        word = _finite(args.word, args.n)
        witness = find_overlap(word)
        if witness is None:
            print("overlap-free", file=self.out)
        else:
            print(f"{witness}: {witness.factor(word)}", file=self.out)
        return EXIT_OK

    def powerfree(self, args) -> int:
        if args.enumerate:
            result = sweep_power_free(args.enumerate, args.p, args.q, args.strict)
            result.print_report(self.out)
            return EXIT_OK
        if not args.word:
            raise ValueError("powerfree needs a word or --enumerate N")
        word = _finite(args.word, args.n)
        free = is_pq_power_free(word, args.p, args.q, args.strict)
        print(f"{'true' if free else 'false'} (critical exponent "
              f"{_rational(critical_exponent(word), args.float)})", file=self.out)
        return EXIT_OK

    def fragility(self, args) -> int:
        drawn = args.random is not None
        flips = random_flips(args.random, args.window) if drawn else args.flips
        witness = find_flip_overlap(flips, args.window)
        if drawn:
            print(f"flips: {','.join(map(str, flips))}", file=self.out)
        if witness is None:
            print("no overlap found; raise --window", file=self.out)
            return EXIT_INCONCLUSIVE
        print(str(witness), file=self.out)
        return EXIT_OK

    def weyl(self, args) -> int:
        d = _delimiter(self.config)
        rows = weyl_table(parse_spec(args.x), parse_spec(args.y), args.n,
                          range(args.min_exp, args.max_exp + 1))
        self.out.write(d.join(["block_length", "inf", "sup"]) + "\n")
        for n, low, high in rows:
            self.out.write(d.join([str(n), _rational(low, args.float),
                                   _rational(high, args.float)]) + "\n")
        return EXIT_OK

    def verify(self, args) -> int:
        if args.check == "all":
            reports = verify_all(self.config.jobs)
        else:
            accepted = inspect.signature(CHECKS[args.check][0]).parameters
            overrides = {key: value for key, value in _check_overrides(args).items()
                         if key in accepted}
            reports = [run_check(args.check, **overrides)]
        for report in reports:
            report.print_report(self.out)
        if args.json:
            save_reports(reports, args.json, timings=metrics.get_stats())
        return EXIT_CODES[overall_verdict(reports)]

    def sweep(self, args) -> int:
        result = sweep(args.depth, args.length, self.config.tail_fraction, self.config.jobs)
        if args.csv:
            with open(args.csv, "w") as f:
                result.write_csv(f, _delimiter(self.config))
            logger.info(f"Wrote {len(result.rows)} rows to {args.csv}")
            result.print_report(self.out)
        else:
            result.write_csv(self.out, _delimiter(self.config))
        if args.json:
            with open(args.json, "w") as f:
                json.dump({**result.to_dict(), "timings": metrics.get_stats()}, f, indent=2)
        if not all(result.tripwires().values()):
            logger.warning(f"Sweep tripwires breached: {result.tripwires()}")
            return EXIT_FAIL
        return EXIT_OK


def _check_overrides(args) -> Dict:
    names = {'n_max': args.n_max, 'k_max': args.k_max, 'depth': args.depth,
             'horizon': args.horizon, 'continuation_length': args.continuation}
    return {k: v for k, v in names.items() if v is not None}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--float', action='store_true', help='Add decimal values next to rationals')
    common.add_argument('--width', type=int, help='Wrap printed words at this many symbols')
    common.add_argument('--seed', type=int, help='Seed for randomized runs')
    common.add_argument('--jobs', type=int, help='Worker processes for sweep and verify all')
    common.add_argument('--tol', type=_fraction, help='Tolerance as a rational, e.g. 1/100')
    common.add_argument('--tail-fraction', type=_fraction,
                        help='Fraction of the horizon used for tail extrema, e.g. 1/2')
    common.add_argument('--format', choices=['csv', 'tsv', 'human'], help='Tabular output format')
    common.add_argument('--json', help='Also save results to this JSON file')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='Warnings and errors only')

    parser = argparse.ArgumentParser(prog='ovlf', description='Overlap-free binary words and '
                                     'their similarity to the Thue-Morse word')
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name: str, handler: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(handler=handler)
        return p

    p = command('gen', 'gen', 'Print symbols of a word spec (t, h, ~t, t>>k, fife:PATH, BITS+SPEC)')
    p.add_argument('spec', help='Word spec')
    p.add_argument('-n', type=int, required=True, help='Number of symbols')
    p.add_argument('--start', type=int, default=0, help='First index')

    p = command('sd', 'sd', 'Exact similarity density of two equal-length words')
    p.add_argument('x', help='Bit string or word spec')
    p.add_argument('y', help='Bit string or word spec')
    p.add_argument('-n', type=int, help='Prefix length for word specs')

    p = command('sd-curve', 'sd_curve', 'SD of growing prefixes of two word specs')
    p.add_argument('x', help='Word spec')
    p.add_argument('y', help='Word spec')
    p.add_argument('-n', type=int, required=True, help='Horizon')
    p.add_argument('--stride', type=int, default=1, help='Sample every stride symbols')
    p.add_argument('--csv', help='Write the curve to this file instead of stdout')

    p = command('estimate', 'estimate', 'Tail estimates of LSD and USD')
    p.add_argument('x', help='Word spec')
    p.add_argument('y', help='Word spec')
    p.add_argument('-n', type=int, help='Horizon (default from config)')
    p.add_argument('--block', type=int, default=1, help='Block size for sampled prefix lengths')

    p = command('sigma', 'sigma', 'Exact autocorrelation values and shift densities of t')
    p.add_argument('--max', type=int, default=32, help='Largest shift k')
    p.add_argument('--shift-density', action='store_true',
                   help='Print the density of agreement between t and its k-shift, k >= 1')
    p.add_argument('--empirical', type=int, nargs=2, metavar=('K', 'N'),
                   help='Partial sums over N symbols for k <= K')

    p = command('decode', 'decode', 'Decode a Fife path PREFIX(PERIOD)[@BIT]')
    p.add_argument('path', help='Fife path, e.g. "2(31)" or "0^3 1(0)@0"')
    p.add_argument('-n', type=int, required=True, help='Number of symbols')

    p = command('validate', 'validate', 'Check a Fife path against the automaton')
    p.add_argument('path', help='Fife path')

    p = command('classify', 'classify', 'Case tag of a valid Fife path')
    p.add_argument('path', help='Fife path')

    p = command('families', 'families', 'Generalized families containing a Fife path')
    p.add_argument('path', help='Fife path')

    p = command('enumerate', 'enumerate', 'List valid Fife paths of a given depth')
    p.add_argument('--depth', type=int, required=True, help='Number of letters')
    p.add_argument('--emit-words', action='store_true', help='Also print each decoded prefix')
    p.add_argument('--emit-length', type=int, metavar='N',
                   help='With --emit-words, print at most N symbols per path')

    p = command('overlap', 'overlap', 'Find the leftmost shortest overlap axaxa')
    p.add_argument('word', help='Bit string or word spec')
    p.add_argument('-n', type=int, help='Prefix length for word specs')

    p = command('powerfree', 'powerfree', 'Test or enumerate p/q-power-free words')
    p.add_argument('word', nargs='?', help='Bit string or word spec')
    p.add_argument('-n', type=int, help='Prefix length for word specs')
    p.add_argument('--p', type=int, default=7, help='Exponent numerator')
    p.add_argument('--q', type=int, default=3, help='Exponent denominator')
    p.add_argument('--strict', action='store_true', help='Also reject exponent exactly p/q')
    p.add_argument('--enumerate', type=int, metavar='N',
                   help='Enumerate all such words of length N and report SD against t')

    p = command('fragility', 'fragility', 'Flip positions of t and look for an overlap')
    flips = p.add_mutually_exclusive_group(required=True)
    flips.add_argument('--flips', type=_flips, help='Comma-separated positions')
    flips.add_argument('--random', type=int, metavar='K',
                       help='Flip K distinct positions drawn with --seed / OVLF_SEED')
    p.add_argument('--window', type=int, default=1024, help='Prefix length to search')

    p = command('weyl', 'weyl', 'Sliding-window SD extrema per block length')
    p.add_argument('x', help='Word spec')
    p.add_argument('y', help='Word spec')
    p.add_argument('-n', type=int, required=True, help='Horizon')
    p.add_argument('--min-exp', type=int, default=4, help='Smallest block length exponent')
    p.add_argument('--max-exp', type=int, default=12, help='Largest block length exponent')

    p = command('verify', 'verify', 'Run verification checks')
    p.add_argument('check', choices=['all'] + sorted(CHECKS), help='Check to run')
    p.add_argument('--n-max', type=int, help='Largest n for lemma, cor, tightness, prop-edge, duality')
    p.add_argument('--k-max', type=int, help='Largest exponent or shift for prop-h and mahler')
    p.add_argument('--depth', type=int, help='Path depth for automaton and families')
    p.add_argument('--horizon', type=int, help='Horizon for prop-h and mahler')
    p.add_argument('--continuation', type=int, help='Continuation length for automaton')

    p = command('sweep', 'sweep', 'SD against t of every decoded word to a depth')
    p.add_argument('--depth', type=int, default=20, help='Path depth limit')
    p.add_argument('--length', type=int, default=1 << 14, help='Prefix length')
    p.add_argument('--csv', help='Write rows to this file and print the summary')

    return parser


def _config_from_args(args) -> Config:
    level = "DEBUG" if args.verbose else "WARNING" if args.quiet else None
    return Config.from_env({
        'tolerance': args.tol,
        'tail_fraction': args.tail_fraction,
        'jobs': args.jobs,
        'seed': args.seed,
        'output_format': args.format,
        'log_level': level,
    })


def run(argv: Optional[List[str]] = None, out: Optional[TextIO] = None) -> int:
    """Parse argv, run one subcommand and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        config = _config_from_args(args)
    except ValueError as e:
        print(f"ovlf: configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    set_config(config)
    setup_logging(config.log_level)

    handler: Callable = getattr(Toolkit(config, out or sys.stdout), args.handler)
    try:
        return handler(args)
    except ValueError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INCONCLUSIVE


__all__ = ['run', 'build_parser', 'Toolkit', 'EXIT_OK', 'EXIT_FAIL', 'EXIT_USAGE',
           'EXIT_INCONCLUSIVE']
