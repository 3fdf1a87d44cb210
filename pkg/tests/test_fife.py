"""Tests for Fife paths, the FBE decoding and the automaton.

Properties covered:

1. FBE(2(31)^ω) = h and FBE((0)^ω, a) is t or ~t
2. Swapping 1<->3 and 2<->4 complements the decoding
3. The decoded length after k letters is Σ 2^j |c(x[j])|
4. Random-access decoding agrees with materialized prefixes
5. Validation, classification and family membership on known paths
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ovlf.errors import InvalidPath, LimitExceeded, MissingTailLetter, SpecSyntaxError
from ovlf.fife import (
    FIFE_TRANSITIONS, GENERALIZED_FAMILIES, CaseTag, FifePath, PathWalker, build_automaton, c,
    classify_path, complement_path, decoded_length, default_automaton, enumerate_paths,
    fbe_bits, fbe_decode, in_generalized_family, iter_paths, matching_families, validate_path,
)
from ovlf.powerfree import is_overlap_free
from ovlf.words import h_prefix, mu, thue_morse_prefix

# state renaming induced by complementing the decoded word
STATE_DUAL = dict(zip("ABCDEFGHIJK", "ADEBCIJKFGH"))
LETTER_DUAL = dict(zip("01234", "03412"))

VALID_PATHS = ["2(31)", "4(13)", "(0)@0", "(0)@1", "1(0)@0", "31(31)", "20(3)", "(1)", "(13)",
               "0002(31)", "01(0)@1", "3(0)@1", "02(31)"]


@st.composite
def valid_paths(draw, max_prefix=10):
    """Random valid paths: a random automaton walk followed by a valid ending"""
    aut = default_automaton()
    state = aut.start
    letters = ""
    for _ in range(draw(st.integers(0, max_prefix))):
        options = aut.out_letters(state)
        letter = draw(st.sampled_from(options))
        letters += letter
        state = aut.transitions[(state, letter)]
    endings = [FifePath(letters, "0", a) for a in sorted(aut.tail_letters(state))]
    endings += [FifePath(letters, p) for p in ("1", "3", "13", "31", "0313")
                if validate_path(aut, FifePath(letters, p))]
    endings = endings or [FifePath("", "0", 0)]
    return draw(st.sampled_from(endings))


class TestLetterCodes:
    @pytest.mark.parametrize("letter,code", [(0, ""), (1, "0"), (2, "00"), (3, "1"), (4, "11")])
    def test_codes(self, letter, code):
        assert str(c(letter)) == code

    def test_decoded_length(self):
        assert decoded_length("") == 0
        assert decoded_length("2") == 2
        assert decoded_length("23") == 4
        assert decoded_length("231") == 8
        assert decoded_length("0004") == 16


class TestPathSyntax:
    def test_parse(self):
        path = FifePath.parse("2(31)")
        assert (path.prefix, path.period, path.tail) == ("2", "31", None)

    def test_parse_powers_and_spaces(self):
        assert FifePath.parse("0^3 1(0)@0") == FifePath("0001", "0", 0)
        assert FifePath.parse("0^2 2(31)") == FifePath("002", "31")

    def test_missing_tail_letter(self):
        with pytest.raises(MissingTailLetter):
            FifePath.parse("1(0)")

    @pytest.mark.parametrize("bad", ["", "2", "()", "2(5)", "(31)@0", "(0)@2", "abc"])
    def test_bad_syntax(self, bad):
        with pytest.raises(SpecSyntaxError):
            FifePath.parse(bad)

    def test_equality_compares_streams(self):
        assert FifePath("31", "31") == FifePath("", "31")
        assert FifePath("", "3131") == FifePath("3", "13")
        assert FifePath("", "0", 0) != FifePath("", "0", 1)
        assert len({FifePath("2", "31"), FifePath("231", "31")}) == 1

    def test_round_trip(self):
        for text in VALID_PATHS:
            assert str(FifePath.parse(text)) == text

    def test_letter_access(self):
        path = FifePath("2", "31")
        assert path.unrolled(6) == "231313"


class TestDecoding:
    def test_h(self):
        assert fbe_decode(FifePath.parse("2(31)"), 32) == h_prefix(32)

    def test_zero_tail(self):
        assert fbe_decode(FifePath.parse("(0)@0"), 16) == thue_morse_prefix(16)
        assert fbe_decode(FifePath.parse("(0)@1"), 16) == ~thue_morse_prefix(16)

    def test_invalid_path_still_decodes(self):
        assert str(fbe_decode(FifePath.parse("1(3)"), 5)) == "01010"

    @pytest.mark.parametrize("text", ["2(31)", "1(0)@0", "(13)", "20(3)"])
    def test_leading_zero_applies_mu(self, text):
        path = FifePath.parse(text)
        shifted = FifePath("0" + path.prefix, path.period, path.tail)
        assert fbe_decode(shifted, 512) == mu(fbe_decode(path, 256))

    @pytest.mark.parametrize("n", range(7))
    def test_complement_duality(self, n):
        p2 = FifePath("0" * n + "2", "31")
        p4 = FifePath("0" * n + "4", "13")
        assert complement_path(p2) == p4
        assert fbe_decode(p4, 1 << 12) == ~fbe_decode(p2, 1 << 12)

    @pytest.mark.parametrize("n", range(9))
    def test_edge_words_match_h(self, n):
        size = 1 << 14
        decoded = fbe_bits(FifePath("0" * n + "2", "31"), 0, size)
        h = h_prefix(size).bits ^ np.uint8(n % 2)
        assert np.array_equal(decoded[1 << n:], h[1 << n:])

    @settings(max_examples=100, deadline=None)
    @given(path=valid_paths(), start=st.integers(0, 3000), count=st.integers(0, 600))
    def test_random_access(self, path, start, count):
        whole = fbe_decode(path, start + count + 1)
        assert np.array_equal(fbe_bits(path, start, count), whole.bits[start:start + count])

    @settings(max_examples=100, deadline=None)
    @given(path=valid_paths(max_prefix=16))
    def test_complement_of_random_paths(self, path):
        assert fbe_decode(complement_path(path), 2048) == ~fbe_decode(path, 2048)

    def test_errors(self):
        with pytest.raises(ValueError):
            fbe_decode(FifePath.parse("2(31)"), 0)

    def test_decode_budget(self, config):
        config.memory_cap_symbols = 100
        with pytest.raises(LimitExceeded):
            fbe_decode(FifePath.parse("2(31)"), 101)


class TestAutomaton:
    def test_deterministic_table(self):
        aut = build_automaton()
        assert len(aut.transitions) == len(FIFE_TRANSITIONS)
        assert aut.start == "A"

    def test_complement_symmetry(self):
        """Complementing the decoded word is an automorphism of the automaton"""
        aut = default_automaton()
        for (state, letter), target in aut.transitions.items():
            dual = (STATE_DUAL[state], LETTER_DUAL[letter])
            assert aut.transitions.get(dual) == STATE_DUAL[target]

    def test_tail_letters(self):
        aut = default_automaton()
        assert aut.tail_letters("A") == frozenset({0, 1})
        assert aut.tail_letters("B") == frozenset({0, 1})
        assert aut.tail_letters("G") == frozenset({1})
        assert aut.tail_letters("K") == frozenset({0})
        assert aut.tail_letters("C") == frozenset()

    def test_with_transition_copies(self):
        aut = default_automaton()
        mutated = aut.with_transition("E", "3", "E")
        assert ("E", "3") not in aut.transitions
        assert mutated.transitions[("E", "3")] == "E"

    def test_rejects_unknown_states(self):
        aut = default_automaton()
        with pytest.raises(ValueError):
            aut.with_transition("E", "3", "Z")


class TestValidation:
    @pytest.mark.parametrize("text", VALID_PATHS)
    def test_valid(self, text):
        assert validate_path(default_automaton(), FifePath.parse(text))

    @pytest.mark.parametrize("text", ["1(3)", "(2)", "(4)", "01(3)", "2(0)@0", "4(0)@1", "2(3)"])
    def test_invalid(self, text):
        assert not validate_path(default_automaton(), FifePath.parse(text))

    @pytest.mark.parametrize("text,case", [
        ("(0)@1", CaseTag.CASE1),
        ("1(0)@0", CaseTag.CASE1),
        ("2(31)", CaseTag.CASE2),
        ("0004(13)", CaseTag.CASE2),
        ("20(3)", CaseTag.CASE3),
        ("31(31)", CaseTag.CASE4),
        ("(13)", CaseTag.CASE4),
    ])
    def test_classify(self, text, case):
        assert classify_path(FifePath.parse(text)) == case

    def test_classify_invalid(self):
        with pytest.raises(InvalidPath):
            classify_path(FifePath.parse("1(3)"))

    @settings(max_examples=60, deadline=None)
    @given(path=valid_paths())
    def test_valid_prefixes_are_overlap_free(self, path):
        assert is_overlap_free(fbe_decode(path, 1024))


class TestEnumeration:
    def test_depth_one(self):
        aut = default_automaton()
        nodes = enumerate_paths(aut, 1)
        assert [n.letters for n in nodes] == list("01234")
        assert [n.state for n in nodes] == ["A", "B", "C", "D", "E"]

    def test_depth_two_count(self):
        assert len(enumerate_paths(default_automaton(), 2)) == 15

    def test_lengths_and_prefix_closure(self):
        aut = default_automaton()
        shorter = {n.letters for n in iter_paths(aut, 9)}
        for node in iter_paths(aut, 10):
            assert node.length == decoded_length(node.letters)
            assert node.letters[:-1] in shorter
            assert aut.run(node.letters) == node.state

    def test_depth_cap(self, config):
        config.depth_cap = 5
        with pytest.raises(LimitExceeded):
            list(iter_paths(default_automaton(), 6))

    def test_walker_buffer_holds_decoding(self):
        walker = PathWalker(default_automaton(), 1 << 10)
        checked = 0
        for node in walker.walk(8):
            if not node.letters or node.letters.endswith("0"):
                continue
            expected = fbe_decode(FifePath(node.letters, "0", 0), 1 << 10).bits[:node.length]
            assert np.array_equal(walker.decoded(node), expected[:min(node.length, 1 << 10)])
            checked += 1
        assert checked > 100

    def test_walk_from_root(self):
        walker = PathWalker(default_automaton(), 64)
        nodes = list(walker.walk(3, root="2"))
        assert nodes[0].letters == "2"
        assert all(n.letters.startswith("2") for n in nodes)
        with pytest.raises(InvalidPath):
            list(walker.walk(3, root="22"))

    def test_enumerated_prefixes_are_overlap_free(self):
        walker = PathWalker(default_automaton(), 1 << 12)
        for node in walker.walk(10):
            assert is_overlap_free("".join(map(str, walker.decoded(node)[:256])))


class TestFamilies:
    @pytest.mark.parametrize("text,expected", [
        ("1(3)", True),
        ("2(31)", True),
        ("0^5 4(13)", True),
        ("(2)", False),
        ("(0)@0", False),
        ("3(0)@1", True),
        ("2313(0)@0", True),
        ("23103(1)", True),
    ])
    def test_membership(self, text, expected):
        assert in_generalized_family(FifePath.parse(text)) is expected

    def test_names(self):
        assert matching_families(FifePath.parse("2(31)")) == ["edge-words"]
        assert "zero-tail" in matching_families(FifePath.parse("1(0)@0"))
        assert {f.name for f in GENERALIZED_FAMILIES} == {
            "zero-tail", "edge-words", "edge-then-zero", "two-odd-letters"}

    @pytest.mark.parametrize("text", ["1(0)@0", "01(0)@1", "0003(0)@1", "0^2 3(0)@0"])
    def test_zero_tail_allows_leading_zeros(self, text):
        path = FifePath.parse(text)
        assert "zero-tail" in matching_families(path)
        assert classify_path(path) == CaseTag.CASE1

    def test_leading_zeros_alone(self):
        assert matching_families(FifePath.parse("01(0)@1")) == ["zero-tail"]
