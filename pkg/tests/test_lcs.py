import json
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcsvar.lcs import (
    CompartmentDecomposition,
    MatchingPair,
    boundary_segments,
    count_nonempty_matches,
    decompose_compartments,
    enumerate_matches,
    extract_minimal_matching,
    lcs_length,
    lcs_length_bitparallel,
    letters_in_long_compartments,
    match_compartment_spans,
    maximal_matchings,
    minimal_matchings,
)
from lcsvar.oracle import brute_force_lcs_length

words2 = st.lists(st.integers(0, 1), max_size=9)
words3 = st.lists(st.integers(0, 2), max_size=9)


def test_lcs_examples():
    assert lcs_length([0, 1], [0, 1]) == 2
    assert lcs_length([0, 0], [1, 1]) == 0
    assert lcs_length([0, 1, 0, 1], [1, 0, 1, 0]) == 3
    assert lcs_length([], [0, 1]) == 0


def test_bitparallel_examples():
    w = np.arange(200) % 3
    assert lcs_length_bitparallel(w, w) == 200
    assert lcs_length_bitparallel([], [1, 2]) == 0
    assert lcs_length_bitparallel([0, 1], []) == 0


@given(words3, words3)
def test_dp_matches_brute_force(a, b):
    assert lcs_length(a, b) == brute_force_lcs_length(a, b)


@given(st.lists(st.integers(0, 3), max_size=300), st.lists(st.integers(0, 3), max_size=300))
def test_bitparallel_matches_dp(a, b):
    assert lcs_length_bitparallel(a, b) == lcs_length(a, b)


def test_bitparallel_multiword_boundaries():
    rng = np.random.default_rng(3)
    for nb in (63, 64, 65, 127, 128, 129, 1000):
        a = rng.integers(0, 2, 300)
        b = rng.integers(0, 2, nb)
        assert lcs_length_bitparallel(a, b) == lcs_length(a, b)


@given(words3, words3, st.integers(0, 2))
def test_symmetry_and_monotonicity(a, b, c):
    assert lcs_length(a, b) == lcs_length(b, a)
    assert lcs_length(a + [c], b) >= lcs_length(a, b)
    assert lcs_length(a, b + [c]) >= lcs_length(a, b)


def test_matching_pair_validation():
    with pytest.raises(ValueError):
        MatchingPair((1, 1), (1, 2))
    with pytest.raises(ValueError):
        MatchingPair((1,), (1, 2))
    with pytest.raises(ValueError):
        MatchingPair((0,), (1,))
    pair = MatchingPair((1, 3), (2, 5))
    assert MatchingPair.from_json(pair.to_json()) == pair
    assert json.loads(pair.to_json()) == {"pi": [1, 3], "eta": [2, 5]}
    assert pair.is_valid_for([0, 1, 1], [1, 0, 0, 0, 1])
    assert not pair.is_valid_for([0, 1, 0], [1, 0, 0, 0, 1])


def test_partial_order():
    assert MatchingPair((1, 2), (1, 3)) <= MatchingPair((1, 2), (2, 3))
    assert not MatchingPair((1, 3), (1, 2)) <= MatchingPair((1, 2), (2, 3))


def test_minimal_matching_examples():
    pair = extract_minimal_matching([0, 1], [1, 0, 1])
    assert (pair.pi, pair.eta) == ((1, 2), (2, 3))
    assert minimal_matchings([0, 1], [1, 0, 1]) == [pair]
    w = [1, 0, 0, 1, 0]
    pair = extract_minimal_matching(w, w)
    assert pair.pi == pair.eta == (1, 2, 3, 4, 5)
    assert len(extract_minimal_matching([0, 0], [1, 1])) == 0
    assert len(extract_minimal_matching([], [])) == 0


@settings(max_examples=150)
@given(st.lists(st.integers(0, 1), max_size=7), st.lists(st.integers(0, 1), max_size=7))
def test_canonical_pair_is_minimal(a, b):
    pair = extract_minimal_matching(a, b)
    assert len(pair) == lcs_length(a, b)
    assert pair.is_valid_for(a, b)
    others = list(maximal_matchings(a, b))
    assert pair in others
    assert not any(q <= pair and q != pair for q in others)
    assert pair in minimal_matchings(a, b)


def test_canonical_pair_is_lexicographic_min():
    # smallest eta first, then smallest pi, among all maximal pairs
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = rng.integers(0, 2, 8)
        b = rng.integers(0, 2, 8)
        best = min(maximal_matchings(a, b), key=lambda q: (q.eta, q.pi))
        assert extract_minimal_matching(a, b) == best


def test_backtrace_length_cap():
    with pytest.raises(ValueError):
        extract_minimal_matching(np.zeros(5000, np.int64), [0])


def test_matches_examples():
    pair = MatchingPair((1, 2, 3), (1, 2, 3))
    assert all(not m.non_empty for m in enumerate_matches(pair))
    pair = MatchingPair((1, 2), (1, 4))
    (match,) = enumerate_matches(pair)
    assert match.non_empty and list(match.unmatched) == [2, 3]
    assert count_nonempty_matches(pair) == 1
    assert enumerate_matches(MatchingPair((), ())) == []
    with pytest.raises(ValueError):
        enumerate_matches(pair, b_len=3)


def test_disjoint_words_have_no_matches():
    assert count_nonempty_matches(extract_minimal_matching([0, 0, 0], [1, 1])) == 0


def test_boundary_segments():
    lead, tail = boundary_segments(MatchingPair((2,), (3,)), 4, 5)
    assert (lead.pi_i, lead.pi_next, lead.eta_i, lead.eta_next) == (0, 2, 0, 3)
    assert (tail.pi_i, tail.pi_next, tail.eta_i, tail.eta_next) == (2, 5, 3, 6)


def test_compartment_examples():
    d = decompose_compartments([0, 1, 1, 0], 2)
    assert d.boundaries == (1, 3) and d.d == 2
    assert d.intervals() == [(1, 2), (3, 4)]
    assert decompose_compartments([0, 0, 0, 0], 2).d == 1
    with pytest.raises(ValueError):
        decompose_compartments([0, 2], 2)
    assert json.loads(d.to_json()) == {"boundaries": [1, 3], "n": 4}


def test_literal_rule():
    # completing letter opens the next compartment; for m = 2 these are runs
    assert decompose_compartments([0, 1, 1, 0], 2, rule="literal").boundaries == (1, 2, 4)
    assert decompose_compartments([0, 0, 1, 1, 1, 0], 2, rule="literal").boundaries == (1, 3, 6)
    with pytest.raises(ValueError):
        decompose_compartments([0, 1], 2, rule="other")


@given(st.lists(st.integers(0, 2), min_size=1, max_size=40))
def test_compartments_complete_rule(y):
    m = 3
    d = decompose_compartments(y, m)
    assert d.boundaries[0] == 1
    assert sum(d.lengths()) == len(y)
    for i, (start, end) in enumerate(d.intervals()):
        seg = y[start - 1:end]
        if i < d.d - 1:
            # exactly m letters, and no shorter prefix has them all
            assert len(set(seg)) == m
            assert len(set(seg[:-1])) < m
        else:
            assert len(set(seg)) <= m


def test_letters_in_long_compartments():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 2, 60)
    d = decompose_compartments(y, 2)
    assert letters_in_long_compartments(d, 1) == 60
    assert letters_in_long_compartments(d, 61) == 0
    # independent scan: each compartment ends right after the letter completing it
    count, run, seen = 0, 0, set()
    for c in y.tolist():
        run += 1
        seen.add(c)
        if len(seen) == 2:
            count += run if run >= 3 else 0
            run, seen = 0, set()
    count += run if run >= 3 else 0
    assert letters_in_long_compartments(d, 3) == count
    with pytest.raises(ValueError):
        letters_in_long_compartments(d, 0)


def test_compartment_of():
    d = CompartmentDecomposition((1, 3), 5)
    assert d.compartment_of().tolist() == [0, 0, 1, 1, 1]


def test_unmatched_letters_compartment_spans():
    # A match's unmatched letters can straddle two compartments (counterexample
    # to the single-compartment claim), but never more than two on this grid.
    pair = extract_minimal_matching([0, 0], [0, 1, 1, 0])
    assert match_compartment_spans(pair, decompose_compartments([0, 1, 1, 0], 2)) == [2]
    worst = 0
    for a in product(range(2), repeat=4):
        for y in product(range(2), repeat=6):
            spans = match_compartment_spans(extract_minimal_matching(a, y), decompose_compartments(y, 2))
            worst = max([worst] + spans)
    assert worst <= 2


def test_literal_rule_single_compartment_for_two_letters():
    for a in product(range(2), repeat=4):
        for y in product(range(2), repeat=6):
            d = decompose_compartments(y, 2, rule="literal")
            assert all(s <= 1 for s in match_compartment_spans(extract_minimal_matching(a, y), d))


def test_literal_rule_can_straddle_for_three_letters():
    y = [0, 0, 1, 2, 0]
    pair = extract_minimal_matching([0, 0, 0], y)
    assert match_compartment_spans(pair, decompose_compartments(y, 3, rule="literal")) == [0, 2]
