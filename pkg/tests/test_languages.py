import itertools
import json
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

import oracles
from munormal.languages import (GOLDEN, GOLDEN_SQUARED, ParryData, ParryDataError, beta_shift,
                                count_admissible, full_shift)
from munormal.numerals import beta_digits


@pytest.fixture(scope="module")
def golden():
    return beta_shift(GOLDEN)


@pytest.fixture(scope="module")
def golden_sq():
    return beta_shift(GOLDEN_SQUARED)


def test_full_shift_basics():
    binary = full_shift(2)
    assert binary.is_admissible((1, 1))
    assert binary.padding((1, 0, 0, 1), (1, 0, 1, 0)) == ()
    assert binary.j == 0
    assert not binary.is_admissible((2,))
    cf = full_shift(None, min_digit=1)
    assert cf.is_admissible((17, 3, 1))
    assert not cf.is_admissible((0,))


@pytest.mark.parametrize("word, expected", [
    ("10011010", False),
    ("0101", True),
    ("11", False),
    ("", True),
    ("1010101", True),
])
def test_golden_admissibility(golden, word, expected):
    assert golden.is_admissible(word) is expected


def test_golden_padding_example(golden):
    u = golden.padding("1001", "1010")
    assert u == (0,)
    assert golden.concat("1001", "1010") == tuple(int(c) for c in "100101010")


def test_golden_parry_data(golden):
    assert GOLDEN.t == 2 and GOLDEN.p == 0 and golden.j == 2
    assert GOLDEN.quasi_greedy(6) == (1, 0, 1, 0, 1, 0)
    assert GOLDEN_SQUARED.quasi_greedy(4) == (2, 1, 1, 1)
    assert float(GOLDEN.beta(64)) == pytest.approx((1 + 5 ** 0.5) / 2, abs=1e-15)
    assert float(GOLDEN_SQUARED.beta(64)) == pytest.approx((3 + 5 ** 0.5) / 2, abs=1e-15)


@pytest.mark.parametrize("n, expected", [(3, 5), (5, 13)])
def test_count_admissible_golden(golden, n, expected):
    assert count_admissible(golden, n) == expected


def test_count_admissible_is_fibonacci(golden):
    for n in range(0, 13):
        brute = sum(1 for w in oracles.binary_words(n) if oracles.golden_admissible(w))
        assert count_admissible(golden, n) == brute == oracles.fibonacci(n + 2)


def test_count_admissible_full_and_unbounded():
    assert count_admissible(full_shift(2), 4) == 16
    with pytest.raises(ValueError):
        count_admissible(full_shift(None, min_digit=1), 2)


def test_parry_criterion_matches_forbidden_factor(golden):
    for n in range(0, 13):
        for w in oracles.binary_words(n):
            expected = oracles.golden_admissible(w)
            assert golden.is_admissible(w) is expected
            assert golden.parry_criterion(w) is expected


def test_parry_criterion_matches_automaton_second_number(golden_sq):
    for n in range(0, 8):
        for w in itertools.product((0, 1, 2), repeat=n):
            assert golden_sq.is_admissible(w) is golden_sq.parry_criterion(w)


def test_factor_closure(golden):
    for n in range(1, 9):
        for w in golden.words(n):
            for a in range(n):
                for b in range(a + 1, n + 1):
                    assert golden.is_admissible(w[a:b])


def _admissible_upto(lang, n):
    for m in range(1, n + 1):
        yield from lang.words(m)


def test_padding_joins_all_short_golden_pairs(golden):
    words = list(_admissible_upto(golden, 6))
    for a in words:
        for b in words:
            u = golden.padding(a, b)
            assert len(u) <= golden.j
            assert set(u) <= {0}
            assert golden.is_admissible(a + u + b)


def test_padding_is_shortest(golden):
    words = list(_admissible_upto(golden, 4))
    for a in words:
        for b in words:
            u = golden.padding(a, b)
            for r in range(len(u)):
                assert not golden.is_admissible(a + (0,) * r + b) or _chain_breaks(golden, a, r, b)


def _chain_breaks(lang, a, r, b):
    # a shorter padding may be admissible yet leave the automaton in a state
    # that a later word could not follow; padding() rejects those
    return lang.end_state(a + (0,) * r + b) != lang.end_state(b)


def test_padding_joins_pairs_second_parry_number(golden_sq):
    words = list(_admissible_upto(golden_sq, 4))
    for a in words:
        for b in words:
            u = golden_sq.padding(a, b)
            assert len(u) <= golden_sq.j
            assert golden_sq.is_admissible(a + u + b)


def test_chained_concatenation_stays_admissible(golden):
    rng = random.Random(3)
    words = list(_admissible_upto(golden, 6))
    for _ in range(200):
        chain = [rng.choice(words) for _ in range(rng.randint(2, 8))]
        assert golden.is_admissible(golden.concat(*chain))


def test_second_parry_number_against_greedy_expansions(golden_sq):
    rng = random.Random(11)
    seen = set()
    with mpmath.workprec(200):
        for _ in range(4000):
            x = mpmath.mpf(rng.random())
            digits = tuple(beta_digits(x, GOLDEN_SQUARED, 5, precision=200))
            assert golden_sq.is_admissible(digits)
            seen.add(digits)
    assert seen == set(golden_sq.words(5))


def test_parry_data_json_round_trip():
    text = GOLDEN_SQUARED.to_json()
    assert json.loads(text) == {"preperiod": [2], "period": [1]}
    assert ParryData.from_json(text) == GOLDEN_SQUARED
    assert ParryData.from_json({"preperiod": [1, 1]}) == GOLDEN


@pytest.mark.parametrize("pre, per", [
    ((1, 2), ()),       # shift exceeds d(1)
    ((0, 1), ()),       # leading zero
    ((1, 0), ()),       # finite expansion ending in zero
    ((1,), (1,)),       # preperiod not minimal
])
def test_invalid_parry_data_rejected(pre, per):
    with pytest.raises(ParryDataError):
        ParryData(pre, per).validate()


@given(st.lists(st.sampled_from([0, 1]), max_size=20))
def test_golden_automaton_equals_no_double_one(word):
    assert beta_shift(GOLDEN).is_admissible(word) is oracles.golden_admissible(word)


@given(st.lists(st.sampled_from([0, 1]), min_size=1, max_size=8),
       st.lists(st.sampled_from([0, 1]), min_size=1, max_size=8))
def test_padding_property(a, b):
    lang = beta_shift(GOLDEN)
    if not (lang.is_admissible(a) and lang.is_admissible(b)):
        return
    u = lang.padding(a, b)
    assert len(u) <= 2 and lang.is_admissible(tuple(a) + u + tuple(b))
    assert lang.end_state(tuple(a) + u + tuple(b)) == lang.end_state(b)
