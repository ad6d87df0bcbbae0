import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from munormal.blocks import (CapacityError, build_block, check_normal, empirical_epsilon,
                             enumerate_pool, epsilon_bound, occurrence_lower_bound)
from munormal.languages import GOLDEN, beta_shift, full_shift
from munormal.measures import LuerothMeasure, ParryMeasure, QaryMeasure, min_cylinder_measure

BINARY = full_shift(2)
UNIFORM2 = QaryMeasure(2)


def digits(text):
    return tuple(int(c) for c in text)


# --- pool ---------------------------------------------------------------------

@pytest.mark.parametrize("base, window, expected", [
    (2, 2, ["00", "01", "10", "11"]),
    (3, 1, ["0", "1", "2"]),
])
def test_enumerate_pool(base, window, expected):
    assert enumerate_pool(BINARY, base, window) == [digits(w) for w in expected]


def test_enumerate_pool_offset_and_cap():
    assert enumerate_pool(None, 2, 1, offset=2) == [(2,), (3,)]
    with pytest.raises(CapacityError):
        enumerate_pool(BINARY, 2, 60)


# --- construction -----------------------------------------------------------

@pytest.mark.parametrize("M, expected", [(2, "01"), (3, "0011")])
def test_build_block_binary_examples(M, expected):
    blk = build_block(BINARY, UNIFORM2, 2, 1, M)
    assert blk.as_word() == digits(expected)


def test_build_block_golden_window_two():
    lang, mu = beta_shift(GOLDEN), ParryMeasure(GOLDEN)
    M = math.ceil(1 / float(min_cylinder_measure(mu, lang, 2)))
    blk = build_block(lang, mu, 2, 2, M)
    assert (1, 1) not in blk.copies
    assert set(blk.copies) == {(0, 0), (0, 1), (1, 0)}
    assert lang.is_admissible(blk.as_word())


def test_build_block_rejects_small_weight():
    with pytest.raises(ValueError):
        build_block(BINARY, UNIFORM2, 2, 3, 7)  # 1/m_3 = 8


def test_build_block_memory_cap():
    with pytest.raises(CapacityError):
        build_block(BINARY, UNIFORM2, 2, 4, 16 * 100, memory_cap=1000)


def test_build_block_is_deterministic():
    lang, mu = beta_shift(GOLDEN), ParryMeasure(GOLDEN)
    a = build_block(lang, mu, 2, 4, 200)
    b = build_block(lang, mu, 2, 4, 200)
    assert np.array_equal(a.word, b.word)


def test_lueroth_pool_remaps_digits():
    blk = build_block(full_shift(None, min_digit=2), LuerothMeasure(stage=1), 2, 2, 4, offset=2)
    assert set(blk.as_word()) == {2, 3}
    assert blk.copies[(2, 2)] == 1


# --- certificate --------------------------------------------------------------

def test_epsilon_bound_examples():
    eps = epsilon_bound(2, 4, 2 ** 8 * 10, 0, 2, Fraction(1, 4))
    assert eps == pytest.approx(0.25 + 16 / 2576, abs=1e-12)
    assert epsilon_bound(2, 1, 100, 0, 1, Fraction(1, 2)) == pytest.approx(0.04)


def test_epsilon_bound_limit_and_errors():
    assert epsilon_bound(2, 5, 1e15, 0, 5, Fraction(1, 32)) == pytest.approx(4 / 5, abs=1e-9)
    with pytest.raises(ValueError):
        epsilon_bound(2, 2, 100, 0, 3, Fraction(1, 8))


@pytest.mark.parametrize("word, eps, k, expected", [
    ("01", 0.5, 1, True),
    ("000", 0.1, 1, False),
    # "10" never occurs in 0011, so the lower inequality fails for it
    ("0011", 0.9, 2, False),
    ("0011", 0.9, 1, True),
])
def test_check_normal_examples(word, eps, k, expected):
    report = check_normal(digits(word), eps, k, UNIFORM2)
    assert report.passed is expected


def test_check_normal_reports_violations():
    report = check_normal(digits("000"), 0.1, 1, UNIFORM2)
    assert [v.block for v in report.violations] == [(0,), (1,)]  # 3 > 1.5 * 1.1 as well
    report = check_normal(digits("0011"), 0.9, 2, UNIFORM2)
    assert [v.block for v in report.violations] == [(1, 0)]
    assert report.violations[0].count == 0


def test_check_normal_is_exact_at_the_boundary():
    # expected count of "0" is exactly 2 and 2(1 - 1/2) = 1 is attained
    assert check_normal(digits("0111"), 0.5, 1, UNIFORM2).passed
    assert not check_normal(digits("0111"), Fraction(1, 2) - Fraction(1, 10 ** 12), 1, UNIFORM2).passed


def _grid():
    for base in (2, 3):
        for window in range(1, 6):
            for factor in (1, 4, 16, 64):
                yield "uniform", base, window, factor
                yield "lueroth", base, window, factor
    for window in range(1, 6):
        for factor in (1, 4, 16, 64):
            yield "golden", 2, window, factor


def _setup(kind, base):
    if kind == "uniform":
        return full_shift(base), QaryMeasure(base), 0
    if kind == "lueroth":
        return full_shift(None, min_digit=2), LuerothMeasure(stage=base - 1), 2
    return beta_shift(GOLDEN), ParryMeasure(GOLDEN), 0


def _build(kind, base, window, factor):
    lang, mu, offset = _setup(kind, base)
    m_w = min(mu.mass(p) for p in enumerate_pool(lang, base, window, offset=offset) if mu.mass(p) > 0)
    M = factor * math.ceil(1 / m_w if isinstance(m_w, Fraction) else 1 / float(m_w) * (1 + 1e-12))
    return build_block(lang, mu, base, window, M, offset=offset)


GRID = list(_grid())


@pytest.mark.parametrize("kind, base, window, factor", GRID,
                         ids=[f"{k}-b{b}-w{w}-x{f}" for k, b, w, f in GRID])
def test_certificate_soundness(kind, base, window, factor):
    blk = _build(kind, base, window, factor)
    lo, hi = blk.length_bounds()
    assert lo <= len(blk) <= hi
    assert blk.language.is_admissible(blk.as_word())
    for k in range(1, window + 1):
        eps = blk.certificate(k)
        report = check_normal(blk.word, eps, k, blk.measure)
        assert report.passed, (k, eps, report.violations[:3])


@pytest.mark.parametrize("base, window, factor", [(2, 3, 1), (2, 4, 4), (3, 3, 2), (3, 2, 16)])
def test_occurrence_lower_bound_full_shift(base, window, factor):
    blk = _build("uniform", base, window, factor)
    word = blk.as_word()
    for k in range(1, window + 1):
        for b in enumerate_pool(None, base, k):
            assert oracles.naive_count(word, b) >= occurrence_lower_bound(blk, b)


def test_empirical_epsilon_below_certificate():
    blk = _build("uniform", 2, 5, 4)
    assert empirical_epsilon(blk.word, 3, blk.measure) <= blk.certificate(3)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(1, 4), st.integers(1, 5), st.sampled_from(["uniform", "lueroth", "golden"]))
def test_certificate_soundness_property(base, window, factor, kind):
    if kind == "golden":
        base = 2
    blk = _build(kind, base, window, factor)
    k = window
    assert check_normal(blk.word, blk.certificate(k), k, blk.measure).passed
