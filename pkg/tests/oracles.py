"""Independent reference computations used by the tests.

Nothing here calls into the package's measure kernels: Gauss masses are
integrated directly from cylinder endpoints, tails come from the Möbius
image of a half-line, and beta-shift facts come from brute force.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np

CTX = mpmath.MPContext()
CTX.prec = 160


def convergents(word):
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in word:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return p, q, p_prev, q_prev


def interval_gauss(lo: Fraction, hi: Fraction):
    """Gauss mass of ``[lo, hi]``, ``(1/log 2) log((1+hi)/(1+lo))``."""
    lo, hi = min(lo, hi), max(lo, hi)
    r = (1 + hi) / (1 + lo)
    return CTX.log(CTX.mpf(r.numerator) / r.denominator) / CTX.ln2


def cf_interval(word):
    p, q, pp, qp = convergents(word)
    return Fraction(p, q), Fraction(p + pp, q + qp)


def gauss(word):
    if not word:
        return CTX.one
    return interval_gauss(*cf_interval(word))


def gauss_right_tail(prefix, lo: int):
    """Mass of ``prefix`` followed by any digit ``>= lo``.

    Those points are ``(p + t p') / (q + t q')`` with ``t`` in ``(0, 1/lo)``,
    one interval.
    """
    p, q, pp, qp = convergents(prefix)
    return interval_gauss(Fraction(p, q), Fraction(lo * p + pp, lo * q + qp))


def gauss_collapsed(word, i: int, cap: int = 60):
    """Brute-force truncated Gauss mass: positions holding ``i`` range over ``a >= i``.

    Explicit summation up to ``cap``; beyond it a closed tail (last
    position) or an ``nsum`` of explicit cylinders (earlier positions).
    """
    if any(a > i for a in word):
        return CTX.zero
    if i < 8:
        return gauss(word)

    def rec(prefix, rest):
        if not rest:
            return gauss(prefix)
        d, rest = rest[0], rest[1:]
        if d != i:
            return rec(prefix + (d,), rest)
        if not rest:
            return gauss_right_tail(prefix, i)
        head = CTX.fsum(rec(prefix + (a,), rest) for a in range(i, cap + 1))
        tail = CTX.nsum(lambda a: rec(prefix + (int(a),), rest), [cap + 1, CTX.inf])
        return head + tail

    return rec((), tuple(word))


def lueroth_digit(t: int, stage=None) -> Fraction:
    if t < 2:
        return Fraction(0)
    if stage is None or t <= stage + 1:
        return Fraction(1, t * (t - 1))
    return Fraction(1, stage + 1) if t == stage + 2 else Fraction(0)


def fibonacci(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def golden_admissible(word) -> bool:
    """Golden-ratio beta-shift: no two consecutive ones."""
    return all(not (a == 1 and b == 1) for a, b in zip(word, word[1:])) and all(d in (0, 1) for d in word)


def binary_words(n: int):
    return itertools.product((0, 1), repeat=n)


def naive_count(word, block) -> int:
    word, block = tuple(word), tuple(block)
    k = len(block)
    return sum(1 for s in range(len(word) - k + 1) if word[s:s + k] == block)


def golden_frequency_mc(prefix, samples: int = 200_000, steps: int = 60, burn: int = 20,
                        seed: int = 7) -> float:
    """Birkhoff estimate of the invariant frequency of a digit prefix under ``x -> beta x mod 1``."""
    beta = (1 + math.sqrt(5)) / 2
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    k = len(prefix)
    hits = 0
    total = 0
    history = []
    for step in range(steps + k):
        y = beta * x
        d = np.floor(y).astype(np.int8)
        x = y - d
        history.append(d)
        if step >= burn + k - 1:
            ok = np.ones(samples, dtype=bool)
            for h, want in enumerate(prefix):
                ok &= history[step - k + 1 + h] == want
            hits += int(ok.sum())
            total += samples
    return hits / total
