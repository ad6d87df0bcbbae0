"""Digit words to real numbers with certified enclosures.

Each evaluator reads only as many leading digits as the requested precision
can resolve; everything after that is folded into the tail bound.  The
finite-prefix value is enclosed by outward rounding of an exact rational
(q-ary, Lüroth, continued fractions) or by interval arithmetic (beta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from .languages import BetaShift, ParryData, beta_enclosure
from .words import WordLike, as_word, working_precision


@dataclass(frozen=True)
class RealValue:
    """Value of a digit word.

    ``enclosure`` contains the exact value of the digits read; any infinite
    extension of the word lies in ``[lower - tail_below, upper + tail_above]``.
    """

    value: mpmath.mpf
    precision: int
    enclosure: tuple
    tail_below: mpmath.mpf
    tail_above: mpmath.mpf
    digits_used: int

    @property
    def lower(self):
        return self.enclosure[0]

    @property
    def upper(self):
        return self.enclosure[1]

    @property
    def radius(self):
        return (self.upper - self.lower) / 2

    def extension_interval(self) -> tuple:
        with mpmath.workprec(self.precision + 64):
            return (mpmath.fsub(self.lower, self.tail_below, rounding="d"),
                    mpmath.fadd(self.upper, self.tail_above, rounding="u"))

    def contains(self, x, extension: bool = True) -> bool:
        """Exact membership test for a rational or mpf ``x``."""
        lo, hi = self.extension_interval() if extension else self.enclosure
        with mpmath.workprec(self.precision + 64):
            lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        x = Fraction(x) if not isinstance(x, mpmath.mpf) else _exact(x)
        return _exact(lo) <= x <= _exact(hi)

    def __str__(self) -> str:
        with mpmath.workprec(self.precision):
            digits = max(15, int(self.precision * 0.30103))
            return f"{mpmath.nstr(self.value, digits)} +/- {mpmath.nstr(self.radius, 3)}"

    def to_dict(self) -> dict:
        with mpmath.workprec(self.precision):
            digits = max(15, int(self.precision * 0.30103))
            return {"value": mpmath.nstr(self.value, digits), "radius": mpmath.nstr(self.radius, 3),
                    "tail": mpmath.nstr(max(self.tail_below, self.tail_above), 3),
                    "precision": self.precision, "digits_used": self.digits_used}


def _rounded(x: Fraction, prec: int) -> tuple:
    """``(mid, lo, hi)``: outward rounding of a rational to ``prec`` bits.

    Done in integer arithmetic; mpmath would round large operands first.
    """
    x = Fraction(x)
    if x == 0:
        zero = mpmath.mpf(0)
        return zero, zero, zero
    e = prec - (abs(x.numerator).bit_length() - x.denominator.bit_length()) + 1
    num = x.numerator << e if e >= 0 else x.numerator
    den = x.denominator if e >= 0 else x.denominator << -e
    n, rem = divmod(num, den)
    with mpmath.workprec(prec + 8):
        lo = mpmath.ldexp(mpmath.mpf(n), -e)
        hi = mpmath.ldexp(mpmath.mpf(n + 1), -e) if rem else lo
    return lo, lo, hi


def _exact(v) -> Fraction:
    man, exp = (v if isinstance(v, mpmath.mpf) else mpmath.mpf(v)).man_exp
    man, exp = int(man), int(exp)  # gmpy mantissas do not convert exactly
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def _precision(precision: Optional[int]) -> int:
    return working_precision() if precision is None else precision


def qary_value(digits: WordLike, q: int, precision: Optional[int] = None) -> RealValue:
    """``sum d_h q^-h`` with tail ``q^-len`` for the unread digits."""
    prec = _precision(precision)
    word = as_word(digits)
    if any(d < 0 or d >= q for d in word):
        raise ValueError(f"digits must lie in 0..{q - 1}")
    keep = min(len(word), math.ceil((prec + 2) / math.log2(q)) + 1)
    num = 0
    for d in word[:keep]:
        num = num * q + d
    exact = Fraction(num, q ** keep)
    mid, lo, hi = _rounded(exact, prec)
    _, _, tail = _rounded(Fraction(1, q ** keep), prec)
    return RealValue(mid, prec, (lo, hi), mpmath.mpf(0), tail, keep)


def lueroth_value(digits: WordLike, precision: Optional[int] = None) -> RealValue:
    """``1/a_1 + sum_{n>=2} (prod_{t<n} 1/(a_t(a_t-1))) / a_n``."""
    prec = _precision(precision)
    word = as_word(digits)
    if any(a < 2 for a in word):
        raise ValueError("Lüroth digits must be >= 2")
    total = Fraction(0)
    scale = Fraction(1)
    used = 0
    cutoff = Fraction(1, 2 ** (prec + 2))
    for a in word:
        total += scale / a
        scale /= a * (a - 1)
        used += 1
        if scale < cutoff:
            break
    mid, lo, hi = _rounded(total, prec)
    _, _, tail = _rounded(scale, prec)
    return RealValue(mid, prec, (lo, hi), mpmath.mpf(0), tail, used)


def lueroth_digits(x: Fraction, n: int) -> list:
    """Up to ``n`` Lüroth digits of ``x`` in ``(0, 1]``; stops when the orbit hits 0."""
    x = Fraction(x)
    out = []
    while x > 0 and len(out) < n:
        a = math.floor(1 / x) + 1
        out.append(a)
        x = a * (a - 1) * x - (a - 1)
    return out


def beta_value(digits: WordLike, data: ParryData, precision: Optional[int] = None) -> RealValue:
    """``sum d_n beta^-n`` with beta enclosed from its Parry data."""
    prec = _precision(precision)
    word = as_word(digits)
    if not BetaShift(data).is_admissible(word):
        raise ValueError("digits are not beta-admissible")
    lo_b, hi_b = beta_enclosure(data, prec + 32)
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec + 32
    try:
        pad = mpmath.mpf(2) ** -(prec + 24)
        beta = iv.mpf([lo_b - pad, hi_b + pad])
        keep = min(len(word), math.ceil((prec + 2) / math.log2(float(lo_b))) + 1)
        acc = iv.mpf(0)
        for d in reversed(word[:keep]):
            acc = (acc + d) / beta
        # admissible tails satisfy sum_{n>K} d_n beta^-n < beta^-K
        tail = (1 / beta) ** keep if keep else iv.mpf(1)
        lo, hi = (mpmath.mp.make_mpf(v) for v in acc._mpi_)
        tail_hi = mpmath.mp.make_mpf(tail._mpi_[1])
        with mpmath.workprec(iv.prec):
            mid = (lo + hi) / 2
    finally:
        iv.prec = old
    return RealValue(mid, prec, (lo, hi), mpmath.mpf(0), tail_hi, keep)


def beta_digits(x, data: ParryData, n: int, precision: Optional[int] = None) -> list:
    """Greedy digits ``d_k = floor(beta r_{k-1})`` of ``x`` in ``[0, 1)``."""
    prec = _precision(precision) + 4 * n
    with mpmath.workprec(prec):
        beta = mpmath.mpf(data.beta(prec))
        r = _rounded(x, prec)[0] if isinstance(x, Fraction) else mpmath.mpf(x)
        out = []
        for _ in range(n):
            y = beta * r
            d = int(mpmath.floor(y))
            out.append(d)
            r = y - d
    return out


def cf_value(digits: WordLike, precision: Optional[int] = None) -> RealValue:
    """Convergent ``p_k / q_k`` with tail ``1/q_k^2``."""
    prec = _precision(precision)
    word = as_word(digits)
    if any(a < 1 for a in word):
        raise ValueError("continued-fraction digits must be >= 1")
    p_prev, q_prev, p, q = 1, 0, 0, 1
    used = 0
    for a in word:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        used += 1
        if q.bit_length() > prec // 2 + 2:
            break
    mid, lo, hi = _rounded(Fraction(p, q), prec)
    _, _, tail = _rounded(Fraction(1, q * q), prec)
    return RealValue(mid, prec, (lo, hi), tail, tail, used)


def cf_digits(x: Fraction, n: Optional[int] = None) -> list:
    """Continued-fraction digits of a rational in ``(0, 1)`` (Euclid)."""
    x = Fraction(x)
    out = []
    while x and (n is None or len(out) < n):
        x = 1 / x
        a = math.floor(x)
        out.append(a)
        x -= a
    return out


def value_of(system: str, digits: Sequence[int], *, q: int = 10, data: Optional[ParryData] = None,
             precision: Optional[int] = None) -> RealValue:
    if system == "qary":
        return qary_value(digits, q, precision)
    if system == "lueroth":
        return lueroth_value(digits, precision)
    if system == "beta":
        if data is None:
            raise ValueError("beta values need Parry data")
        return beta_value(digits, data, precision)
    if system == "cf":
        return cf_value(digits, precision)
    raise ValueError(f"unknown system {system!r}")
