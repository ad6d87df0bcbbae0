"""Shift-invariant cylinder measures for the four numeration systems.

Every measure maps a finite word ``b`` to ``mu(b) = mu(c(b))``.  Rational
families (uniform q-ary, Lüroth and its truncations) return exact
:class:`fractions.Fraction` values from :meth:`CylinderMeasure.mass`; the
Gauss and Parry measures return mpmath floats at the working precision.
Calling a measure returns a plain float.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .languages import BetaShift, ParryData, ShiftLanguage, beta_shift
from .words import Word, WordLike, as_word, make_context, working_precision

# nu_i = mu below this stage in the continued-fraction family
CF_COLLAPSE_STAGE = 8

MAX_ENUM_LENGTH = 8
MAX_ENUM_ALPHABET = 64


class CylinderMeasure:
    """Base class.

    Subclasses implement :meth:`mass`.  ``support`` is the finite digit set
    carrying the measure, or None for an unbounded support.
    """

    system = "abstract"
    support: Optional[tuple] = None
    name = "measure"

    def mass(self, word: WordLike):
        raise NotImplementedError

    def __call__(self, word: WordLike) -> float:
        return float(self.mass(as_word(word)))

    def is_admissible(self, word: WordLike) -> bool:
        return self.mass(as_word(word)) > 0

    def min_mass_bound(self, k: int):
        """Analytic lower bound for the smallest positive mass at length k."""
        return None

    def __repr__(self) -> str:
        return self.name


class QaryMeasure(CylinderMeasure):
    """Uniform Bernoulli measure on ``{0, ..., q-1}``."""

    system = "qary"

    def __init__(self, q: int):
        if q < 2:
            raise ValueError("q must be >= 2")
        self.q = q
        self.support = tuple(range(q))
        self.name = f"uniform({q})"

    def mass(self, word: WordLike) -> Fraction:
        word = as_word(word)
        if any(d < 0 or d >= self.q for d in word):
            return Fraction(0)
        return Fraction(1, self.q ** len(word))


def _lueroth_digit(t: int, stage: Optional[int]) -> Fraction:
    if t < 2:
        return Fraction(0)
    if stage is None or t <= stage + 1:
        return Fraction(1, t * (t - 1))
    if t == stage + 2:
        return Fraction(1, stage + 1)
    return Fraction(0)


class LuerothMeasure(CylinderMeasure):
    """Lüroth digit law ``1/(t(t-1))`` as a product measure.

    With ``stage=i`` the law is truncated: digits ``2..i+1`` keep their
    mass and the remainder ``1/(i+1)`` is lumped on ``i+2``.
    """

    system = "lueroth"

    def __init__(self, stage: Optional[int] = None):
        if stage is not None and stage < 1:
            raise ValueError("stage must be >= 1")
        self.stage = stage
        self.support = None if stage is None else tuple(range(2, stage + 3))
        self.name = "lueroth" if stage is None else f"lueroth[{stage}]"

    def mass(self, word: WordLike) -> Fraction:
        out = Fraction(1)
        for t in as_word(word):
            out *= _lueroth_digit(t, self.stage)
            if not out:
                break
        return out

    def tail_mass(self, lo: int) -> Fraction:
        """Mass of the single-digit event ``digit >= lo``."""
        if self.stage is None:
            return Fraction(1, max(lo, 2) - 1)
        return sum((_lueroth_digit(t, self.stage) for t in range(max(lo, 2), self.stage + 3)), Fraction(0))


def continuants(word: Sequence[int]):
    """``(p_k, q_k, p_{k-1}, q_{k-1})`` for ``[0; a_1, ..., a_k]``."""
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in word:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
    return p, q, p_prev, q_prev


def cylinder_interval(word: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Closure of the continued-fraction cylinder ``Delta_b`` as exact endpoints."""
    p, q, pp, qp = continuants(word)
    a = Fraction(p, q)
    b = Fraction(p + pp, q + qp)
    return (a, b) if a <= b else (b, a)


class GaussMeasure(CylinderMeasure):
    """Gauss measure ``(1/log 2) dx/(1+x)`` on continued-fraction cylinders.

    With ``stage=i`` this is the approximating measure: zero on words with a
    digit above ``i``; for ``i >= 8`` every position holding ``i`` stands for
    the event "digit >= i".  Those events are evaluated in closed form (see
    :meth:`pattern_mass`).
    """

    system = "cf"

    def __init__(self, stage: Optional[int] = None, bits: Optional[int] = None):
        if stage is not None and stage < 1:
            raise ValueError("stage must be >= 1")
        self.stage = stage
        self.ctx = make_context(bits)
        self.support = None if stage is None else tuple(range(1, stage + 1))
        self.name = "gauss" if stage is None else f"gauss[{stage}]"
        self._pattern = lru_cache(maxsize=200_000)(self._pattern_uncached)

    def cylinder_mass(self, word: Word):
        ctx = self.ctx
        if not word:
            return ctx.one
        lo, hi = cylinder_interval(word)
        ratio = (1 + hi) / (1 + lo) - 1
        return ctx.log1p(ctx.mpf(ratio.numerator) / ratio.denominator) / ctx.ln2

    def mass(self, word: WordLike):
        word = as_word(word)
        if any(a <= 0 for a in word):
            raise ValueError(f"continued-fraction digits must be >= 1: {word}")
        i = self.stage
        if i is None:
            return self.cylinder_mass(word)
        if any(a > i for a in word):
            return self.ctx.zero
        if i < CF_COLLAPSE_STAGE or i not in word:
            return self.cylinder_mass(word)
        return self.pattern_mass(tuple((a, None) if a == i else (a, a) for a in word))

    def pattern_mass(self, constraints: Sequence[tuple]):
        """Mass of ``{x : lo_n <= a_n(x) <= hi_n}``; ``hi=None`` means unbounded.

        Only single digits ``(a, a)`` and half-lines ``(lo, None)`` are
        supported.
        """
        cons = tuple((int(lo), None if hi is None else int(hi)) for lo, hi in constraints)
        for lo, hi in cons:
            if lo < 1 or (hi is not None and hi != lo):
                raise ValueError(f"unsupported constraint {(lo, hi)}")
        return self._pattern(cons)

    def _pattern_uncached(self, cons):
        ctx = self.ctx
        if not cons:
            return ctx.one
        free = [n for n, (_, hi) in enumerate(cons) if hi is None]
        if not free:
            return self.cylinder_mass(tuple(lo for lo, _ in cons))
        # half-lines at either end: complement against the shift-invariant marginal
        if free[0] == 0:
            lo, rest = cons[0][0], cons[1:]
            return self._pattern(rest) - ctx.fsum(self._pattern(((c, c),) + rest) for c in range(1, lo))
        if free[-1] == len(cons) - 1:
            lo, rest = cons[-1][0], cons[:-1]
            return self._pattern(rest) - ctx.fsum(self._pattern(rest + ((c, c),)) for c in range(1, lo))
        n = free[0]
        if len(free) == 1:
            prefix = tuple(lo for lo, _ in cons[:n])
            suffix = tuple(lo for lo, _ in cons[n + 1:])
            return self._interior_tail(prefix, cons[n][0], suffix)
        # several interior half-lines: sum the leftmost one explicitly
        head, tail = cons[:n], cons[n + 1:]
        return ctx.nsum(lambda a: self._pattern(head + ((int(a), int(a)),) + tail), [cons[n][0], ctx.inf])

    def _interior_tail(self, prefix: Word, lo: int, suffix: Word):
        """Mass of ``prefix · (digit >= lo) · suffix`` via log-gamma.

        With ``M`` the Möbius map of the prefix convergents, the event is
        ``M(1/(a + y))`` for ``a >= lo`` and ``y`` in the suffix cylinder
        ``(c, d)``.  Each term is a difference of logs whose sum over ``a``
        telescopes into a ratio of gamma functions.
        """
        ctx = self.ctx
        p, q, pp, qp = continuants(prefix)
        c, d = cylinder_interval(suffix) if suffix else (Fraction(0), Fraction(1))
        s = Fraction(qp + pp, q + p)
        r = Fraction(qp, q)

        def lg(x: Fraction):
            return ctx.loggamma(ctx.mpf(x.numerator) / x.denominator)

        total = lg(lo + c + s) + lg(lo + d + r) - lg(lo + d + s) - lg(lo + c + r)
        return abs(total) / ctx.ln2

    def min_mass_bound(self, k: int):
        # all-i word maximises the continuants among words with digits <= i
        if self.stage is None:
            return None
        _, q, _, qp = continuants([self.stage] * k)
        return self.ctx.one / (2 * self.ctx.ln2 * q * (q + qp))


class ParryMeasure(CylinderMeasure):
    """Parry measure of the beta-map for a Parry number.

    The invariant density is ``h(x) = sum_{n >= 0} beta^-n [x < T^n(1)]``,
    piecewise constant with breakpoints on the orbit of 1; the periodic
    part of the orbit is summed as a geometric series.
    """

    system = "beta"

    def __init__(self, data: ParryData, bits: Optional[int] = None):
        self.data = data
        self.language: BetaShift = beta_shift(data)
        self.support = data.alphabet
        bits = bits or working_precision()
        self.ctx = make_context(bits)
        ctx = self.ctx
        beta = data.beta(bits)
        self.beta = ctx.mpf(beta)
        inv = 1 / self.beta
        t, p = data.t, data.p
        self._breaks = [ctx.mpf(data.orbit(n, bits)) for n in range(t + p)]
        weights = []
        for n in range(t + p):
            w = inv ** n
            if n >= t:
                w /= 1 - inv ** p
            weights.append(w)
        self._weights = weights
        self._norm = ctx.fsum(w * b for w, b in zip(weights, self._breaks))
        self.name = f"parry{data.preperiod}{data.period}"

    def cylinder(self, word: WordLike):
        """``(left, length)`` of the cylinder of an admissible word, or None."""
        ctx = self.ctx
        word = as_word(word)
        state = 0
        inv = 1 / self.beta
        left = ctx.zero
        scale = ctx.one
        for d in word:
            state = self.language.step(state, d)
            if state is None:
                return None
            scale *= inv
            left += d * scale
        return left, scale * self._breaks[state]

    def min_mass_bound(self, k: int):
        # cylinder length >= beta^-k min_s T^s(1); density >= its value just below 1
        return self.beta ** (-k) * min(self._breaks) * self._weights[0] / self._norm

    def density(self, x) -> float:
        return float(self.ctx.fsum(w for w, b in zip(self._weights, self._breaks) if x < b) / self._norm)

    def mass(self, word: WordLike):
        ctx = self.ctx
        cyl = self.cylinder(word)
        if cyl is None:
            return ctx.zero
        left, length = cyl
        right = left + length
        total = ctx.zero
        for w, b in zip(self._weights, self._breaks):
            overlap = min(right, b) - left
            if overlap > 0:
                total += w * overlap
        return total / self._norm


# functional surface ---------------------------------------------------------


def measure_qary(q: int, b: WordLike) -> Fraction:
    return QaryMeasure(q).mass(b)


def measure_lueroth(b: WordLike) -> Fraction:
    return LuerothMeasure().mass(b)


def measure_lueroth_truncated(i: int, b: WordLike) -> Fraction:
    return LuerothMeasure(stage=i).mass(b)


@lru_cache(maxsize=None)
def _gauss(stage):
    return GaussMeasure(stage)


def measure_gauss(b: WordLike) -> float:
    return float(_gauss(None).mass(b))


def measure_gauss_truncated(i: int, b: WordLike) -> float:
    return float(_gauss(i).mass(b))


@lru_cache(maxsize=16)
def _parry(data: ParryData):
    return ParryMeasure(data)


def measure_beta(data: ParryData, b: WordLike) -> float:
    return float(_parry(data).mass(b))


def cf_min_measure_bound(i: int) -> float:
    """Lower bound ``i^(-2i) / 2`` for the smallest stage-i mass, ``i >= 8``."""
    if i < CF_COLLAPSE_STAGE:
        raise ValueError("the bound is only asserted for i >= 8")
    return 0.5 * float(i) ** (-2 * i)


def min_cylinder_measure(nu: CylinderMeasure, language: ShiftLanguage, k: int,
                         max_length: int = MAX_ENUM_LENGTH,
                         max_alphabet: int = MAX_ENUM_ALPHABET):
    """Smallest positive ``nu(b)`` over admissible words of length ``k``.

    Exhaustive when the support is finite and small enough; otherwise falls
    back to the measure's analytic bound, if it has one.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    support = nu.support if nu.support is not None else language.alphabet
    if support is not None and k <= max_length and len(support) <= max_alphabet:
        best = None
        for w in itertools.product(support, repeat=k):
            if not language.is_admissible(w):
                continue
            m = nu.mass(w)
            if m > 0 and (best is None or m < best):
                best = m
        if best is None:
            raise ValueError("no admissible word of positive mass")
        return best
    bound = nu.min_mass_bound(k)
    if bound is None:
        raise ValueError(f"enumeration infeasible for {nu} at k={k} and no analytic bound")
    return bound


class MeasureSequence:
    """Approximating family ``nu_1, nu_2, ...`` converging to a target."""

    def __init__(self, target: CylinderMeasure, factory):
        self.target = target
        self._factory = lru_cache(maxsize=None)(factory)

    def __getitem__(self, i: int) -> CylinderMeasure:
        if i < 1:
            raise IndexError("stages start at 1")
        return self._factory(i)


def lueroth_sequence() -> MeasureSequence:
    return MeasureSequence(LuerothMeasure(), lambda i: LuerothMeasure(stage=i))


def gauss_sequence() -> MeasureSequence:
    return MeasureSequence(GaussMeasure(), lambda i: GaussMeasure(stage=i))


def constant_sequence(mu: CylinderMeasure) -> MeasureSequence:
    return MeasureSequence(mu, lambda i: mu)


def lueroth_digit_mass(t: int) -> float:
    return float(_lueroth_digit(t, None))


def gauss_digit_mass(a: int) -> float:
    """Closed form ``log2(1 + 1/(a(a+2)))`` for a single digit."""
    return math.log1p(1.0 / (a * (a + 2))) / math.log(2)
