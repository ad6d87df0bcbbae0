"""Weighted pool concatenations and their (eps, k)-normality certificates.

The block for base ``b``, window ``w`` and weight ``M`` lists every word of
length ``w`` over ``b`` symbols in lexicographic order and repeats each one
``ceil(M * mu(p))`` times, joined with the language's padding.  Such a block
is provably (eps, k)-normal for the eps returned by :func:`epsilon_bound`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .counting import _census, as_digits
from .languages import ShiftLanguage
from .measures import CylinderMeasure, min_cylinder_measure
from .words import Word, WordLike, as_word

POOL_CAP = 1 << 20
MEMORY_CAP = 1 << 27  # digits per block


class CapacityError(ValueError):
    """A configured resource guard was exceeded."""


def enumerate_pool(language: Optional[ShiftLanguage], base: int, window: int, *,
                   offset: int = 0, cap: int = POOL_CAP) -> list:
    """All ``base**window`` words over ``offset .. offset+base-1``, lexicographic.

    Inadmissible words are kept; they get zero copies downstream.
    ``language`` is accepted for symmetry with :func:`build_block` and is not
    consulted.
    """
    if base < 2 or window < 1:
        raise ValueError("need base >= 2 and window >= 1")
    if base ** window > cap:
        raise CapacityError(f"pool of {base}^{window} words exceeds the cap of {cap}")
    digits = range(offset, offset + base)
    return list(itertools.product(digits, repeat=window))


def _ceil_product(M, mass) -> int:
    """Exact ``ceil(M * mass)``; rational when both are, else 20 guard digits."""
    if isinstance(mass, Fraction) or isinstance(mass, int):
        return math.ceil(Fraction(M) * mass)
    with mpmath.workprec(max(mpmath.mp.prec, getattr(getattr(mass, "context", None), "prec", 0)) + 64):
        return int(mpmath.ceil(mpmath.mpf(Fraction(M).numerator) / Fraction(M).denominator * mpmath.mpf(mass)))


def epsilon_bound(b: int, omega: int, M, j: int, k: int, m_k) -> float:
    """Certified eps for a weighted block of base ``b`` and window ``omega``.

    Returns ``max((j+k-1)/(omega+j) + b^omega/(M+b^omega),
    j/omega + b^(2 omega + j - k) / (m_k M))``.
    """
    if k > omega:
        raise ValueError(f"certified length k={k} exceeds the window {omega}")
    if k < 1 or m_k <= 0 or M <= 0:
        raise ValueError("need k >= 1, m_k > 0 and M > 0")
    M = float(M)
    m_k = float(m_k)
    pool = float(b) ** omega
    first = (j + k - 1) / (omega + j) + pool / (M + pool)
    second = j / omega + float(b) ** (2 * omega + j - k) / (m_k * M)
    return max(first, second)


@dataclass(eq=False)
class WeightedBlock:
    """A built block plus the data needed to recompute its certificate."""

    word: np.ndarray
    language: ShiftLanguage
    measure: CylinderMeasure
    base: int
    window: int
    weight: object
    offset: int
    copies: dict = field(repr=False)
    min_window_mass: object = None

    @property
    def j(self) -> int:
        return self.language.j

    def __len__(self) -> int:
        return int(self.word.size)

    def as_word(self) -> Word:
        return tuple(int(d) for d in self.word)

    def min_mass(self, k: int):
        return min_cylinder_measure(self.measure, self.language, k)

    def certificate(self, k: Optional[int] = None) -> float:
        """eps for which the block is (eps, k)-normal; ``k`` defaults to the window."""
        k = self.window if k is None else k
        return epsilon_bound(self.base, self.window, self.weight, self.j, k, self.min_mass(k))

    def length_bounds(self) -> tuple:
        """``(M w, (j + w)(M + b^w))``."""
        M = float(self.weight)
        return M * self.window, (self.j + self.window) * (M + self.base ** self.window)


def build_block(language: ShiftLanguage, mu: CylinderMeasure, base: int, window: int, M, *,
                offset: int = 0, memory_cap: int = MEMORY_CAP,
                check_weight: bool = True) -> WeightedBlock:
    """Concatenate ``p^(ceil(M mu(p)))`` over the pool, joined by padding.

    Words of zero mass are skipped together with their padding.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    pool = enumerate_pool(language, base, window, offset=offset)
    masses = [mu.mass(p) for p in pool]
    positive = [m for m in masses if m > 0]
    if not positive:
        raise ValueError("no pool word has positive mass")
    m_window = min(positive)
    if check_weight and Fraction(M) * (m_window if isinstance(m_window, Fraction) else Fraction(float(m_window))) < 1:
        # a float mass is compared with a 1e-12 relative allowance for rounding
        if isinstance(m_window, Fraction) or float(M) * float(m_window) < 1 - 1e-12:
            raise ValueError(f"M={M} is below 1/m_w = {1 / float(m_window):.6g}")
    copies = {}
    for p, m in zip(pool, masses):
        if m > 0:
            copies[p] = _ceil_product(M, m)

    pieces: list = []
    total = 0
    prev: Optional[Word] = None
    for p, c in copies.items():
        if prev is not None:
            u = language.padding(prev, p)
            pieces.append(np.asarray(u, dtype=np.int64))
            total += len(u)
        u_pp = language.padding(p, p)
        unit = np.asarray(p + u_pp, dtype=np.int64)
        pieces.append(np.tile(unit, c - 1))
        pieces.append(np.asarray(p, dtype=np.int64))
        total += len(unit) * (c - 1) + len(p)
        if total > memory_cap:
            raise CapacityError(f"block length exceeds the memory cap of {memory_cap} digits")
        prev = p
    word = np.concatenate(pieces).astype(np.int32)
    return WeightedBlock(word, language, mu, base, window, M, offset, copies, m_window)


@dataclass
class Violation:
    block: Word
    count: int
    expected: float
    rel_dev: float


@dataclass
class NormalityReport:
    passed: bool
    eps: float
    k: int
    length: int
    checked: int
    violations: list
    max_rel_dev: float

    def __bool__(self) -> bool:
        return self.passed


def _candidates(nu: CylinderMeasure, present: set, t: int, alphabet):
    if alphabet is None:
        alphabet = nu.support
    if alphabet is None:
        # unbounded support: digits that occur, plus nothing else can be enumerated
        alphabet = sorted(present)
    return itertools.product(sorted(alphabet), repeat=t)


def check_normal(w, eps, k: int, nu: CylinderMeasure, alphabet: Optional[Sequence[int]] = None,
                 max_violations: int = 100) -> NormalityReport:
    """Check ``nu(b)|w|(1-eps) <= N(b, w) <= nu(b)|w|(1+eps)`` for ``|b| <= k``.

    The blocks checked are all ``nu``-admissible words over ``alphabet``
    (default: the support of ``nu``, or the digits of ``w`` when the support
    is unbounded).  Rational masses are compared exactly.  ``eps >= 1`` is
    accepted; the lower inequality is then vacuous.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    digits = as_digits(w).astype(np.int64)
    n = int(digits.size)
    present = set(np.unique(digits).tolist()) if n else set()
    eps_q = Fraction(eps)
    violations = []
    checked = 0
    worst = 0.0
    for t in range(1, k + 1):
        census = _census(digits, t, n - t + 1) if n >= t else {}
        for b in _candidates(nu, present, t, alphabet):
            m = nu.mass(b)
            if not m > 0:
                continue
            checked += 1
            c = census.get(b, 0)
            if isinstance(m, Fraction):
                expected = m * n
                ok = expected * (1 - eps_q) <= c <= expected * (1 + eps_q)
                rel = float(abs(c - expected) / expected)
            else:
                expected = m * n
                ok = expected * (1 - float(eps)) <= c <= expected * (1 + float(eps))
                rel = float(abs(c - expected) / expected)
            worst = max(worst, rel)
            if not ok and len(violations) < max_violations:
                violations.append(Violation(b, c, float(expected), rel))
            elif not ok:
                violations.append(None)
    real = [v for v in violations if v is not None]
    return NormalityReport(not violations, float(eps), k, n, checked, real, worst)


def empirical_epsilon(w, k: int, nu: CylinderMeasure, alphabet: Optional[Sequence[int]] = None) -> float:
    """Smallest eps for which ``w`` is (eps, k, nu)-normal."""
    return check_normal(w, 1.0, k, nu, alphabet, max_violations=0).max_rel_dev


def occurrence_lower_bound(block: WeightedBlock, b: WordLike) -> float:
    """``(w - k + 1) M mu(b)``, the guaranteed count on a full shift."""
    b = as_word(b)
    return (block.window - len(b) + 1) * float(block.weight) * float(block.measure.mass(b))
