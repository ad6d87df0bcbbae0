"""Shift languages with the specification property.

Two families are shipped: the full shift over a finite or unbounded
alphabet (padding length ``j = 0``) and the beta-shift of a Parry number,
described exactly by the greedy expansion of 1 (:class:`ParryData`).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

from .words import Word, WordLike, as_word, make_context, working_precision


class SpecificationError(RuntimeError):
    """No padding of length <= j joins two admissible words."""


class ParryDataError(ValueError):
    pass


class ShiftLanguage:
    """Base class: an admissibility predicate plus the padding oracle.

    Attributes
    ----------
    name : str
    j : int
        Specification constant; every padding has length <= j.
    alphabet : tuple of int or None
        Finite digit set, or None for the unbounded alphabet.
    """

    name = "language"
    j = 0
    alphabet: Optional[tuple] = None

    def is_admissible(self, word: WordLike) -> bool:
        raise NotImplementedError

    def padding(self, a: WordLike, b: WordLike, *, state_a: Optional[int] = None,
                check: bool = True) -> Word:
        raise NotImplementedError

    def end_state(self, word: WordLike) -> Optional[int]:
        """Automaton state after ``word``; None for languages without one."""
        return None

    def concat(self, *words: WordLike) -> Word:
        """``a_1 ⊙ a_2 ⊙ ... ⊙ a_m`` with the fixed paddings."""
        out: list[int] = []
        prev: Optional[Word] = None
        for w in words:
            w = as_word(w)
            if prev is not None:
                out.extend(self.padding(prev, w))
            out.extend(w)
            prev = w
        return tuple(out)

    def power(self, a: WordLike, n: int) -> Word:
        a = as_word(a)
        return self.concat(*([a] * n))

    def words(self, n: int, alphabet: Optional[Sequence[int]] = None) -> Iterator[Word]:
        """Admissible words of length ``n`` in lexicographic order."""
        alphabet = tuple(alphabet) if alphabet is not None else self.alphabet
        if alphabet is None:
            raise ValueError(f"{self.name}: cannot enumerate words over an unbounded alphabet")
        for w in itertools.product(alphabet, repeat=n):
            if self.is_admissible(w):
                yield w


class FullShift(ShiftLanguage):
    """Every word is admissible and no padding is ever needed."""

    j = 0

    def __init__(self, alphabet: Optional[Sequence[int]] = None, min_digit: int = 0):
        self.alphabet = tuple(alphabet) if alphabet is not None else None
        self.min_digit = min_digit
        if self.alphabet is None:
            self.name = f"full-shift(digits>={min_digit})"
        else:
            self.name = f"full-shift({len(self.alphabet)})"

    def is_admissible(self, word: WordLike) -> bool:
        word = as_word(word)
        if self.alphabet is None:
            return all(d >= self.min_digit for d in word)
        allowed = set(self.alphabet)
        return all(d in allowed for d in word)

    def padding(self, a: WordLike, b: WordLike, *, state_a: Optional[int] = None,
                check: bool = True) -> Word:
        return ()

    def __repr__(self) -> str:
        return f"FullShift({self.name})"


def full_shift(alphabet=None, min_digit: int = 0) -> FullShift:
    """Full shift over ``alphabet``.

    ``alphabet`` may be an int ``q`` (digits ``0..q-1``), a sequence of
    digits, or None for the unbounded alphabet ``{min_digit, ...}``.
    """
    if isinstance(alphabet, int):
        alphabet = range(alphabet)
    return FullShift(alphabet, min_digit=min_digit)


@dataclass(frozen=True)
class ParryData:
    """Greedy beta-expansion of 1, ``d_beta(1) = b_1..b_t (b_{t+1}..b_{t+p})^inf``.

    ``period`` is empty when the expansion is finite.  The golden ratio is
    ``ParryData((1, 1))``; ``ParryData((2,), (1,))`` is ``beta = (3+sqrt 5)/2``.
    """

    preperiod: tuple
    period: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(d) for d in self.preperiod))
        object.__setattr__(self, "period", tuple(int(d) for d in self.period))

    @property
    def t(self) -> int:
        return len(self.preperiod)

    @property
    def p(self) -> int:
        return len(self.period)

    @property
    def j(self) -> int:
        return self.t + self.p

    def digit(self, n: int) -> int:
        """n-th digit (1-based) of ``d_beta(1)``."""
        if n <= self.t:
            return self.preperiod[n - 1]
        if self.p == 0:
            return 0
        return self.period[(n - self.t - 1) % self.p]

    def expansion(self, n: int) -> Word:
        return tuple(self.digit(m) for m in range(1, n + 1))

    def quasi_greedy(self, n: int) -> Word:
        """First ``n`` digits of ``d*_beta(1)``."""
        if self.p:
            return self.expansion(n)
        head = self.preperiod[:-1] + (self.preperiod[-1] - 1,)
        return tuple(head[m % self.t] for m in range(n))

    @property
    def alphabet(self) -> tuple:
        # ceil(beta) - 1 == b_1, except for integer beta where d(1) = "beta"
        top = self.preperiod[0]
        if self.p == 0 and self.t == 1:
            top -= 1
        return tuple(range(top + 1))

    def validate(self) -> "ParryData":
        if self.t == 0:
            raise ParryDataError("preperiod must be non-empty")
        digits = self.preperiod + self.period
        if any(d < 0 for d in digits):
            raise ParryDataError("digits must be non-negative")
        if self.preperiod[0] < 1:
            raise ParryDataError("first digit of d_beta(1) must be >= 1")
        if self.p == 0 and self.preperiod[-1] == 0:
            raise ParryDataError("finite expansion must end in a non-zero digit")
        if self.p and all(d == 0 for d in self.period):
            raise ParryDataError("all-zero period: write the expansion as finite")
        if self.p and self.preperiod[-1] == self.period[-1]:
            # b_t == b_{t+p}: the preperiod could be shortened by one digit
            raise ParryDataError("preperiod is not minimal")
        # Parry's condition: every proper shift of d_beta(1) is smaller
        horizon = 2 * (self.t + self.p) + 2
        d = self.expansion(horizon + self.t + self.p)
        for k in range(1, self.t + self.p + 1):
            if not d[k:k + horizon] < d[:horizon]:
                raise ParryDataError(f"shift by {k} is not smaller than d_beta(1)")
        # the greedy orbit of 1 must reproduce the digits
        ctx = make_context(working_precision())
        beta = self.beta()
        margin = ctx.mpf(2) ** (-ctx.prec // 2)
        for n in range(1, self.t + self.p + 1):
            r = self.orbit(n)
            if not (-margin <= r < 1 - margin):
                raise ParryDataError(f"T^{n}(1) = {r} lies outside [0, 1)")
        if self.p == 0 and abs(self.orbit(self.t)) > margin:
            raise ParryDataError("finite expansion does not terminate")
        if beta <= 1:
            raise ParryDataError("beta must exceed 1")
        return self

    # numerics -----------------------------------------------------------

    def _value(self, beta, start: int):
        """Value of ``sigma^start d_beta(1)`` read as a beta-expansion."""
        ctx = beta.context
        inv = 1 / beta
        total = ctx.zero
        if start < self.t:
            for m in range(start + 1, self.t + 1):
                total += self.preperiod[m - 1] * inv ** (m - start)
            lead = self.t - start
        else:
            if self.p == 0:
                return ctx.zero
            start = self.t + (start - self.t) % self.p
            lead = self.t - start  # <= 0
        if self.p:
            period_value = ctx.zero
            off = 0 if lead >= 0 else -lead
            for m in range(1, self.p + 1):
                digit = self.period[(m - 1 + off) % self.p]
                period_value += digit * inv ** m
            period_value /= 1 - inv ** self.p
            total += period_value * inv ** max(lead, 0)
        return total

    def beta(self, bits: int | None = None):
        """beta as an mpf, root of ``sum d_n beta^-n = 1`` by bisection."""
        lo, hi = beta_enclosure(self, bits or working_precision())
        return (lo + hi) / 2

    def orbit(self, n: int, bits: int | None = None):
        """``T^n(1)`` under the beta-map (``T^0(1) = 1``)."""
        beta = self.beta(bits)
        if n == 0:
            return beta.context.one
        return self._value(beta, n)

    # serialisation ---------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"preperiod": list(self.preperiod), "period": list(self.period)})

    @classmethod
    def from_json(cls, text) -> "ParryData":
        obj = json.loads(text) if isinstance(text, str) else text
        return cls(tuple(obj["preperiod"]), tuple(obj.get("period", ())))


GOLDEN = ParryData((1, 1))
GOLDEN_SQUARED = ParryData((2,), (1,))


@lru_cache(maxsize=64)
def beta_enclosure(data: ParryData, bits: int):
    """Interval ``[lo, hi]`` of width about ``2^-bits`` containing beta."""
    ctx = make_context(bits + 16)
    lo = ctx.one
    hi = ctx.mpf(data.preperiod[0] + 1)

    def excess(b):
        return data._value(b, 0) - 1  # decreasing in b

    for _ in range(bits + 8):
        mid = (lo + hi) / 2
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


class BetaShift(ShiftLanguage):
    """Language of finite factors of greedy beta-expansions.

    Admissibility follows Parry's criterion: every suffix of the word is
    lexicographically ``<=`` the same-length prefix of ``d*_beta(1)``.  The
    equivalent automaton tracks which prefix of ``d_beta(1)`` the word
    currently ends in; state ``m`` means the follower interval is
    ``[0, T^m(1))``.
    """

    def __init__(self, data: ParryData):
        self.data = data.validate()
        self.j = data.j
        self.alphabet = data.alphabet
        self.name = f"beta-shift{data.to_json()}"
        self._n_states = data.t + data.p

    def step(self, state: int, d: int) -> Optional[int]:
        c = self.data.digit(state + 1)
        if d < c:
            return 0
        if d > c or d < 0:
            return None
        nxt = state + 1
        if nxt == self._n_states:
            if self.data.p == 0:
                return None  # T^t(1) = 0: empty follower interval
            nxt = self.data.t
        return nxt

    def run(self, word: WordLike, state: int = 0) -> Optional[int]:
        """Automaton state after reading ``word``, or None if rejected."""
        for d in word:
            state = self.step(state, int(d))
            if state is None:
                return None
        return state

    def is_admissible(self, word: WordLike) -> bool:
        return self.run(as_word(word)) is not None

    def end_state(self, word: WordLike) -> Optional[int]:
        return self.run(as_word(word))

    def parry_criterion(self, word: WordLike) -> bool:
        """Lexicographic form of admissibility (quadratic; use for checks)."""
        word = as_word(word)
        star = self.data.quasi_greedy(len(word))
        return all(word[k:] <= star[: len(word) - k] for k in range(len(word)))

    def padding(self, a: WordLike, b: WordLike, *, state_a: Optional[int] = None,
                check: bool = True) -> Word:
        """Shortest zero run ``0^r`` (``r <= j``) joining ``a`` and ``b``.

        Besides admissibility of ``a 0^r b`` the automaton must end in the
        state reached by ``b`` alone, so chained concatenations stay
        admissible whatever precedes ``a``.  ``state_a`` may supply the
        automaton state after ``a`` when it is already known; ``check=False``
        skips the admissibility scan of ``b`` for words known to be valid.
        """
        b = as_word(b)
        sa = self.run(as_word(a)) if state_a is None else state_a
        if sa is None or (check and self.run(b) is None):
            raise ValueError("padding requested for an inadmissible word")
        state = sa
        for r in range(self.j + 1):
            if r:
                state = self.step(state, 0)
                if state is None:
                    break
            if self._merges(b, state):
                return (0,) * r
        raise SpecificationError(f"no padding of length <= {self.j} joins {a} and {b}")

    def _merges(self, b: Word, state: int) -> bool:
        # runs from `state` and from 0 agree at the end iff they meet somewhere
        s, s0 = state, 0
        for d in b:
            if s == s0:
                return True
            s, s0 = self.step(s, d), self.step(s0, d)
            if s is None:
                return False
        return s == s0

    def count(self, n: int) -> int:
        """Number of admissible words of length ``n`` (automaton DP)."""
        counts = {0: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for s, c in counts.items():
                for d in self.alphabet:
                    s2 = self.step(s, d)
                    if s2 is not None:
                        nxt[s2] = nxt.get(s2, 0) + c
            counts = nxt
        return sum(counts.values())

    def __repr__(self) -> str:
        return f"BetaShift({self.data.preperiod}, {self.data.period})"


def beta_shift(data: ParryData) -> BetaShift:
    return BetaShift(data)


MAX_COUNT_LENGTH = 64


def count_admissible(language: ShiftLanguage, n: int) -> int:
    if language.alphabet is None:
        raise ValueError("count_admissible needs a finite alphabet")
    if n > MAX_COUNT_LENGTH:
        raise ValueError(f"length {n} exceeds the configured bound {MAX_COUNT_LENGTH}")
    if isinstance(language, BetaShift):
        return language.count(n)
    if isinstance(language, FullShift):
        return len(language.alphabet) ** n
    return sum(1 for _ in language.words(n))
