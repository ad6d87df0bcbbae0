"""Finite words over integer alphabets and working-precision plumbing."""

from __future__ import annotations

import os
from typing import Iterable, Tuple, Union

import mpmath

Word = Tuple[int, ...]
WordLike = Union[str, Iterable[int]]

DEFAULT_PRECISION = 128


def as_word(w: WordLike) -> Word:
    """Coerce ``w`` to a tuple of ints.

    Strings are read one character per digit, so ``"0101"`` becomes
    ``(0, 1, 0, 1)``.  Multi-digit symbols (continued fractions, Lüroth)
    must be passed as sequences.
    """
    if isinstance(w, str):
        return tuple(int(c) for c in w)
    return tuple(int(d) for d in w)


def word_str(w: Iterable[int]) -> str:
    w = tuple(w)
    if all(0 <= d < 10 for d in w):
        return "".join(str(d) for d in w)
    return " ".join(str(d) for d in w)


def working_precision() -> int:
    """Mantissa bits used by high-precision evaluations.

    Overridden by the ``MUNORMAL_PRECISION`` environment variable.
    """
    raw = os.environ.get("MUNORMAL_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    bits = int(raw)
    if bits < 53:
        raise ValueError(f"MUNORMAL_PRECISION must be >= 53, got {bits}")
    return bits


def make_context(bits: int | None = None) -> mpmath.ctx_mp.MPContext:
    # private context: mp.prec is global state and not thread safe
    ctx = mpmath.MPContext()
    ctx.prec = bits if bits is not None else working_precision()
    return ctx
