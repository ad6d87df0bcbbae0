"""Overlapping block counts ``N_n(b, w)`` and frequency reports.

Counts are over full occurrences only: a window starting at 0-based
position ``i`` is counted when ``i + k <= n``.  Long prefixes are split into
chunks that overlap by ``k - 1`` digits; every window is attributed to the
chunk it starts in, so results do not depend on the chunking.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .words import Word, WordLike, as_word

DEFAULT_CHUNK = 1 << 20
_BINCOUNT_LIMIT = 1 << 24


def as_digits(source) -> np.ndarray:
    if isinstance(source, np.ndarray):
        return source
    if isinstance(source, str):
        return np.frombuffer(source.encode("ascii"), dtype=np.uint8).astype(np.int64) - 48
    return np.asarray(list(source), dtype=np.int64)


def _census(buf: np.ndarray, k: int, starts: int) -> Counter:
    """Counts of the windows of length ``k`` starting at ``0..starts-1`` of ``buf``."""
    out: Counter = Counter()
    if starts <= 0:
        return out
    view = np.lib.stride_tricks.sliding_window_view(buf[: starts + k - 1], k)
    base = int(buf[: starts + k - 1].max()) + 1 if starts else 1
    if buf.min() >= 0 and base ** k <= _BINCOUNT_LIMIT:
        powers = base ** np.arange(k - 1, -1, -1, dtype=np.int64)
        codes = view.astype(np.int64) @ powers
        counts = np.bincount(codes, minlength=0)
        for code in np.flatnonzero(counts):
            digits = []
            c = int(code)
            for _ in range(k):
                c, r = divmod(c, base)
                digits.append(r)
            out[tuple(reversed(digits))] = int(counts[code])
    else:
        uniq, counts = np.unique(view, axis=0, return_counts=True)
        for row, c in zip(uniq, counts):
            out[tuple(int(d) for d in row)] = int(c)
    return out


def _chunk_census(digits: np.ndarray, k: int, n: int, chunks: int, workers: Optional[int]) -> Counter:
    starts_total = n - k + 1
    if starts_total <= 0:
        return Counter()
    bounds = np.linspace(0, starts_total, max(1, chunks) + 1).astype(np.int64)

    def job(idx: int) -> Counter:
        a, b = int(bounds[idx]), int(bounds[idx + 1])
        return _census(digits[a: b + k - 1], k, b - a)

    idx = range(len(bounds) - 1)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, idx))
    else:
        parts = [job(i) for i in idx]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return total


def _stream_census(chunks: Iterable[np.ndarray], lengths: Sequence[int], n: Optional[int]) -> tuple[dict, int]:
    """Census for several lengths over an iterator of digit chunks."""
    kmax = max(lengths)
    totals = {k: Counter() for k in lengths}
    carry = np.zeros(0, dtype=np.int64)
    seen = 0
    for chunk in chunks:
        chunk = np.asarray(chunk, dtype=np.int64)
        if n is not None and seen + len(chunk) > n:
            chunk = chunk[: n - seen]
        if not len(chunk):
            break
        buf = np.concatenate([carry, chunk])
        offset = seen - len(carry)  # absolute position of buf[0]
        seen += len(chunk)
        for k in lengths:
            # windows starting at absolute positions [offset, seen - k] not yet counted
            first = max(0, seen - len(chunk) - (k - 1)) - offset
            last = len(buf) - k  # inclusive start index inside buf
            if last >= first:
                totals[k].update(_census(buf[first:], k, last - first + 1))
        carry = buf[-(kmax - 1):] if kmax > 1 else buf[:0]
        if n is not None and seen >= n:
            break
    return totals, seen


@dataclass
class BlockRecord:
    block: Word
    count: int
    freq: float
    mu: Optional[float] = None
    rel_dev: Optional[float] = None

    def to_dict(self) -> dict:
        return {"b": list(self.block), "count": self.count, "freq": self.freq,
                "mu": self.mu, "rel_dev": self.rel_dev}


@dataclass
class FrequencyReport:
    n: int
    records: list = field(default_factory=list)
    mu_floor: float = 0.0

    def __getitem__(self, block: WordLike) -> int:
        block = as_word(block)
        for r in self.records:
            if r.block == block:
                return r.count
        return 0

    def counts(self) -> dict:
        return {r.block: r.count for r in self.records}

    @property
    def max_rel_dev(self) -> Optional[float]:
        devs = [r.rel_dev for r in self.records
                if r.rel_dev is not None and r.mu is not None and r.mu >= self.mu_floor]
        return max(devs) if devs else None

    def to_dict(self) -> dict:
        return {"n": self.n, "blocks": [r.to_dict() for r in self.records],
                "max_rel_dev": self.max_rel_dev}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _records(census: dict, blocks: Iterable[Word], n: int, measure) -> list:
    out = []
    for b in blocks:
        c = census[len(b)].get(b, 0)
        freq = c / n if n else 0.0
        mu = rel = None
        if measure is not None:
            mu = float(measure(b))
            rel = abs(freq - mu) / mu if mu > 0 else None
        out.append(BlockRecord(b, c, freq, mu, rel))
    return out


def _census_for(source, lengths: Sequence[int], n: Optional[int], chunks: int, workers: Optional[int]):
    if hasattr(source, "iter_chunks"):
        if n is None:
            raise ValueError("prefix length n is required for a stream source")
        return _stream_census(source.iter_chunks(n), lengths, n)
    digits = as_digits(source)
    if n is None:
        n = len(digits)
    if n > len(digits):
        raise ValueError(f"prefix length {n} exceeds the {len(digits)} available digits")
    digits = digits[:n]
    return {k: _chunk_census(digits, k, n, chunks, workers) for k in lengths}, n


def count_blocks(source, targets: Iterable[WordLike], n: Optional[int] = None, *,
                 measure=None, mu_floor: float = 0.0, chunks: int = 1,
                 workers: Optional[int] = None) -> FrequencyReport:
    """Count every target block in the first ``n`` digits of ``source``.

    ``source`` is a digit sequence (array, list, digit string) or an object
    with ``iter_chunks(n)`` such as :class:`munormal.stream.DigitStream`.
    """
    targets = [as_word(t) for t in targets]
    if not targets:
        raise ValueError("targets must be non-empty")
    lengths = sorted({len(t) for t in targets})
    if lengths[0] < 1:
        raise ValueError("targets must be non-empty words")
    census, n = _census_for(source, lengths, n, chunks, workers)
    if lengths[-1] > n:
        raise ValueError("target longer than the prefix")
    return FrequencyReport(n, _records(census, targets, n, measure), mu_floor)


def count_all_of_length(source, k: int, n: Optional[int] = None, *, language=None,
                        measure=None, alphabet: Optional[Sequence[int]] = None,
                        mu_floor: float = 0.0, chunks: int = 1,
                        workers: Optional[int] = None) -> FrequencyReport:
    """Census of every length-``k`` block occurring in the prefix.

    When a finite alphabet is known (argument, language or measure support),
    admissible blocks that never occur are reported with count 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    census, n = _census_for(source, [k], n, chunks, workers)
    blocks = set(census[k])
    if alphabet is None:
        alphabet = getattr(measure, "support", None) or getattr(language, "alphabet", None)
        if alphabet is None and (measure is not None or language is not None):
            raise ValueError("admissible set is infinite; pass an explicit alphabet")
    if alphabet is not None:
        for w in itertools.product(sorted(alphabet), repeat=k):
            if language is not None and not language.is_admissible(w):
                continue
            if measure is not None and measure.mass(w) == 0:
                continue
            blocks.add(w)
    return FrequencyReport(n, _records(census, sorted(blocks), n, measure), mu_floor)


def naive_count(word: WordLike, block: WordLike) -> int:
    """Reference O(nk) overlapping count."""
    word, block = as_word(word), as_word(block)
    k = len(block)
    return sum(1 for i in range(len(word) - k + 1) if word[i:i + k] == block)


def audit_blocks(measure, k_max: int, mu_floor: float, max_digit: int = 10_000) -> list:
    """All blocks of length ``<= k_max`` with ``measure(b) >= mu_floor``.

    For unbounded supports the candidate digits are those whose own mass
    reaches the floor (a block never outweighs any of its digits).
    """
    if mu_floor <= 0 and measure.support is None:
        raise ValueError("an unbounded support needs a positive mass floor")
    if measure.support is not None:
        digits = [d for d in measure.support if measure(d if isinstance(d, tuple) else (d,)) >= mu_floor]
    else:
        digits = []
        for d in itertools.count(0):
            if d > max_digit:
                break
            try:
                m = measure((d,))
            except ValueError:  # below the digit range, e.g. 0 for continued fractions
                continue
            if m >= mu_floor:
                digits.append(d)
            elif digits and d > 2 * digits[-1] + 2:
                break
    out = []
    for k in range(1, k_max + 1):
        for w in itertools.product(digits, repeat=k):
            if measure(w) >= mu_floor:
                out.append(w)
    return out


def iter_array_chunks(digits: np.ndarray, size: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
    for a in range(0, len(digits), size):
        yield digits[a:a + size]
