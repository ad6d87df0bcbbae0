"""Lazy digit stream over a schedule, plus the output encodings."""

from __future__ import annotations

import hashlib
from typing import BinaryIO, Iterator

import numpy as np

from .schedule import Schedule, ScheduleExhausted

ENCODINGS = ("lines", "packed", "chars")
DEFAULT_CHUNK = 1 << 20


class StreamExhausted(ScheduleExhausted):
    """The finite schedule behind a stream has run out of digits."""


class DigitStream:
    """Sequential reader of ``w_1^{⊙l_1} ⊙ w_2^{⊙l_2} ⊙ ...``.

    The cursor walks stage by stage; within a stage it emits copies of the
    block and the paddings without materialising the stage word, so memory
    stays at the size of the few cached blocks.
    """

    def __init__(self, schedule: Schedule):
        self.schedule = schedule
        self.emitted = 0
        self._stage = 1   # stage currently being read
        self._offset = 0  # offset inside that stage

    def __iter__(self) -> Iterator[int]:
        while True:
            chunk = self._read(DEFAULT_CHUNK)
            yield from (int(d) for d in chunk)
            if len(chunk) < DEFAULT_CHUNK:
                return

    def _piece(self) -> np.ndarray:
        """Digits of the current stage from the cursor to the next piece boundary."""
        sched = self.schedule
        if not sched.has_stage(self._stage):
            raise StreamExhausted(f"{sched.name} ends after {self.emitted} digits")
        st = sched.info(self._stage)
        if st.copies == 0:
            return np.zeros(0, dtype=np.int32)
        word = sched.block(self._stage).word
        period = st.length + len(st.self_pad)
        x = min(self._offset // period, st.copies - 1)
        r = self._offset - x * period
        pad = st.self_pad if x < st.copies - 1 else st.next_pad
        if r < st.length:
            return np.concatenate([word[r:], np.asarray(pad, dtype=np.int32)])
        return np.asarray(pad[r - st.length:], dtype=np.int32)

    def next_digits(self, count: int) -> np.ndarray:
        """The next ``count`` digits; raises :class:`StreamExhausted` if fewer remain."""
        if count < 0:
            raise ValueError("count must be non-negative")
        got = self._read(count)
        if len(got) < count:
            raise StreamExhausted(
                f"{self.schedule.name} ends after {self.emitted} digits, {count} requested")
        return got

    def _read(self, count: int) -> np.ndarray:
        """Up to ``count`` digits, fewer only when the schedule ends."""
        out = []
        need = count
        sched = self.schedule
        while need:
            if sched.has_stage(self._stage) and self._offset >= sched.info(self._stage).total:
                self._stage += 1
                self._offset = 0
                continue
            try:
                piece = self._piece()
            except StreamExhausted:
                break
            take = piece[:need]
            out.append(take)
            self._offset += len(take)
            need -= len(take)
        self.emitted += count - need
        if not out:
            return np.zeros(0, dtype=np.int32)
        return np.concatenate(out).astype(np.int32)

    def iter_chunks(self, n: int, size: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
        """Yield the next ``n`` digits in chunks of at most ``size``."""
        left = n
        while left > 0:
            take = min(size, left)
            yield self.next_digits(take)
            left -= take

    def digit_at(self, n: int) -> int:
        """Digit at 1-based position ``n``, by position arithmetic."""
        try:
            return self.schedule.digit_at(n)
        except ScheduleExhausted as exc:
            raise StreamExhausted(str(exc)) from exc

    def prefix(self, n: int) -> np.ndarray:
        """First ``n`` digits from a fresh stream (the cursor is not moved)."""
        return DigitStream(self.schedule).next_digits(n)


def encode(digits: np.ndarray, encoding: str) -> bytes:
    """Serialise digits: one integer per line, one byte each, or ASCII digits."""
    digits = np.asarray(digits)
    if encoding == "lines":
        if not digits.size:
            return b""
        return ("\n".join(map(str, digits.tolist())) + "\n").encode("ascii")
    if encoding == "packed":
        if digits.size and (digits.min() < 0 or digits.max() > 255):
            raise ValueError("packed encoding needs digits in 0..255")
        return digits.astype(np.uint8).tobytes()
    if encoding == "chars":
        if digits.size and (digits.min() < 0 or digits.max() > 9):
            raise ValueError("chars encoding needs digits in 0..9")
        return (digits.astype(np.uint8) + 48).tobytes()
    raise ValueError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")


def decode(data: bytes, encoding: str) -> np.ndarray:
    if encoding == "lines":
        text = data.decode("ascii").split()
        return np.asarray([int(t) for t in text], dtype=np.int64)
    if encoding == "packed":
        return np.frombuffer(data, dtype=np.uint8).astype(np.int64)
    if encoding == "chars":
        raw = np.frombuffer(data.strip(), dtype=np.uint8).astype(np.int64) - 48
        if raw.size and (raw.min() < 0 or raw.max() > 9):
            raise ValueError("non-digit character in chars input")
        return raw
    raise ValueError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")


def guess_encoding(data: bytes) -> str:
    if b"\n" in data.strip():
        return "lines"
    if all(48 <= c <= 57 for c in data.strip()):
        return "chars"
    return "packed"


def write_stream(stream: DigitStream, n: int, fh: BinaryIO, encoding: str,
                 chunk: int = DEFAULT_CHUNK) -> str:
    """Write ``n`` digits to ``fh``; returns the SHA-256 of the bytes written."""
    h = hashlib.sha256()
    for part in stream.iter_chunks(n, chunk):
        data = encode(part, encoding)
        h.update(data)
        fh.write(data)
    return h.hexdigest()


def stream_prefix(schedule: Schedule, n: int) -> np.ndarray:
    return DigitStream(schedule).next_digits(n)
