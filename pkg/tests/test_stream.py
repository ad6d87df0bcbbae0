import io
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from munormal import presets
from munormal.counting import count_all_of_length
from munormal.languages import GOLDEN, beta_shift, full_shift
from munormal.measures import ParryMeasure, QaryMeasure
from munormal.schedule import Schedule, StageSpec
from munormal.stream import (DigitStream, StreamExhausted, decode, encode, guess_encoding,
                             stream_prefix, write_stream)

U2 = QaryMeasure(2)
DESKS = ["qary-b2-desk", "beta-golden-desk", "lueroth-desk", "cf-desk"]


def desk(name):
    return presets.build_schedule(presets.get_preset(name), name)


def test_single_stage_prefix():
    W = Schedule(full_shift(2), U2, [StageSpec(3, 0.5, 1, U2, 1, 2, 2)])
    assert DigitStream(W).next_digits(6).tolist() == [0, 1, 0, 1, 0, 1]


def test_golden_power_inserts_padding():
    lang = beta_shift(GOLDEN)
    assert lang.power((1, 0, 0, 1), 2) == (1, 0, 0, 1, 0, 1, 0, 0, 1)


def test_stage_word_matches_padded_power():
    W = desk("beta-golden-desk")
    lang = W.language
    for i in (1, 2):
        blk = W.block(i).as_word()
        expected = lang.power(blk, W.info(i).copies) + W.info(i).next_pad
        assert tuple(W.stage_digits(i).tolist()) == expected


def test_two_stage_boundary():
    W = desk("beta-golden-desk")
    L1 = W.L(1)
    prefix = stream_prefix(W, L1 + 2)
    assert prefix[-2:].tolist() == W.block(2).word[:2].tolist()
    assert W.digit_at(1) == W.block(1).word[0]
    for i in (1, 2, 3):
        assert W.digit_at(W.L(i) + 1) == W.block(i + 1).word[0]


@pytest.mark.parametrize("name", DESKS)
def test_random_access_matches_streaming(name):
    W = desk(name)
    n = min(10 ** 6, W.total_length())
    prefix = stream_prefix(W, n)
    rng = random.Random(17)
    stream = DigitStream(W)
    for pos in sorted(rng.randint(1, n) for _ in range(10 ** 4)):
        assert stream.digit_at(pos) == prefix[pos - 1]


def test_chunked_reads_agree():
    W = desk("qary-b2-desk")
    whole = stream_prefix(W, 200_000)
    s = DigitStream(W)
    parts = [s.next_digits(c) for c in (1, 999, 50_000, 0, 149_000)]
    assert np.array_equal(np.concatenate(parts), whole)
    assert s.emitted == 200_000


def test_beta_stream_is_admissible():
    W = desk("beta-golden-desk")
    prefix = stream_prefix(W, 10 ** 5)
    lang = W.language
    assert lang.is_admissible(tuple(prefix.tolist()))
    census = count_all_of_length(prefix, 12)
    assert all(lang.is_admissible(b) for b in census.counts())


def test_exhaustion_is_reported():
    W = Schedule(full_shift(2), U2, [StageSpec(2, 0.5, 1, U2, 1, 2, 2)])
    s = DigitStream(W)
    assert s.next_digits(4).tolist() == [0, 1, 0, 1]
    with pytest.raises(StreamExhausted):
        s.next_digits(1)
    assert list(DigitStream(W)) == [0, 1, 0, 1]


def test_streams_are_deterministic():
    a = stream_prefix(desk("lueroth-desk"), 300_000)
    b = stream_prefix(desk("lueroth-desk"), 300_000)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("encoding", ["lines", "packed", "chars"])
def test_encodings_round_trip(encoding):
    digits = np.array([0, 1, 9, 3, 0, 0, 7])
    data = encode(digits, encoding)
    assert np.array_equal(decode(data, encoding), digits)


def test_encoding_limits_and_guess():
    with pytest.raises(ValueError):
        encode(np.array([10]), "chars")
    with pytest.raises(ValueError):
        encode(np.array([300]), "packed")
    with pytest.raises(ValueError):
        decode(b"01a", "chars")
    assert guess_encoding(b"0101\n") == "chars"
    assert guess_encoding(b"12\n3\n") == "lines"


def test_write_stream_checksum_is_stable():
    W = desk("qary-b2-desk")
    a, b = io.BytesIO(), io.BytesIO()
    ha = write_stream(DigitStream(W), 10 ** 5, a, "chars", chunk=4096)
    hb = write_stream(DigitStream(W), 10 ** 5, b, "chars", chunk=65536)
    assert ha == hb and a.getvalue() == b.getvalue()


@given(st.lists(st.integers(0, 255), max_size=50), st.sampled_from(["lines", "packed"]))
def test_encode_decode_property(values, encoding):
    arr = np.array(values, dtype=np.int64)
    assert decode(encode(arr, encoding), encoding).tolist() == values
