import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import dense_bits, dense_rank
from qa_volume import gf2
from qa_volume.gf2 import BitMatrix, BitVec


def bit_arrays(max_rows=12, max_cols=140):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def test_nwords_and_tail_mask():
    assert gf2.nwords(0) == 0
    assert gf2.nwords(1) == 1
    assert gf2.nwords(64) == 1
    assert gf2.nwords(65) == 2
    assert int(gf2.tail_mask(3)) == 0b111
    assert int(gf2.tail_mask(64)) == 2**64 - 1


def test_bitvec_roundtrip_and_xor():
    v = BitVec.from_bits("1011000001")
    assert len(v) == 10
    assert v.support() == [0, 2, 3, 9]
    w = BitVec.from_support(10, [0, 9])
    assert (v ^ w).support() == [2, 3]
    assert v.weight() == 4
    assert BitVec(70).any() is False


def test_identity_rank():
    for n in (1, 5, 64, 65, 130):
        assert gf2.rank2(BitMatrix.identity(n)) == n


def test_rank_small_known():
    m = BitMatrix.from_rows(["110", "011", "101"])
    assert gf2.rank2(m) == 2
    assert gf2.rank2(BitMatrix.zeros(4, 7)) == 0


@settings(max_examples=60, deadline=None)
@given(bit_arrays())
def test_rank_matches_dense_reference(a):
    assert gf2.rank2(BitMatrix.from_dense(a)) == dense_rank(a)


@settings(max_examples=40, deadline=None)
@given(bit_arrays(max_rows=20, max_cols=90))
def test_rank_of_transpose(a):
    m = BitMatrix.from_dense(a)
    t = gf2.transpose(m)
    assert t.shape == (a.shape[1], a.shape[0])
    assert np.array_equal(t.to_dense(), a.T)
    assert gf2.rank2(t) == gf2.rank2(m)


@settings(max_examples=40, deadline=None)
@given(bit_arrays(max_rows=16, max_cols=80))
def test_left_nullspace(a):
    m = BitMatrix.from_dense(a)
    k = gf2.nullspace_left(m).to_dense()
    assert k.shape[0] == a.shape[0] - dense_rank(a)
    if k.shape[0]:
        assert not ((k.astype(int) @ a.astype(int)) % 2).any()
        assert dense_rank(k) == k.shape[0]


@settings(max_examples=40, deadline=None)
@given(bit_arrays(max_rows=16, max_cols=80))
def test_right_nullspace(a):
    m = BitMatrix.from_dense(a)
    k = gf2.nullspace_right(m).to_dense()
    assert k.shape[0] == a.shape[1] - dense_rank(a)
    if k.shape[0]:
        assert not ((a.astype(int) @ k.T.astype(int)) % 2).any()


@settings(max_examples=40, deadline=None)
@given(bit_arrays(max_rows=10, max_cols=100), st.integers(0, 99), st.integers(0, 100), st.booleans())
def test_zero_window_monotone(a, start, length, wrap):
    n = a.shape[1]
    start %= n
    length = min(length, n if wrap else n - start)
    m = BitMatrix.from_dense(a)
    z = gf2.zero_window(m, start, length, wrap)
    cols = [(start + j) % n for j in range(length)] if wrap else list(range(start, start + length))
    ref = a.copy()
    ref[:, cols] = 0
    assert np.array_equal(z.to_dense(), ref)
    assert gf2.rank2(z) <= gf2.rank2(m)


def test_kernel_restricted_counts_eliminated_directions():
    m = BitMatrix.from_rows(["1100", "0110", "0011"])
    ker, lost = gf2.kernel_restricted(m, range(2, 4))
    assert lost == 2
    assert ker.nrows == 1
    assert not ker.to_dense()[:, 2:].any()


def test_rank_words_does_not_modify_input():
    rng = np.random.default_rng(3)
    w = rng.integers(0, 2**63, size=(8, 2), dtype=np.uint64)
    before = w.copy()
    gf2.rank_words(w, 128)
    assert np.array_equal(w, before)


def test_transpose_words_roundtrip():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 2, size=(70, 90), dtype=np.uint8)
    w = BitMatrix.from_dense(a).words
    t = gf2.transpose_words(w, 90)
    assert np.array_equal(dense_bits(t, 70), a.T)


def test_bad_dense_input():
    with pytest.raises(ValueError):
        BitMatrix.from_dense(np.array([[0, 2]]))
