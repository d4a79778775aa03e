"""Bit-packed linear algebra over GF(2).

Vectors and matrices are stored as little-endian 64-bit words: bit ``j`` of a
row lives in word ``j // 64`` at position ``j % 64``.  Bits past ``ncols`` in
the tail word are always zero.

The hot loops are numba kernels operating on raw ``uint64`` arrays so the
simulation engines can call them without going through the object layer.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numba as nb
import numpy as np

WORD = 64
ONE = np.uint64(1)


@nb.njit(cache=True)
def nwords(nbits):
    return (nbits + 63) // 64


def tail_mask(nbits: int) -> np.uint64:
    r = nbits % WORD
    if r == 0:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    return np.uint64((1 << r) - 1)


# ---------------------------------------------------------------- kernels


@nb.njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@nb.njit(cache=True, inline="always")
def get_bit(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & np.uint64(1)


@nb.njit(cache=True, inline="always")
def flip_bit(row, j):
    row[j >> 6] ^= np.uint64(1) << np.uint64(j & 63)


@nb.njit(cache=True, inline="always")
def set_bit(row, j, v):
    m = np.uint64(1) << np.uint64(j & 63)
    if v:
        row[j >> 6] |= m
    else:
        row[j >> 6] &= ~m


@nb.njit(cache=True)
def rank_inplace(m, ncols):
    """Row-reduce ``m`` in place and return its rank."""
    nrows = m.shape[0]
    r = 0
    for j in range(ncols):
        if r == nrows:
            break
        w = j >> 6
        b = np.uint64(1) << np.uint64(j & 63)
        piv = -1
        for i in range(r, nrows):
            if m[i, w] & b:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(m.shape[1]):
                tmp = m[r, k]
                m[r, k] = m[piv, k]
                m[piv, k] = tmp
        for i in range(r + 1, nrows):
            if m[i, w] & b:
                for k in range(w, m.shape[1]):
                    m[i, k] ^= m[r, k]
        r += 1
    return r


@nb.njit(cache=True)
def rank_words(m, ncols):
    return rank_inplace(m.copy(), ncols)


@nb.njit(cache=True)
def eliminate_columns(m, alive, cols):
    """Eliminate the listed columns from the live rows of ``m`` in place.

    For each column in ``cols`` a live row with that bit set is chosen as
    pivot, xored into every other live row carrying the bit, then marked dead.
    Returns the number of pivots.  Afterwards no live row touches ``cols``.
    """
    nrows = m.shape[0]
    nw = m.shape[1]
    count = 0
    for c in cols:
        w = c >> 6
        b = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for i in range(nrows):
            if alive[i] and (m[i, w] & b):
                piv = i
                break
        if piv < 0:
            continue
        for i in range(piv + 1, nrows):
            if alive[i] and (m[i, w] & b):
                for k in range(nw):
                    m[i, k] ^= m[piv, k]
        alive[piv] = False
        count += 1
    return count


@nb.njit(cache=True)
def window_mask(ncols, start, length, wrap):
    out = np.zeros(nwords(ncols), dtype=np.uint64)
    for k in range(length):
        j = start + k
        if wrap:
            j %= ncols
        out[j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return out


@nb.njit(cache=True)
def extract_bits(row, cols, out):
    """Gather ``row[cols[k]]`` into bit ``k`` of ``out`` (which is zeroed)."""
    out[:] = 0
    for k in range(cols.shape[0]):
        if get_bit(row, cols[k]):
            out[k >> 6] |= np.uint64(1) << np.uint64(k & 63)


@nb.njit(cache=True)
def submatrix(m, rows, cols):
    out = np.zeros((rows.shape[0], nwords(cols.shape[0])), dtype=np.uint64)
    for i in range(rows.shape[0]):
        extract_bits(m[rows[i]], cols, out[i])
    return out


@nb.njit(cache=True)
def transpose_words(m, ncols):
    nrows = m.shape[0]
    out = np.zeros((ncols, nwords(nrows)), dtype=np.uint64)
    for i in range(nrows):
        for j in range(ncols):
            if get_bit(m[i], j):
                out[j, i >> 6] |= np.uint64(1) << np.uint64(i & 63)
    return out


@nb.njit(cache=True)
def left_kernel(m, ncols):
    """Basis of ``{a : a @ m = 0}`` as packed rows over ``m.shape[0]`` bits.

    Row-reduces ``[m | I]``; rows whose ``m`` part vanishes carry the kernel.
    """
    nrows = m.shape[0]
    wa = m.shape[1]
    wb = nwords(nrows)
    aug = np.zeros((nrows, wa + wb), dtype=np.uint64)
    aug[:, :wa] = m
    for i in range(nrows):
        aug[i, wa + (i >> 6)] |= np.uint64(1) << np.uint64(i & 63)
    r = rank_inplace(aug[:, :], ncols)
    # rank_inplace pivots only on the first ncols columns, so rows r.. have
    # a zero m-part; their identity part spans the left kernel.
    out = np.empty((nrows - r, wb), dtype=np.uint64)
    for i in range(r, nrows):
        out[i - r] = aug[i, wa:]
    return out


# ---------------------------------------------------------------- objects


class BitVec:
    """Fixed-length bit vector over GF(2)."""

    __slots__ = ("len", "words")

    def __init__(self, length: int, words: np.ndarray | None = None):
        self.len = int(length)
        if words is None:
            words = np.zeros(nwords(self.len), dtype=np.uint64)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64).copy()
            if words.shape != (nwords(self.len),):
                raise ValueError("word count does not match length")
            if self.len and words.size:
                words[-1] &= tail_mask(self.len)
        self.words = words

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> "BitVec":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        arr = np.asarray(list(bits), dtype=np.uint8)
        v = cls(arr.size)
        for j in np.flatnonzero(arr):
            v.words[j >> 6] |= ONE << np.uint64(j & 63)
        return v

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVec":
        v = cls(length)
        for j in support:
            if not 0 <= j < length:
                raise IndexError(j)
            v.words[j >> 6] |= ONE << np.uint64(j & 63)
        return v

    def __len__(self) -> int:
        return self.len

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.len:
            raise IndexError(j)
        return int((self.words[j >> 6] >> np.uint64(j & 63)) & ONE)

    def __xor__(self, other: "BitVec") -> "BitVec":
        if other.len != self.len:
            raise ValueError("length mismatch")
        return BitVec(self.len, self.words ^ other.words)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BitVec) and self.len == other.len and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.len, self.words.tobytes()))

    def to_bits(self) -> np.ndarray:
        out = np.zeros(self.len, dtype=np.uint8)
        for j in self.support():
            out[j] = 1
        return out

    def support(self) -> list[int]:
        out = []
        for w, word in enumerate(self.words):
            word = int(word)
            while word:
                low = word & -word
                out.append(w * WORD + low.bit_length() - 1)
                word ^= low
        return out

    def weight(self) -> int:
        return sum(int(w).bit_count() for w in self.words)

    def any(self) -> bool:
        return bool(self.words.any())

    def __repr__(self) -> str:
        return "BitVec('" + "".join(map(str, self.to_bits())) + "')"


class BitMatrix:
    """Ordered list of equal-length rows over GF(2), stored as a 2-D word array."""

    __slots__ = ("ncols", "words")

    def __init__(self, ncols: int, words: np.ndarray | None = None):
        self.ncols = int(ncols)
        if words is None:
            words = np.zeros((0, nwords(self.ncols)), dtype=np.uint64)
        words = np.ascontiguousarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != nwords(self.ncols):
            raise ValueError("word array has the wrong shape")
        self.words = words

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec | str | Sequence[int]], ncols: int | None = None) -> "BitMatrix":
        vecs = [r if isinstance(r, BitVec) else BitVec.from_bits(r) for r in rows]
        if ncols is None:
            if not vecs:
                raise ValueError("ncols is required for an empty matrix")
            ncols = vecs[0].len
        if any(v.len != ncols for v in vecs):
            raise ValueError("all rows must have length ncols")
        words = np.zeros((len(vecs), nwords(ncols)), dtype=np.uint64)
        for i, v in enumerate(vecs):
            words[i] = v.words
        return cls(ncols, words)

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array")
        if dense.size and (dense.min() < 0 or dense.max() > 1):
            raise ValueError("entries must be 0 or 1")
        dense = dense.astype(np.uint8)
        nrows, ncols = dense.shape
        padded = np.zeros((nrows, nwords(ncols) * WORD), dtype=np.uint8)
        padded[:, :ncols] = dense
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(ncols, packed.view(np.uint64).reshape(nrows, -1).copy())

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(ncols, np.zeros((nrows, nwords(ncols)), dtype=np.uint64))

    @property
    def nrows(self) -> int:
        return self.words.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> list[BitVec]:
        return [BitVec(self.ncols, w) for w in self.words]

    def to_dense(self) -> np.ndarray:
        if self.nrows == 0:
            return np.zeros((0, self.ncols), dtype=np.uint8)
        bits = np.unpackbits(self.words.view(np.uint8).reshape(self.nrows, -1), axis=1, bitorder="little")
        return bits[:, : self.ncols].copy()

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.ncols, self.words.copy())

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.ncols == other.ncols
            and np.array_equal(self.words, other.words)
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


# ---------------------------------------------------------------- operations


def rank2(m: BitMatrix) -> int:
    """GF(2) rank; ``m`` is not modified."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return int(rank_words(m.words, m.ncols))


def _window_columns(ncols: int, window) -> np.ndarray:
    if isinstance(window, range):
        cols = np.arange(window.start, window.stop, window.step, dtype=np.int64)
    else:
        cols = np.asarray(sorted(set(int(c) for c in window)), dtype=np.int64)
    if cols.size and (cols.min() < 0 or cols.max() >= ncols):
        raise ValueError("window lies outside the column range")
    return cols


def kernel_restricted(m: BitMatrix, window) -> tuple[BitMatrix, int]:
    """Split ``m`` along a forbidden column window.

    Returns ``(survivors, eliminated)``: ``eliminated`` is the rank of ``m``
    restricted to the window columns and ``survivors`` is a basis-preserving
    set of ``nrows - eliminated`` row combinations with no support on the
    window.  Rows that end up all-zero are kept.
    """
    cols = _window_columns(m.ncols, window)
    if cols.size == 0 or m.nrows == 0:
        return m.copy(), 0
    work = m.words.copy()
    alive = np.ones(m.nrows, dtype=np.bool_)
    eliminated = int(eliminate_columns(work, alive, cols))
    return BitMatrix(m.ncols, work[alive]), eliminated


def zero_window(m: BitMatrix, start: int, length: int, wrap: bool = False) -> BitMatrix:
    """Copy of ``m`` with ``length`` contiguous columns from ``start`` cleared."""
    if length < 0 or length > m.ncols:
        raise ValueError("window length must lie in [0, ncols]")
    if length == 0:
        return m.copy()
    if not wrap and start + length > m.ncols:
        raise ValueError("window crosses the boundary; pass wrap=True")
    mask = window_mask(m.ncols, start % m.ncols, length, wrap)
    return BitMatrix(m.ncols, m.words & ~mask[None, :])


def restrict_columns(m: BitMatrix, cols: Sequence[int]) -> BitMatrix:
    cols = np.asarray(cols, dtype=np.int64)
    return BitMatrix(cols.size, submatrix(m.words, np.arange(m.nrows), cols))


def transpose(m: BitMatrix) -> BitMatrix:
    return BitMatrix(m.nrows, transpose_words(m.words, m.ncols))


def nullspace_left(m: BitMatrix) -> BitMatrix:
    """Rows ``a`` (over ``m.nrows`` bits) spanning ``{a : a m = 0}``."""
    if m.nrows == 0:
        return BitMatrix.zeros(0, 0)
    if m.ncols == 0:
        return BitMatrix.identity(m.nrows)
    return BitMatrix(m.nrows, left_kernel(m.words, m.ncols))


def nullspace_right(m: BitMatrix) -> BitMatrix:
    """Rows ``b`` (over ``m.ncols`` bits) spanning ``{b : m b = 0}``."""
    return nullspace_left(transpose(m))
