"""Dense matrices over GF(2) with rows packed into 64-bit words."""

from __future__ import annotations

import numpy as np
from numba import njit

WORD = 64


def _nwords(cols: int) -> int:
    return (cols + WORD - 1) // WORD


class Gf2Matrix:
    """A ``rows x cols`` binary matrix; row ``i`` lives in ``packed[i]``, bit ``j % 64``
    of word ``j // 64`` holding entry ``(i, j)``. Padding bits beyond ``cols`` stay zero."""

    __slots__ = ("rows", "cols", "packed")

    def __init__(self, rows: int, cols: int, packed: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"negative shape ({rows}, {cols})")
        self.rows = int(rows)
        self.cols = int(cols)
        if packed is None:
            packed = np.zeros((self.rows, _nwords(self.cols)), dtype=np.uint64)
        elif packed.shape != (self.rows, _nwords(self.cols)) or packed.dtype != np.uint64:
            raise ValueError(f"packed storage has shape {packed.shape}, dtype {packed.dtype}")
        self.packed = packed

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        m = cls(n, n)
        idx = np.arange(n)
        m.packed[idx, idx // WORD] = np.left_shift(np.uint64(1), (idx % WORD).astype(np.uint64))
        return m

    @classmethod
    def from_dense(cls, a) -> "Gf2Matrix":
        a = np.asarray(a).astype(bool)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows, cols = a.shape
        m = cls(rows, cols)
        if rows and cols:
            padded = np.zeros((rows, _nwords(cols) * WORD), dtype=bool)
            padded[:, :cols] = a
            # little-endian bit order inside each byte, bytes little-endian inside each word
            m.packed[:] = np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64)
        return m

    @classmethod
    def from_entries(cls, rows: int, cols: int, r_idx, c_idx) -> "Gf2Matrix":
        """Build from coordinate lists; each listed entry is *set* (not accumulated)."""
        m = cls(rows, cols)
        r_idx = np.asarray(r_idx, dtype=np.int64)
        c_idx = np.asarray(c_idx, dtype=np.int64)
        if r_idx.size:
            if r_idx.min() < 0 or r_idx.max() >= rows or c_idx.min() < 0 or c_idx.max() >= cols:
                raise IndexError("entry outside matrix bounds")
            bits = np.left_shift(np.uint64(1), (c_idx % WORD).astype(np.uint64))
            np.bitwise_or.at(m.packed, (r_idx, c_idx // WORD), bits)
        return m

    def to_dense(self) -> np.ndarray:
        if not self.rows or not self.cols:
            return np.zeros((self.rows, self.cols), dtype=bool)
        as_bytes = self.packed.astype("<u8").view(np.uint8)
        return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, : self.cols].astype(bool)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def _check(self, i: int, j: int):
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols} matrix")

    def __getitem__(self, ij) -> int:
        i, j = ij
        self._check(i, j)
        return int((int(self.packed[i, j // WORD]) >> (j % WORD)) & 1)

    def __setitem__(self, ij, value):
        i, j = ij
        self._check(i, j)
        bit = np.uint64(1) << np.uint64(j % WORD)
        if value & 1:
            self.packed[i, j // WORD] |= bit
        else:
            self.packed[i, j // WORD] &= ~bit

    def copy(self) -> "Gf2Matrix":
        return Gf2Matrix(self.rows, self.cols, self.packed.copy())

    def row_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=1)

    def is_zero(self) -> bool:
        return not self.packed.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.packed, other.packed))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.rows}x{self.cols})"


@njit(cache=True)
def _rank_inplace(a, cols):
    rows, words = a.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for i in range(r, rows):
            if a[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(w, words):
                t = a[r, k]
                a[r, k] = a[piv, k]
                a[piv, k] = t
        for i in range(r + 1, rows):
            if a[i, w] & bit:
                for k in range(w, words):
                    a[i, k] ^= a[r, k]
        r += 1
    return r


def rank(m: Gf2Matrix) -> int:
    """Row-echelon rank; pivots are the first nonzero row of each column, scanning
    columns left to right. Works on a copy, ``m`` is left untouched."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(_rank_inplace(m.packed.copy(), m.cols))


def transpose(m: Gf2Matrix) -> Gf2Matrix:
    return Gf2Matrix.from_dense(m.to_dense().T)


def multiply(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    """Product mod 2: row i of the result is the XOR of the rows of ``b`` selected by row i of ``a``."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    out = Gf2Matrix(a.rows, b.cols)
    if not out.packed.size:
        return out
    sel = a.to_dense()
    for i in range(a.rows):
        picked = b.packed[sel[i]]
        if picked.shape[0]:
            out.packed[i] = np.bitwise_xor.reduce(picked, axis=0)
    return out


def delete_column(m: Gf2Matrix, j: int) -> Gf2Matrix:
    if not 0 <= j < m.cols:
        raise IndexError(f"column {j} outside 0..{m.cols - 1}")
    return Gf2Matrix.from_dense(np.delete(m.to_dense(), j, axis=1))
