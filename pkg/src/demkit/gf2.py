"""Bit-packed linear algebra over GF(2).

Rows are packed into 64-bit words; bit j of a row lives at word j // 64,
position j % 64. The external contract is positional bits only.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

_WORD = 64


def _n_words(cols: int) -> int:
    return max(1, -(-cols // _WORD))


class BitMatrix:
    """Dense binary matrix with GF(2) arithmetic.

    Values are treated as immutable after construction; share freely across
    threads. Mutating helpers (``set``) are for construction only.
    """

    __slots__ = ("rows", "cols", "_words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        if words is None:
            words = np.zeros((rows, _n_words(cols)), dtype=np.uint64)
        self._words = words

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.set(i, i, 1)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], cols: int | None = None) -> "BitMatrix":
        rows = [np.asarray(list(r), dtype=np.uint8) & 1 for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        m = cls(len(rows), cols)
        for i, r in enumerate(rows):
            m._words[i] = _pack(r, cols)
        return m

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8) & 1)
        m = cls(arr.shape[0], arr.shape[1])
        for i in range(arr.shape[0]):
            m._words[i] = _pack(arr[i], arr.shape[1])
        return m

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self._words.copy())

    # -- element access ----------------------------------------------------

    def get(self, i: int, j: int) -> int:
        self._check(i, j)
        return int((self._words[i, j // _WORD] >> np.uint64(j % _WORD)) & np.uint64(1))

    def set(self, i: int, j: int, value: int) -> None:
        self._check(i, j)
        mask = np.uint64(1) << np.uint64(j % _WORD)
        if value & 1:
            self._words[i, j // _WORD] |= mask
        else:
            self._words[i, j // _WORD] &= ~mask

    def _check(self, i: int, j: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"bit ({i}, {j}) outside {self.rows}x{self.cols} matrix")

    def row_bits(self, i: int) -> np.ndarray:
        """Row ``i`` as a length-``cols`` uint8 array."""
        return _unpack(self._words[i], self.cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i in range(self.rows):
            out[i] = self.row_bits(i)
        return out

    # -- GF(2) operations ---------------------------------------------------

    def multiply(self, other: "BitMatrix") -> "BitMatrix":
        """GF(2) matrix product ``self @ other``."""
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = BitMatrix(self.rows, other.cols)
        for i in range(self.rows):
            support = np.flatnonzero(self.row_bits(i))
            if support.size:
                out._words[i] = np.bitwise_xor.reduce(other._words[support], axis=0)
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return self.multiply(other)

    def mul_vec(self, vec: np.ndarray) -> np.ndarray:
        """Product with a length-``cols`` bit vector; returns length-``rows`` uint8."""
        vec = np.asarray(vec, dtype=np.uint8) & 1
        if vec.shape != (self.cols,):
            raise ValueError(f"vector length {vec.shape} does not match {self.cols} columns")
        packed = _pack(vec, self.cols)
        acc = np.bitwise_and(self._words, packed)
        return (np.bitwise_count(acc).sum(axis=1) & 1).astype(np.uint8)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def rank(self) -> int:
        words = self._words.copy()
        r = 0
        for c in range(self.cols):
            w, mask = c // _WORD, np.uint64(1) << np.uint64(c % _WORD)
            pivot = None
            for i in range(r, self.rows):
                if words[i, w] & mask:
                    pivot = i
                    break
            if pivot is None:
                continue
            if pivot != r:
                words[[r, pivot]] = words[[pivot, r]]
            hits = np.flatnonzero(words[:, w] & mask)
            hits = hits[hits != r]
            if hits.size:
                words[hits] ^= words[r]
            r += 1
            if r == self.rows:
                break
        return r

    def row_reduce(self) -> tuple["BitMatrix", list[int]]:
        """Reduced row echelon form and its pivot columns."""
        words = self._words.copy()
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            w, mask = c // _WORD, np.uint64(1) << np.uint64(c % _WORD)
            pivot = None
            for i in range(r, self.rows):
                if words[i, w] & mask:
                    pivot = i
                    break
            if pivot is None:
                continue
            if pivot != r:
                words[[r, pivot]] = words[[pivot, r]]
            hits = np.flatnonzero(words[:, w] & mask)
            hits = hits[hits != r]
            if hits.size:
                words[hits] ^= words[r]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return BitMatrix(self.rows, self.cols, words), pivots

    def kernel_basis(self) -> "BitMatrix":
        """Rows form a basis of the right kernel: ``self @ k.T == 0``."""
        rref, pivots = self.row_reduce()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = np.zeros((len(free), self.cols), dtype=np.uint8)
        dense = rref.to_array()
        for t, fc in enumerate(free):
            basis[t, fc] = 1
            for r, pc in enumerate(pivots):
                if dense[r, fc]:
                    basis[t, pc] = 1
        return BitMatrix.from_array(basis) if free else BitMatrix(0, self.cols)

    def solve(self, rhs: np.ndarray) -> np.ndarray | None:
        """One solution ``x`` of ``self @ x = rhs`` over GF(2), or None."""
        rhs = np.asarray(rhs, dtype=np.uint8) & 1
        if rhs.shape != (self.rows,):
            raise ValueError("rhs length mismatch")
        aug = np.concatenate([self.to_array(), rhs[:, None]], axis=1)
        m, n = self.rows, self.cols
        r = 0
        pivots: list[int] = []
        for c in range(n):
            hit = np.flatnonzero(aug[r:, c])
            if hit.size == 0:
                continue
            p = r + int(hit[0])
            if p != r:
                aug[[r, p]] = aug[[p, r]]
            others = np.flatnonzero(aug[:, c])
            others = others[others != r]
            if others.size:
                aug[others] ^= aug[r]
            pivots.append(c)
            r += 1
            if r == m:
                break
        if np.any((aug[r:, :n].sum(axis=1) == 0) & (aug[r:, n] == 1)):
            return None
        x = np.zeros(n, dtype=np.uint8)
        for i, c in enumerate(pivots):
            x[c] = aug[i, n]
        return x

    def row_space_contains(self, vec: np.ndarray) -> bool:
        vec = np.asarray(vec, dtype=np.uint8) & 1
        if self.rows == 0:
            return not vec.any()
        stacked = BitMatrix.from_array(np.vstack([self.to_array(), vec]))
        return stacked.rank() == self.rank()

    def same_row_space(self, other: "BitMatrix") -> bool:
        if self.cols != other.cols:
            return False
        ra, rb = self.rank(), other.rank()
        if ra != rb:
            return False
        stacked = BitMatrix.from_array(np.vstack([self.to_array(), other.to_array()]))
        return stacked.rank() == ra

    def popcount(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def row_popcounts(self) -> np.ndarray:
        return np.bitwise_count(self._words).sum(axis=1).astype(np.int64)

    def sparsify_rows(self) -> "BitMatrix":
        """Greedy row-space-preserving sparsification.

        Repeatedly replaces row i with row i XOR row j whenever that strictly
        lowers its popcount, lowest (i, j) first, until no replacement helps.
        """
        words = self._words.copy()
        weights = np.bitwise_count(words).sum(axis=1)
        changed = True
        while changed:
            changed = False
            for i in range(self.rows):
                for j in range(self.rows):
                    if i == j:
                        continue
                    cand = words[i] ^ words[j]
                    w = int(np.bitwise_count(cand).sum())
                    if w < weights[i]:
                        words[i] = cand
                        weights[i] = w
                        changed = True
        return BitMatrix(self.rows, self.cols, words)

    # -- misc ----------------------------------------------------------------

    def column_key(self, j: int) -> tuple[int, ...]:
        """Hashable identity of column ``j`` (row indices with a set bit)."""
        if not (0 <= j < self.cols):
            raise IndexError(f"column {j} outside {self.cols}")
        w, mask = j // _WORD, np.uint64(1) << np.uint64(j % _WORD)
        return tuple(int(i) for i in np.flatnonzero(self._words[:, w] & mask))

    def column_bits(self, j: int) -> np.ndarray:
        out = np.zeros(self.rows, dtype=np.uint8)
        out[list(self.column_key(j))] = 1
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self._words, other._words))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._words.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols > 400:
            return f"BitMatrix({self.rows}x{self.cols})"
        body = "\n".join("".join(str(b) for b in self.row_bits(i)) for i in range(self.rows))
        return f"BitMatrix({self.rows}x{self.cols})\n{body}"


def _pack(bits: np.ndarray, cols: int) -> np.ndarray:
    padded = np.zeros(_n_words(cols) * _WORD, dtype=np.uint8)
    padded[:cols] = bits
    return np.packbits(padded, bitorder="little").view(np.uint64)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:cols]
