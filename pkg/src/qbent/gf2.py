"""Vectors and square matrices over F2, stored as int bitsets.

Conventions used everywhere in the package:

* A vector ``a = (a_1, ..., a_n)`` has integer index ``sum(a_i << (i - 1))``,
  so ``x_1`` is the least significant bit.
* Matrices act on row vectors from the right, ``a -> aA``.  Row ``i`` of a
  :class:`BitMatrix` is the image ``e_i A`` and is stored as a vector index;
  bit ``j - 1`` of that index is the entry ``A[i][j]``.
* The text form lists rows separated by ``;``, each row written left to
  right as ``A[i][1] A[i][2] ... A[i][n]``.  For example ``"111;010;001"``
  maps ``e_1`` to ``(1, 1, 1)``.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_STRUCT_N = 20
MAX_ORDER_N = 30
DEFAULT_ENUM_CAP = 5


class DimensionError(ValueError):
    """Operands of incompatible or unsupported dimension."""


class NotInvertibleError(ValueError):
    """The matrix is singular, hence not an element of GL_n."""


class CapacityError(ValueError):
    """The requested enumeration exceeds the configured cap."""


@dataclass(frozen=True)
class BitVec:
    n: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.n:
            raise DimensionError(f"expected {self.n} bits, got {len(self.bits)}")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @classmethod
    def from_index(cls, n: int, k: int) -> BitVec:
        if not 0 <= k < (1 << n):
            raise DimensionError(f"index {k} out of range for n={n}")
        return cls(n, tuple((k >> i) & 1 for i in range(n)))

    @classmethod
    def from_text(cls, s: str) -> BitVec:
        return cls(len(s), tuple(int(c) for c in s))

    @property
    def index(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


class _Zero:
    """The n x n zero matrix; indexes the imbalance coefficient, never in GL_n."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "ZERO"

    def to_text(self) -> str:
        return "0"


ZERO = _Zero()


@dataclass(frozen=True)
class BitMatrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise DimensionError(f"expected {self.n} rows, got {len(self.rows)}")
        lim = 1 << self.n
        if any(not 0 <= r < lim for r in self.rows):
            raise DimensionError("row index exceeds 2^n")

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> BitMatrix:
        n = len(entries)
        return cls(n, tuple(BitVec(n, tuple(r)).index for r in entries))

    @classmethod
    def from_text(cls, text: str) -> BitMatrix:
        parts = [p.strip() for p in text.strip().split(";")]
        n = len(parts)
        for p in parts:
            if len(p) != n or set(p) - {"0", "1"}:
                raise ValueError(f"bad matrix row {p!r} in {text!r}; expected {n} binary digits")
        return cls(n, tuple(BitVec.from_text(p).index for p in parts))

    def to_text(self) -> str:
        return ";".join(str(BitVec.from_index(self.n, r)) for r in self.rows)

    def to_lists(self) -> list[list[int]]:
        return [list(BitVec.from_index(self.n, r).bits) for r in self.rows]

    def __str__(self) -> str:
        return self.to_text()

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if other.n != self.n:
            raise DimensionError("dimension mismatch in matrix product")
        return BitMatrix(self.n, tuple(mul_index(r, other.rows) for r in self.rows))

    def transpose(self) -> BitMatrix:
        n = self.n
        cols = []
        for j in range(n):
            cols.append(sum(((self.rows[i] >> j) & 1) << i for i in range(n)))
        return BitMatrix(n, tuple(cols))


def mul_index(k: int, rows: Sequence[int]) -> int:
    """Index of ``aA`` where ``a`` has index ``k`` and ``A`` has the given rows."""
    out = 0
    i = 0
    while k:
        if k & 1:
            out ^= rows[i]
        k >>= 1
        i += 1
    return out


def vec_mat_mul(a: BitVec, A: BitMatrix) -> BitVec:
    if a.n != A.n:
        raise DimensionError(f"vector has n={a.n}, matrix has n={A.n}")
    return BitVec.from_index(A.n, mul_index(a.index, A.rows))


def _inverse_rows(n: int, rows: Sequence[int]) -> tuple[int, ...] | None:
    # Gauss-Jordan on [A | E]; the right half occupies bits n..2n-1.
    aug = [rows[i] | (1 << (n + i)) for i in range(n)]
    for col in range(n):
        bit = 1 << col
        piv = next((r for r in range(col, n) if aug[r] & bit), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(n):
            if r != col and aug[r] & bit:
                aug[r] ^= aug[col]
    return tuple(a >> n for a in aug)


def invert(A: BitMatrix) -> BitMatrix:
    inv = _inverse_rows(A.n, A.rows)
    if inv is None:
        raise NotInvertibleError(f"matrix {A.to_text()} is singular, not in GL_{A.n}")
    return BitMatrix(A.n, inv)


def is_invertible(A: BitMatrix) -> bool:
    return rank_of(list(A.rows)) == A.n


def gl_order(n: int) -> int:
    """|GL_n(F2)| = (2^n - 1)(2^n - 2)...(2^n - 2^(n-1))."""
    if not 1 <= n <= MAX_ORDER_N:
        raise DimensionError(f"gl_order supports 1 <= n <= {MAX_ORDER_N}, got {n}")
    out = 1
    for i in range(n):
        out *= (1 << n) - (1 << i)
    return out


def enum_cap(cap: int | None = None) -> int:
    """Effective full-enumeration cap; QBENT_MAX_N may lower it, never raise it."""
    base = DEFAULT_ENUM_CAP if cap is None else cap
    env = os.environ.get("QBENT_MAX_N")
    if env:
        base = min(base, int(env))
    return base


def check_enumerable(n: int, cap: int | None = None) -> None:
    c = enum_cap(cap)
    if n < 1:
        raise DimensionError(f"n must be positive, got {n}")
    if n > c:
        raise CapacityError(f"full GL_{n} enumeration exceeds the cap n <= {c}")


def _as_index(v) -> int:
    return v.index if isinstance(v, BitVec) else int(v)


def _reduce(v: int, basis: list[int]) -> int:
    # basis vectors have distinct leading bits and are kept in descending order
    for b in basis:
        v = min(v, v ^ b)
    return v


def _insert(v: int, basis: list[int]) -> bool:
    v = _reduce(v, basis)
    if v == 0:
        return False
    basis.append(v)
    basis.sort(reverse=True)
    return True


def rank_of(vs: Iterable[BitVec | int]) -> int:
    vs = list(vs)
    dims = {v.n for v in vs if isinstance(v, BitVec)}
    if len(dims) > 1:
        raise DimensionError(f"vectors of mixed dimension {sorted(dims)}")
    basis: list[int] = []
    for v in vs:
        _insert(_as_index(v), basis)
    return len(basis)


def _complete_basis(vs: list[int], n: int) -> list[int]:
    basis: list[int] = []
    for v in vs:
        if not _insert(v, basis):
            raise ValueError("vectors are linearly dependent")
    out = list(vs)
    v = 1
    while len(out) < n:
        if _insert(v, basis):
            out.append(v)
        v += 1
    return out


def mapping_matrix(src: Sequence[BitVec | int], dst: Sequence[BitVec | int], n: int) -> BitMatrix:
    """Some M in GL_n with ``src[i] M = dst[i]`` for every i.

    Both lists are completed to bases with the smallest-index vectors that
    keep them independent, then ``M = S^-1 D``.
    """
    if len(src) != len(dst) or len(src) > n:
        raise DimensionError("src and dst must have equal length <= n")
    s = _complete_basis([_as_index(v) for v in src], n)
    d = _complete_basis([_as_index(v) for v in dst], n)
    return invert(BitMatrix(n, tuple(s))) @ BitMatrix(n, tuple(d))


# ---------------------------------------------------------------------------
# Bulk enumeration as numpy row arrays


def _row_dtype(n: int):
    return np.uint8 if n <= 8 else np.uint32


def _extend(prefix: np.ndarray, n: int) -> np.ndarray:
    """Append every admissible next row to each partial basis, in lex order."""
    m, k = prefix.shape
    span = np.zeros((m, 1 << k), dtype=np.int64)
    for j in range(k):
        span[:, 1 << j : 2 << j] = span[:, : 1 << j] ^ prefix[:, j : j + 1]
    free = np.ones((m, 1 << n), dtype=bool)
    free[np.arange(m)[:, None], span] = False
    ri, v = np.nonzero(free)
    out = np.empty((len(ri), k + 1), dtype=prefix.dtype)
    out[:, :k] = prefix[ri]
    out[:, k] = v
    return out


def gl_blocks(n: int, cap: int | None = None, chunk: int = 4096) -> Iterator[np.ndarray]:
    """Yield GL_n as consecutive (m, n) arrays of row indices, in enumeration order."""
    check_enumerable(n, cap)
    head = max(n - 2, 0)
    prefix = np.zeros((1, 0), dtype=_row_dtype(n))
    for _ in range(head):
        prefix = _extend(prefix, n)
    for s in range(0, len(prefix), chunk):
        p = prefix[s : s + chunk]
        for _ in range(n - head):
            p = _extend(p, n)
        yield p


@lru_cache(maxsize=8)
def _gl_rows_cached(n: int) -> np.ndarray:
    out = np.concatenate(list(gl_blocks(n, cap=n)))
    out.setflags(write=False)
    return out


def gl_rows(n: int, cap: int | None = None) -> np.ndarray:
    """All of GL_n as one read-only (N, n) array; intended for n <= 4."""
    check_enumerable(n, cap)
    return _gl_rows_cached(n)


def enumerate_gl(n: int, cap: int | None = None) -> Iterator[BitMatrix]:
    """Every element of GL_n once.

    Order: rows are chosen lexicographically by index, each row ranging over
    the vectors outside the span of the rows before it.  The identity is
    always first.
    """
    for block in gl_blocks(n, cap):
        for r in block.tolist():
            yield BitMatrix(n, tuple(r))


def image_table(rows: np.ndarray, n: int) -> np.ndarray:
    """``out[m, k]`` is the index of ``a A_m`` for the vector ``a`` with index k."""
    m = rows.shape[0]
    dt = np.uint8 if n <= 8 else np.uint32
    img = np.zeros((m, 1 << n), dtype=dt)
    for j in range(n):
        img[:, 1 << j : 2 << j] = img[:, : 1 << j] ^ rows[:, j : j + 1].astype(dt)
    return img


def inverse_image_table(rows: np.ndarray, n: int) -> np.ndarray:
    """``out[m, b]`` is the index of ``b A_m^-1``."""
    img = image_table(rows, n)
    inv = np.empty_like(img)
    inv[np.arange(img.shape[0])[:, None], img] = np.arange(1 << n, dtype=img.dtype)
    return inv


# ---------------------------------------------------------------------------
# Sampling


def _sample_rows(n: int, rnd: random.Random) -> tuple[int, ...]:
    basis: list[int] = []
    rows = []
    while len(rows) < n:
        v = rnd.getrandbits(n)
        # rejection from V_n is uniform over the complement of the current span
        if _insert(v, basis):
            rows.append(v)
    return tuple(rows)


def sample_gl_many(n: int, k: int, seed: int) -> list[BitMatrix]:
    if not 1 <= n <= MAX_STRUCT_N:
        raise DimensionError(f"sampling supports 1 <= n <= {MAX_STRUCT_N}, got {n}")
    rnd = random.Random(seed)
    return [BitMatrix(n, _sample_rows(n, rnd)) for _ in range(k)]


def sample_gl(n: int, seed: int) -> BitMatrix:
    """A uniformly random element of GL_n, fixed by ``seed``."""
    return sample_gl_many(n, 1, seed)[0]


def rows_array(mats: Sequence[BitMatrix]) -> np.ndarray:
    if not mats:
        raise ValueError("empty matrix list")
    n = mats[0].n
    return np.array([m.rows for m in mats], dtype=_row_dtype(n)).reshape(len(mats), n)
