"""Boolean functions as truth tables.

Entry ``k`` of a truth table is ``f(a)`` for the vector ``a`` with index
``k`` (``x_1`` least significant).  The hex serialization packs
``f(0), f(1), ..., f(2^n - 1)`` big-endian, so the first bit is the most
significant bit of the first hex digit; ``x1*x2+x3`` at n=3 is ``"1E"``.
Tables shorter than four bits are zero-padded on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import anf as _anf
from .anf import AnfExpr, AnfSyntaxError
from .gf2 import (
    MAX_STRUCT_N,
    BitMatrix,
    BitVec,
    DimensionError,
    NotInvertibleError,
    _inverse_rows,
    image_table,
)

__all__ = [
    "AnfExpr",
    "AnfSyntaxError",
    "BoolFunc",
    "Classification",
    "classify",
    "compose",
    "correlation",
    "distance",
    "imbalance",
    "is_bent",
    "linear_function",
    "parse_anf",
    "support",
    "to_anf",
    "walsh_spectrum",
    "weight",
]


class BoolFunc:
    """A Boolean function of dimension n; immutable, hashable."""

    __slots__ = ("n", "tt", "_key")

    def __init__(self, n: int, tt):
        if not 1 <= n <= MAX_STRUCT_N:
            raise DimensionError(f"n must be in 1..{MAX_STRUCT_N}, got {n}")
        arr = np.array(tt, dtype=np.uint8).reshape(-1)
        if arr.size != 1 << n:
            raise DimensionError(f"truth table must have {1 << n} entries, got {arr.size}")
        if arr.max(initial=0) > 1:
            raise ValueError("truth table entries must be 0 or 1")
        arr.setflags(write=False)
        self.n = n
        self.tt = arr
        self._key = arr.tobytes()

    @classmethod
    def from_hex(cls, text: str, n: int) -> BoolFunc:
        size = 1 << n
        digits = max(1, size // 4) if size >= 4 else 1
        h = text.strip()
        if h.lower().startswith("0x"):
            h = h[2:]
        if len(h) != digits:
            raise ValueError(f"hex table for n={n} needs {digits} digits, got {len(h)} in {text!r}")
        try:
            value = int(h, 16)
        except ValueError:
            raise ValueError(f"invalid hex digits in {text!r}") from None
        nbits = digits * 4
        bits = [(value >> (nbits - 1 - i)) & 1 for i in range(nbits)]
        if any(bits[size:]):
            raise ValueError(f"padding bits of {text!r} must be zero for n={n}")
        return cls(n, bits[:size])

    @classmethod
    def from_packed(cls, n: int, value: int) -> BoolFunc:
        """From an integer whose bit k is f(k)."""
        return cls(n, [(value >> k) & 1 for k in range(1 << n)])

    @classmethod
    def zero(cls, n: int) -> BoolFunc:
        return cls(n, np.zeros(1 << n, dtype=np.uint8))

    @property
    def hex(self) -> str:
        bits = self.tt.tolist()
        bits += [0] * (-len(bits) % 4)
        return "".join("%X" % int("".join(map(str, bits[i : i + 4])), 2) for i in range(0, len(bits), 4))

    @property
    def packed(self) -> int:
        return int.from_bytes(np.packbits(self.tt, bitorder="little").tobytes(), "little")

    def __call__(self, a: BitVec | int) -> int:
        return int(self.tt[a.index if isinstance(a, BitVec) else a])

    def __add__(self, other) -> BoolFunc:
        if isinstance(other, BoolFunc):
            _same_n(self, other)
            return BoolFunc(self.n, self.tt ^ other.tt)
        if other in (0, 1):
            return BoolFunc(self.n, self.tt ^ np.uint8(other))
        return NotImplemented

    __radd__ = __add__

    def __eq__(self, other) -> bool:
        return isinstance(other, BoolFunc) and self.n == other.n and self._key == other._key

    def __hash__(self) -> int:
        return hash((self.n, self._key))

    def __repr__(self) -> str:
        return f"BoolFunc(n={self.n}, hex={self.hex!r})"

    def __str__(self) -> str:
        return str(to_anf(self))


def _same_n(f: BoolFunc, g: BoolFunc) -> None:
    if f.n != g.n:
        raise DimensionError(f"dimension mismatch: {f.n} vs {g.n}")


def _mobius(bits: np.ndarray, n: int) -> np.ndarray:
    a = bits.astype(np.uint8).copy()
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] ^= v[:, 0, :]
    return a


def parse_anf(text: str, n: int) -> BoolFunc:
    expr = _anf.parse(text, n)
    return from_anf(expr)


def from_anf(expr: AnfExpr) -> BoolFunc:
    coeffs = np.zeros(1 << expr.n, dtype=np.uint8)
    for m in expr.masks():
        coeffs[m] ^= 1
    # the binary Moebius transform is an involution
    return BoolFunc(expr.n, _mobius(coeffs, expr.n))


def to_anf(f: BoolFunc) -> AnfExpr:
    coeffs = _mobius(f.tt, f.n)
    return AnfExpr.from_masks(f.n, np.flatnonzero(coeffs).tolist())


def linear_function(v: BitVec | int, n: int) -> BoolFunc:
    """g_v(a) = v . a"""
    k = v.index if isinstance(v, BitVec) else v
    idx = np.arange(1 << n, dtype=np.int64) & k
    return BoolFunc(n, np.bitwise_count(idx) & 1)


def weight(f: BoolFunc) -> int:
    return int(f.tt.sum(dtype=np.int64))


def imbalance(f: BoolFunc) -> int:
    return (1 << f.n) - 2 * weight(f)


def distance(f: BoolFunc, g: BoolFunc) -> int:
    _same_n(f, g)
    return int(np.count_nonzero(f.tt != g.tt))


def correlation(f: BoolFunc, g: BoolFunc) -> int:
    """W(f, g) = sum (-1)^(f(a) + g(a)) = 2^n - 2 d(f, g)."""
    return (1 << f.n) - 2 * distance(f, g)


def walsh_spectrum(f: BoolFunc) -> np.ndarray:
    """Fast Walsh-Hadamard transform; entry k is W(f)(v) for the v with index k."""
    s = 1 - 2 * f.tt.astype(np.int64)
    for i in range(f.n):
        v = s.reshape(-1, 2, 1 << i)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
    return s


def is_bent(f: BoolFunc) -> bool:
    if f.n % 2:
        return False
    return bool(np.all(np.abs(walsh_spectrum(f)) == 1 << (f.n // 2)))


@dataclass(frozen=True)
class Classification:
    degree: int
    is_affine: bool
    is_balanced: bool


def classify(f: BoolFunc) -> Classification:
    deg = to_anf(f).degree
    return Classification(deg, deg <= 1, 2 * weight(f) == 1 << f.n)


def degree(f: BoolFunc) -> int:
    return to_anf(f).degree


def compose(f: BoolFunc, A: BitMatrix) -> BoolFunc:
    """f_A(a) = f(aA)."""
    if f.n != A.n:
        raise DimensionError(f"function has n={f.n}, matrix has n={A.n}")
    if _inverse_rows(A.n, A.rows) is None:
        raise NotInvertibleError(f"matrix {A.to_text()} is singular")
    rows = np.array([A.rows], dtype=np.uint32)
    return BoolFunc(f.n, f.tt[image_table(rows, f.n)[0]])


def support(f: BoolFunc) -> list[BitVec]:
    return [BitVec.from_index(f.n, int(k)) for k in np.flatnonzero(f.tt)]


def functions_from_packed(n: int, values: Sequence[int]) -> list[BoolFunc]:
    return [BoolFunc.from_packed(n, int(v)) for v in values]
