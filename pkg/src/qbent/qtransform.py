"""q-transform coefficients, spectra over GL_n and the derived predicates.

``W_q(f)(A) = sum_a (-1)^(f(a) + q(aA))`` for A in GL_n, and the coefficient at
the zero matrix is the imbalance ``I_f``.

For full-group work (n <= 5) every ``q_A`` is held as one packed integer per
matrix, in enumeration order, so a coefficient is
``2^n - 2 popcount(f ^ q_A)``.  When ``wt(q)`` is small the packed ``q_A`` are
built from ``supp(q_A) = supp(q) A^-1`` instead of from full images, which is
the support-intersection formula
``W = 2^n - 2 wt(f) - 2 wt(q) + 4 |supp(f) & supp(q) A^-1|`` in bit-parallel form.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Callable, Sequence

import numpy as np

from .boolfn import BoolFunc, compose, correlation, imbalance, weight
from .gf2 import (
    MAX_ORDER_N,
    ZERO,
    BitMatrix,
    DimensionError,
    NotInvertibleError,
    _inverse_rows,
    check_enumerable,
    gl_blocks,
    gl_order,
    gl_rows,
    image_table,
    inverse_image_table,
    mul_index,
    rows_array,
    sample_gl_many,
)

SUPPORT_THRESHOLD = 64
_BLOCK_BUDGET = 1 << 22


class PreconditionError(ValueError):
    """An argument violates the documented precondition of an operation."""


# ---------------------------------------------------------------------------
# The nearly-bent bound


@dataclass(frozen=True)
class RhoParams:
    n: int
    wt_q: int
    I_q: int
    rho: int
    ratio_num: int
    ratio_den: int
    exact: bool

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.ratio_num, self.ratio_den)


def reflect_weight(n: int, wt_q: int) -> int:
    """Replace wt(q) by wt(1 + q) when it exceeds 2^(n-1); |I_q| is unchanged."""
    return (1 << n) - wt_q if 2 * wt_q > 1 << n else wt_q


def rho(n: int, wt_q: int) -> RhoParams:
    """Least r >= 0 with r^2 (2^n - 1) >= 2^(2n) - I_q^2, in integer arithmetic."""
    if not 2 < n <= MAX_ORDER_N:
        raise DimensionError(f"rho needs 2 < n <= {MAX_ORDER_N}, got {n}")
    if not 0 < wt_q < 1 << n:
        raise PreconditionError(f"wt(q) must lie in 1..2^n - 1, got {wt_q}")
    w = reflect_weight(n, wt_q)
    I_q = (1 << n) - 2 * w
    num = (1 << (2 * n)) - I_q * I_q
    den = (1 << n) - 1
    r = isqrt(num // den)
    while r * r * den < num:
        r += 1
    return RhoParams(n, w, I_q, r, num, den, r * r * den == num)


def rho_for(q: BoolFunc) -> RhoParams:
    return rho(q.n, weight(q))


def allowed_values(n: int, wt_q: int) -> frozenset[int]:
    """Magnitudes |W_q(f)(A)| possible for balanced f when wt(q) = w <= 2^(n-1)."""
    w = wt_q
    if not 0 <= w <= 1 << (n - 1):
        raise PreconditionError(f"allowed_values needs wt(q) <= 2^(n-1), got {w}")
    start = 0 if w % 2 == 0 else 2
    return frozenset(range(start, 2 * w + 1, 4))


# ---------------------------------------------------------------------------
# Single coefficients


def _check_operands(f: BoolFunc, q: BoolFunc, A: BitMatrix) -> tuple[int, ...]:
    if not f.n == q.n == A.n:
        raise DimensionError(f"dimension mismatch: f {f.n}, q {q.n}, A {A.n}")
    inv = _inverse_rows(A.n, A.rows)
    if inv is None:
        raise NotInvertibleError(f"matrix {A.to_text()} is singular")
    return inv


def q_coeff(f: BoolFunc, q: BoolFunc, A: BitMatrix, method: str = "auto",
            threshold: int = SUPPORT_THRESHOLD) -> int:
    """W_q(f)(A).

    ``method`` is ``"direct"`` (sum over V_n), ``"support"`` (intersection of
    supp(f) with supp(q) A^-1) or ``"auto"`` (support when wt(q) <= threshold).
    """
    inv = _check_operands(f, q, A)
    wq = weight(q)
    if method == "auto":
        method = "support" if wq <= threshold else "direct"
    if method == "direct":
        return correlation(f, compose(q, A))
    if method != "support":
        raise ValueError(f"unknown method {method!r}")
    hits = sum(int(f.tt[mul_index(int(s), inv)]) for s in np.flatnonzero(q.tt))
    return (1 << f.n) - 2 * weight(f) - 2 * wq + 4 * hits


def coefficients_for(f: BoolFunc, q: BoolFunc, mats: Sequence[BitMatrix],
                     threshold: int = SUPPORT_THRESHOLD) -> np.ndarray:
    """Coefficients at an explicit list of matrices (any n), in list order."""
    if not mats:
        return np.zeros(0, dtype=np.int64)
    n = f.n
    if not f.n == q.n == mats[0].n:
        raise DimensionError("dimension mismatch")
    wq = weight(q)
    if wq <= threshold:
        base = (1 << n) - 2 * weight(f) - 2 * wq
        supp = [int(s) for s in np.flatnonzero(q.tt)]
        out = np.empty(len(mats), dtype=np.int64)
        for i, A in enumerate(mats):
            inv = _inverse_rows(n, A.rows)
            if inv is None:
                raise NotInvertibleError(f"matrix {A.to_text()} is singular")
            out[i] = base + 4 * sum(int(f.tt[mul_index(s, inv)]) for s in supp)
        return out
    rows = rows_array(mats)
    step = max(1, _BLOCK_BUDGET >> n)
    parts = []
    for s in range(0, len(mats), step):
        qa = q.tt[image_table(rows[s : s + step], n)]
        parts.append((1 << n) - 2 * np.count_nonzero(qa != f.tt, axis=1).astype(np.int64))
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# Packed full-group tables


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Rows of 0/1 (m, 2^n) with n <= 6 -> uint64 with bit k = entry k."""
    w = np.left_shift(np.uint64(1), np.arange(bits.shape[1], dtype=np.uint64))
    return np.bitwise_or.reduce(bits.astype(np.uint64) * w, axis=1)


def _table_block(q: BoolFunc, rows: np.ndarray, use_support: bool) -> np.ndarray:
    n = q.n
    if use_support:
        inv = inverse_image_table(rows, n)
        out = np.zeros(rows.shape[0], dtype=np.uint64)
        for s in np.flatnonzero(q.tt):
            out |= np.left_shift(np.uint64(1), inv[:, s].astype(np.uint64))
        return out
    return _pack_bits(q.tt[image_table(rows, n)])


def build_q_table(q: BoolFunc, threshold: int = SUPPORT_THRESHOLD, path: str = "auto") -> np.ndarray:
    """Packed ``q_A`` for every A in GL_n, in enumeration order."""
    check_enumerable(q.n)
    if path == "auto":
        use_support = weight(q) <= threshold
    elif path in ("support", "table"):
        use_support = path == "support"
    else:
        raise ValueError(f"unknown path {path!r}")
    if q.n <= 4:
        out = _small_table(q, use_support)
    else:
        out = np.concatenate([_table_block(q, b, use_support) for b in gl_blocks(q.n)])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def _small_images(n: int) -> tuple[np.ndarray, np.ndarray]:
    rows = gl_rows(n)
    return image_table(rows, n), inverse_image_table(rows, n)


def _small_table(q: BoolFunc, use_support: bool) -> np.ndarray:
    img, inv = _small_images(q.n)
    if use_support:
        out = np.zeros(len(inv), dtype=np.uint64)
        for s in np.flatnonzero(q.tt):
            out |= np.left_shift(np.uint64(1), inv[:, s].astype(np.uint64))
        return out
    return _pack_bits(q.tt[img])


@lru_cache(maxsize=16)
def q_table(q: BoolFunc) -> np.ndarray:
    return build_q_table(q)


def popcount_coeffs(n: int, fpack, table: np.ndarray) -> np.ndarray:
    """2^n - 2 popcount(f ^ q_A), broadcasting ``fpack`` against ``table``."""
    x = np.bitwise_xor(np.asarray(fpack, dtype=np.uint64), table)
    return (1 << n) - 2 * np.bitwise_count(x).astype(np.int64)


def gl_coefficients(f: BoolFunc, q: BoolFunc) -> np.ndarray:
    """W_q(f)(A) for every A in GL_n, in enumeration order (n <= 5)."""
    if f.n != q.n:
        raise DimensionError("dimension mismatch")
    return popcount_coeffs(f.n, np.uint64(f.packed), q_table(q))


def gl_matrix_at(n: int, index: int) -> BitMatrix:
    """The matrix at position ``index`` of the GL_n enumeration."""
    seen = 0
    for block in gl_blocks(n):
        if index < seen + len(block):
            return BitMatrix(n, tuple(int(x) for x in block[index - seen]))
        seen += len(block)
    raise IndexError(f"GL_{n} has only {seen} elements")


def scan(n: int, fpacks: np.ndarray, table: np.ndarray, violates: Callable[[np.ndarray], np.ndarray],
         early_abort: bool = True) -> tuple[np.ndarray, int]:
    """First violating matrix index per candidate (-1 if none) and coefficients evaluated.

    The identity (index 0) is probed alone first; later blocks grow
    geometrically and only candidates still alive are evaluated.
    """
    fpacks = np.asarray(fpacks, dtype=np.uint64)
    first = np.full(len(fpacks), -1, dtype=np.int64)
    alive = np.arange(len(fpacks))
    N = len(table)
    pos, width, evaluated = 0, 1, 0
    while pos < N and len(alive):
        step = min(width, N - pos, max(1, _BLOCK_BUDGET // len(alive)))
        W = popcount_coeffs(n, fpacks[alive][:, None], table[None, pos : pos + step])
        bad = violates(W)
        evaluated += W.size
        hit = bad.any(axis=1)
        fresh = hit & (first[alive] < 0)
        first[alive[fresh]] = pos + np.argmax(bad[fresh], axis=1)
        if early_abort:
            alive = alive[~hit]
        pos += step
        width = 64 if width == 1 else width * 2
    return first, evaluated


# ---------------------------------------------------------------------------
# Spectra and predicates


@dataclass
class QSpectrum:
    n: int
    mode: str
    histogram: dict[int, int]
    max_abs: int
    witness_max: BitMatrix | None
    witness_rho: BitMatrix | None
    zero_coeff: int
    rho: int | None
    samples: int | None = None
    seed: int | None = None

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    def magnitudes(self) -> dict[int, int]:
        out: Counter[int] = Counter()
        for k, c in self.histogram.items():
            out[abs(k)] += c
        return dict(sorted(out.items()))


def _rho_or_none(q: BoolFunc) -> int | None:
    wq = weight(q)
    if q.n <= 2 or wq in (0, 1 << q.n):
        return None
    return rho(q.n, wq).rho


def q_spectrum(f: BoolFunc, q: BoolFunc, samples: int | None = None, seed: int = 0) -> QSpectrum:
    """Histogram of W_q(f)(A) over all of GL_n, or over ``samples`` seeded draws."""
    if f.n != q.n:
        raise DimensionError("dimension mismatch")
    n = f.n
    r = _rho_or_none(q)
    if samples is None:
        W = gl_coefficients(f, q)
        at = lambda i: gl_matrix_at(n, i)  # noqa: E731
        mode = "full"
    else:
        mats = sample_gl_many(n, samples, seed)
        W = coefficients_for(f, q, mats)
        at = mats.__getitem__
        mode = "sampled"
    vals, counts = np.unique(W, return_counts=True)
    mags = np.abs(W)
    max_abs = int(mags.max()) if len(W) else 0
    w_max = at(int(np.argmax(mags == max_abs))) if len(W) else None
    w_rho = None
    if r is not None and len(W):
        hit = np.flatnonzero(mags == r)
        w_rho = at(int(hit[0])) if len(hit) else None
    return QSpectrum(
        n=n,
        mode=mode,
        histogram={int(v): int(c) for v, c in zip(vals, counts)},
        max_abs=max_abs,
        witness_max=w_max,
        witness_rho=w_rho,
        zero_coeff=imbalance(f),
        rho=r,
        samples=samples,
        seed=seed if samples is not None else None,
    )


@dataclass(frozen=True)
class QVerdict:
    holds: bool
    witness: object = None  # BitMatrix, ZERO or None
    value: int | None = None
    reason: str = ""


def is_q_bent(f: BoolFunc, q: BoolFunc) -> QVerdict:
    """|W_q(f)(A)| = 2^(n/2) for every A in GL_n and at the zero matrix."""
    if f.n != q.n:
        raise DimensionError("dimension mismatch")
    n = f.n
    if 2 * weight(q) != 1 << n:
        raise PreconditionError("q-bentness is defined for balanced q only")
    if n % 2:
        return QVerdict(False, None, None, "odd n")
    target = 1 << (n // 2)
    I_f = imbalance(f)
    if abs(I_f) != target:
        return QVerdict(False, ZERO, I_f, "imbalance")
    table = q_table(q)
    first, _ = scan(n, np.array([f.packed], dtype=np.uint64), table, lambda W: np.abs(W) != target)
    if first[0] < 0:
        return QVerdict(True, None, None, "")
    i = int(first[0])
    value = int(popcount_coeffs(n, np.uint64(f.packed), table[i]))
    return QVerdict(False, gl_matrix_at(n, i), value, "coefficient magnitude")


def is_q_nearly_bent(f: BoolFunc, q: BoolFunc) -> QVerdict:
    """Balanced f with |W_q(f)(A)| <= rho_q on all of GL_n.

    On success the witness is the first matrix with |W| = rho_q; on failure it
    is the first violating matrix, the identity being tested first.
    """
    if f.n != q.n:
        raise DimensionError("dimension mismatch")
    n = f.n
    if 2 * weight(f) != 1 << n:
        return QVerdict(False, None, None, "not balanced")
    bound = rho(n, weight(q)).rho
    table = q_table(q)
    fp = np.array([f.packed], dtype=np.uint64)
    first, _ = scan(n, fp, table, lambda W: np.abs(W) > bound)
    if first[0] >= 0:
        i = int(first[0])
        return QVerdict(False, gl_matrix_at(n, i), int(popcount_coeffs(n, fp[0], table[i])), "exceeds rho")
    W = popcount_coeffs(n, fp[0], table)
    hit = np.flatnonzero(np.abs(W) == bound)
    if not len(hit):
        return QVerdict(True, None, None, "no coefficient attains rho")
    i = int(hit[0])
    return QVerdict(True, gl_matrix_at(n, i), int(W[i]), "")


@dataclass(frozen=True)
class Plateau:
    plateaued: bool
    lam: int | None
    degenerate: bool = False
    magnitudes: tuple[int, ...] = ()
    zero_coeff_fits: bool | None = None


def is_q_plateaued(f: BoolFunc, q: BoolFunc) -> Plateau:
    """Whether every GL_n coefficient lies in {0, +-lam} for one lam > 0."""
    W = gl_coefficients(f, q)
    mags = tuple(int(m) for m in np.unique(np.abs(W)))
    nonzero = [m for m in mags if m]
    if not nonzero:
        return Plateau(False, None, True, mags, None)
    if len(nonzero) > 1:
        return Plateau(False, None, False, mags, None)
    lam = nonzero[0]
    return Plateau(True, lam, False, mags, abs(imbalance(f)) in (0, lam))


@dataclass(frozen=True)
class MomentReport:
    n: int
    N: int
    sum_sq: int
    eprime: Fraction
    e: Fraction
    eq1_holds: bool
    eq2_holds: bool
    eq1_rhs: Fraction = field(default=Fraction(0))


def second_moments(f: BoolFunc, q: BoolFunc) -> MomentReport:
    """Exact second moments of the q-transform over GL_n and under omega."""
    if f.n != q.n:
        raise DimensionError("dimension mismatch")
    n = f.n
    if 2 * weight(q) != 1 << n:
        raise PreconditionError("moment identities are stated for balanced q")
    W = gl_coefficients(f, q)
    sum_sq = int(np.dot(W, W))
    N = gl_order(n)
    I_f = imbalance(f)
    two_n = 1 << n
    rhs = Fraction(N * (two_n * two_n - I_f * I_f), two_n - 1)
    eprime = Fraction(sum_sq, N)
    # omega(A) = (2^n - 1)/(2^n N) on GL_n, omega(0) = 1/2^n
    e = Fraction(two_n - 1, two_n * N) * sum_sq + Fraction(I_f * I_f, two_n)
    return MomentReport(n, N, sum_sq, eprime, e, sum_sq == rhs, e == two_n, rhs)


# ---------------------------------------------------------------------------
# Stabilizers and orbits


def _row_keys(rows: np.ndarray, n: int) -> np.ndarray:
    k = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(n):
        k |= rows[:, i].astype(np.int64) << (n * i)
    return k


@dataclass(frozen=True)
class Stabilizer:
    matrices: tuple[BitMatrix, ...]
    order: int
    orbit_size: int
    closure: str


def stabilizer(q: BoolFunc, full_closure_limit: int = 2048) -> Stabilizer:
    """All A in GL_n with q_A = q; orbit size by Lagrange."""
    n = q.n
    table = q_table(q)
    qp = np.uint64(q.packed)
    hits = np.flatnonzero(table == qp)
    rows = gl_rows(n)[hits]
    keys = _row_keys(rows, n)
    keyset = np.sort(keys)
    img = image_table(rows, n)
    # inverse closure
    inv_rows = np.array([_inverse_rows(n, tuple(int(x) for x in r)) for r in rows], dtype=np.int64)
    if not np.isin(_row_keys(inv_rows, n), keyset).all():
        raise RuntimeError("stabilizer not closed under inverse")
    # product closure: row i of S T is row_i(S) T = img_T[row_i(S)]
    left = rows if len(rows) <= full_closure_limit else rows[:64]
    for s in left:
        prod = img[:, s.astype(np.int64)]
        if not np.isin(_row_keys(prod, n), keyset).all():
            raise RuntimeError("stabilizer not closed under product")
    mats = tuple(BitMatrix(n, tuple(int(x) for x in r)) for r in rows)
    N = gl_order(n)
    return Stabilizer(mats, len(mats), N // len(mats), "full" if len(left) == len(rows) else "partial")


def orbit_packed(q: BoolFunc) -> np.ndarray:
    """Sorted distinct packed tables of q_B over B in GL_n."""
    return np.unique(q_table(q))


def orbit(q: BoolFunc) -> list[BoolFunc]:
    return [BoolFunc.from_packed(q.n, int(v)) for v in orbit_packed(q)]
