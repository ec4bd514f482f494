"""Exhaustive and sampled searches over (q, f) populations.

Every check reduces to the same loop: build the packed ``q_A`` table of a
``q``, then scan a batch of packed candidate functions ``f`` against it with
early abort.  Candidates are balanced functions in ascending truth-table
order, optionally restricted to ``f(0) = 0`` (complementing f negates every
coefficient, so magnitudes are unchanged).

q populations exclude affine q: the claims concern non-affine q, and at n=3
the affine weight-4 q do admit non-affine nearly-bent f.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Callable, Iterator

import numpy as np

from .boolfn import BoolFunc, classify, parse_anf, to_anf
from .gf2 import check_enumerable, enum_cap, gl_order, sample_gl_many
from .qtransform import (
    coefficients_for,
    gl_matrix_at,
    is_q_plateaued,
    popcount_coeffs,
    q_table,
    build_q_table,
    reflect_weight,
    rho,
    scan,
)


class Kind(str, Enum):
    IMPOSSIBLE_BY_PARITY = "ImpossibleByParity"
    INCONCLUSIVE = "Inconclusive"
    VERIFIED_NONE_EXIST = "VerifiedNoneExist"
    FOUND_WITNESSES = "FoundWitnesses"
    REFUTED = "Refuted"


@dataclass
class Verdict:
    kind: Kind
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "details": self.details}


@dataclass
class SearchConfig:
    """Search knobs.

    ``sample_q``: per-weight q sample size (None = exhaustive population).
    ``sample_f``: seeded sample of balanced f instead of the full space.
    ``max_matrices``: only the first k matrices of the enumeration are used.
    ``audit``: also search cells the parity screen already rules out.
    """

    fix_zero: bool = True
    early_abort: bool = True
    sample_q: int | None = None
    sample_f: int | None = None
    seed: int = 0
    max_matrices: int | None = None
    threads: int = 1
    orbit_reduce: bool = False
    audit: bool = False
    progress: Callable[[str], None] | None = None


@dataclass
class VerificationReport:
    claim_id: str
    parameters: dict
    verdict: Verdict
    counts: dict
    elapsed: float = 0.0
    seed: int | None = None

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "claim_id": self.claim_id,
            "parameters": self.parameters,
            "verdict": self.verdict.to_dict(),
            "counts": self.counts,
            "seed": self.seed,
        }
        if timing:
            out["elapsed_ms"] = int(self.elapsed * 1000)
        return out


class UnknownClaimError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Function populations (packed: bit k of the integer is f(k))


def _chunks_packed(n: int, w: int, fix_zero: bool, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Functions of weight w in ascending truth-table order.

    Ascending truth-table order equals lexicographic order of the zero
    positions, which is what ``itertools.combinations`` produces.
    """
    size = 1 << n
    full = (1 << size) - 1
    zeros = size - w
    if fix_zero:
        if zeros == 0:
            return
        combos = ((0,) + c for c in itertools.combinations(range(1, size), zeros - 1))
    else:
        combos = itertools.combinations(range(size), zeros)
    bit = [1 << k for k in range(size)]
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        yield np.array([full ^ sum(bit[k] for k in c) for c in block], dtype=np.uint64)


def functions_packed(n: int, w: int, fix_zero: bool = False) -> np.ndarray:
    parts = list(_chunks_packed(n, w, fix_zero))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint64)


def count_balanced(n: int, fix_zero: bool) -> int:
    size = 1 << n
    return comb(size - 1, size // 2) if fix_zero else comb(size, size // 2)


def enumerate_balanced(n: int, cfg: SearchConfig | None = None) -> Iterator[BoolFunc]:
    """Every balanced f (with f(0)=0 when ``fix_zero``), ascending truth-table order."""
    cfg = cfg or SearchConfig()
    check_enumerable(n)
    done = 0
    total = count_balanced(n, cfg.fix_zero)
    for block in _chunks_packed(n, 1 << (n - 1), cfg.fix_zero):
        for v in block.tolist():
            yield BoolFunc.from_packed(n, v)
        done += len(block)
        if cfg.progress and total > 1 << 20:
            cfg.progress(f"enumerate_balanced n={n}: {done}/{total}")


def sample_functions(n: int, w: int, k: int, seed, nonaffine: bool = False) -> list[int]:
    """Up to k distinct seeded functions of weight w (packed ints), in draw order."""
    rnd = random.Random(seed)
    size = 1 << n
    population = comb(size, w)
    seen: set[int] = set()
    out: list[int] = []
    tries = 0
    while len(out) < k and tries < 50 * k + 1000 and len(seen) < population:
        tries += 1
        v = sum(1 << p for p in rnd.sample(range(size), w))
        if v in seen:
            continue
        seen.add(v)
        if nonaffine and classify(BoolFunc.from_packed(n, v)).is_affine:
            continue
        out.append(v)
    return out


def sample_functions_packed(n: int, w: int, k: int, seed, nonaffine: bool = False) -> np.ndarray:
    return np.array(sample_functions(n, w, k, seed, nonaffine), dtype=np.uint64)


def _degree(n: int, v: int) -> int:
    return classify(BoolFunc.from_packed(n, v)).degree


def q_population(n: int, w: int, cfg: SearchConfig,
                 sample_default: int | None = None) -> tuple[np.ndarray, int, bool]:
    """Non-affine q of weight w, exhaustive or a seeded sample.

    Returns (packed q, number of affine q excluded, sampled?).
    """
    k = cfg.sample_q if cfg.sample_q is not None else sample_default
    if k is not None and k < comb(1 << n, w):
        return sample_functions_packed(n, w, k, cfg.seed * 1_000_003 + w, nonaffine=True), 0, True
    allq = functions_packed(n, w)
    if w != 1 << (n - 1):
        # affine functions have weight 0, 2^(n-1) or 2^n
        return allq, 0, False
    keep = np.array([_degree(n, int(v)) >= 2 for v in allq.tolist()], dtype=bool)
    return allq[keep], int((~keep).sum()), False


def orbit_representatives(n: int, qs: np.ndarray) -> dict[int, list[int]]:
    """Group a q population by GL_n orbit; key is the first member in population order."""
    reps: dict[int, list[int]] = {}
    owner: dict[int, int] = {}
    for v in qs.tolist():
        if v in owner:
            reps[owner[v]].append(v)
            continue
        reps[v] = [v]
        for u in np.unique(q_table(BoolFunc.from_packed(n, v))).tolist():
            owner[u] = v
    return reps


# ---------------------------------------------------------------------------
# Core search


def _f_candidates(n: int, cfg: SearchConfig) -> np.ndarray:
    if cfg.sample_f is not None:
        return sample_functions_packed(n, 1 << (n - 1), cfg.sample_f, repr(("f", cfg.seed)))
    check_enumerable(n)
    return functions_packed(n, 1 << (n - 1), cfg.fix_zero)


@dataclass
class _QResult:
    q: int
    survivors: list[dict]
    examined: int
    pruned_at_identity: int
    evaluated: int


def _search_q(n: int, qv: int, fpacks: np.ndarray, cfg: SearchConfig) -> _QResult:
    q = BoolFunc.from_packed(n, qv)
    bound = rho(n, int(q.tt.sum())).rho
    table = build_q_table(q)
    if cfg.max_matrices is not None:
        table = table[: cfg.max_matrices]
    first, evaluated = scan(n, fpacks, table, lambda W: np.abs(W) > bound, cfg.early_abort)
    survivors = []
    for i in np.flatnonzero(first < 0).tolist():
        fv = int(fpacks[i])
        W = popcount_coeffs(n, np.uint64(fv), table)
        hit = np.flatnonzero(np.abs(W) == bound)
        f = BoolFunc.from_packed(n, fv)
        survivors.append({
            "f_hex": f.hex,
            "f_anf": str(to_anf(f)),
            "degree": classify(f).degree,
            "witness_rho": gl_matrix_at(n, int(hit[0])).to_text() if len(hit) else None,
            "witness_value": int(W[hit[0]]) if len(hit) else None,
            "max_abs": int(np.abs(W).max()),
        })
    return _QResult(qv, survivors, len(fpacks), int((first == 0).sum()), evaluated)


def _run_population(n: int, qs: list[int], fpacks: np.ndarray, cfg: SearchConfig, label: str) -> list[_QResult]:
    def work(chunk):
        return [_search_q(n, v, fpacks, cfg) for v in chunk]

    width = max(1, cfg.threads)
    size = max(1, -(-len(qs) // (width * 4)))
    chunks = [qs[i : i + size] for i in range(0, len(qs), size)]
    t0 = time.perf_counter()
    out: list[_QResult] = []
    if width == 1:
        results = map(work, chunks)
    else:
        pool = ThreadPoolExecutor(width)
        results = pool.map(work, chunks)
    for part in results:
        out.extend(part)
        if cfg.progress:
            done = sum(r.examined for r in out)
            pruned = sum(r.pruned_at_identity for r in out)
            dt = max(time.perf_counter() - t0, 1e-9)
            cfg.progress(f"{label}: {len(out)}/{len(qs)} q, {done / dt:.0f} candidates/s, "
                         f"pruned at identity {pruned / max(done, 1):.3f}")
    if width > 1:
        pool.shutdown()
    return out


def _q_entry(n: int, qv: int) -> dict:
    q = BoolFunc.from_packed(n, qv)
    return {"q_hex": q.hex, "q_anf": str(to_anf(q)), "wt_q": int(q.tt.sum())}


def _summarize(n: int, results: list[_QResult], expand: dict[int, list[int]] | None = None) -> dict:
    nonaffine, affine = [], []
    for r in results:
        members = expand[r.q] if expand else [r.q]
        for s in r.survivors:
            for m in members:
                item = {**_q_entry(n, m), **s}
                if m != r.q:
                    item["via_orbit_of"] = _q_entry(n, r.q)["q_hex"]
                (nonaffine if s["degree"] >= 2 else affine).append(item)
    return {
        "nonaffine": nonaffine,
        "affine": affine,
        "counts": {
            "q_examined": len(results),
            "candidates_examined": sum(r.examined for r in results),
            "pruned_at_identity": sum(r.pruned_at_identity for r in results),
            "coefficients_evaluated": sum(r.evaluated for r in results),
        },
    }


def search_q_nearly_bent(q: BoolFunc, cfg: SearchConfig | None = None) -> VerificationReport:
    """Classify every balanced candidate f as q-nearly bent or not."""
    cfg = cfg or SearchConfig()
    t0 = time.perf_counter()
    n = q.n
    fpacks = _f_candidates(n, cfg)
    res = _search_q(n, q.packed, fpacks, cfg)
    summ = _summarize(n, [res])
    nonaff = summ["nonaffine"]
    details = {
        "rho": rho(n, int(q.tt.sum())).rho,
        "witnesses": nonaff,
        "affine_witnesses": summ["affine"],
        "witness_degrees": _degree_counts(nonaff + summ["affine"]),
    }
    kind = Kind.FOUND_WITNESSES if nonaff else Kind.VERIFIED_NONE_EXIST
    params = {"n": n, **_q_entry(n, q.packed), **_cfg_params(cfg), "scope": "non-affine f"}
    counts = summ["counts"]
    return VerificationReport("search", params, Verdict(kind, details), counts,
                              time.perf_counter() - t0, cfg.seed)


def _degree_counts(items: list[dict]) -> dict[str, int]:
    out: dict[str, int] = {}
    for it in items:
        out[str(it["degree"])] = out.get(str(it["degree"]), 0) + 1
    return dict(sorted(out.items()))


def _cfg_params(cfg: SearchConfig) -> dict:
    return {
        "fix_zero": cfg.fix_zero if cfg.sample_f is None else False,
        "early_abort": cfg.early_abort,
        "sample_q": cfg.sample_q,
        "sample_f": cfg.sample_f,
        "max_matrices": cfg.max_matrices,
        "orbit_reduce": cfg.orbit_reduce,
    }


# ---------------------------------------------------------------------------
# Parity screen


def necessary_condition(n: int, wt_q: int) -> Verdict:
    """Nearly-bent f can only exist if rho = 0 mod 4 (even wt) or 2 mod 4 (odd wt)."""
    rp = rho(n, wt_q)
    w = reflect_weight(n, wt_q)
    need = 0 if w % 2 == 0 else 2
    details = {
        "n": n,
        "wt_q": w,
        "rho": rp.rho,
        "weight_parity": "even" if need == 0 else "odd",
        "required_rho_mod_4": need,
        "rho_mod_4": rp.rho % 4,
    }
    if rp.rho % 4 != need:
        details["failing_congruence"] = f"rho={rp.rho} = {rp.rho % 4} mod 4, required {need} mod 4"
        return Verdict(Kind.IMPOSSIBLE_BY_PARITY, details)
    return Verdict(Kind.INCONCLUSIVE, details)


# ---------------------------------------------------------------------------
# Claim checks

CLAIMS = {
    "thm3": "every balanced f is q-nearly bent when wt(q) = 1, with all |W| = 2",
    "thm4": "no non-affine q-nearly bent f when wt(q) in {2, 3}",
    "thm5": "no non-affine q-nearly bent f when wt(q) = 4",
    "thm6": "no non-affine q-nearly bent f when n is even and 2^(n-1) - 2^(n/2-1) <= wt(q) <= 2^(n-1)",
    "corollary": "no non-affine q-nearly bent f for balanced q and even n",
    "plateaued-n3": "every f of weight 2 is q-plateaued with lambda = 4 for q = x1*x2+x3 at n = 3",
    "noqbent-n4": "no q-bent f for balanced non-affine q at even n >= 4",
}

_DEFAULT_N = {"thm3": 3, "thm4": 3, "thm5": 3, "thm6": 4, "corollary": 4, "plateaued-n3": 3, "noqbent-n4": 4}
_SAMPLED = {"thm6": 100, "corollary": 100, "noqbent-n4": 100}


def claim_weights(claim_id: str, n: int) -> list[int]:
    if claim_id == "thm3":
        return [1]
    if claim_id == "thm4":
        return [2, 3]
    if claim_id == "thm5":
        return [4]
    if claim_id == "thm6":
        if n % 2:
            raise ValueError("thm6 concerns even n")
        return list(range((1 << (n - 1)) - (1 << (n // 2 - 1)), (1 << (n - 1)) + 1))
    if claim_id in ("corollary", "noqbent-n4"):
        if n % 2:
            raise ValueError(f"{claim_id} concerns even n")
        return [1 << (n - 1)]
    raise UnknownClaimError(claim_id)


def verify_theorem(claim_id: str, n: int | None = None, cfg: SearchConfig | None = None,
                   weights: list[int] | None = None, q: BoolFunc | None = None) -> VerificationReport:
    """Re-check one claim over its q population; see ``CLAIMS``."""
    if claim_id not in CLAIMS:
        raise UnknownClaimError(f"unknown claim {claim_id!r}; choose from {sorted(CLAIMS)}")
    cfg = cfg or SearchConfig()
    n = n or _DEFAULT_N[claim_id]
    t0 = time.perf_counter()
    if claim_id == "plateaued-n3":
        rep = _verify_plateaued(n, q or parse_anf("x1*x2+x3", n))
    elif claim_id == "noqbent-n4":
        rep = _verify_noqbent(n, cfg)
    elif claim_id == "thm3":
        rep = _verify_thm3(n, cfg)
    else:
        rep = _verify_none_exist(claim_id, n, cfg, weights or claim_weights(claim_id, n))
    rep.elapsed = time.perf_counter() - t0
    rep.seed = cfg.seed
    return rep


def _populations(claim_id: str, n: int, cfg: SearchConfig, weights: list[int]):
    pops, excluded, sampled = {}, 0, False
    for w in weights:
        qs, ex, smp = q_population(n, w, cfg, _SAMPLED.get(claim_id))
        sampled |= smp
        pops[w] = qs
        excluded += ex
    return pops, excluded, sampled


def _verify_none_exist(claim_id: str, n: int, cfg: SearchConfig, weights: list[int]) -> VerificationReport:
    check_enumerable(n)
    pops, excluded, sampled = _populations(claim_id, n, cfg, weights)
    fpacks = _f_candidates(n, cfg)
    results, per_weight = [], {}
    expand_all: dict[int, list[int]] = {}
    for w, qs in pops.items():
        qlist = qs.tolist()
        if cfg.orbit_reduce:
            reps = orbit_representatives(n, qs)
            expand_all.update(reps)
            qlist = list(reps)
        res = _run_population(n, qlist, fpacks, cfg, f"{claim_id} n={n} wt={w}")
        results.extend(res)
        per_weight[str(w)] = {"q_count": len(qs), "searched": len(qlist), "rho": rho(n, w).rho,
                              "screen": necessary_condition(n, w).kind.value}
    summ = _summarize(n, results, expand_all if cfg.orbit_reduce else None)
    nonaff = summ["nonaffine"]
    details = {
        "per_weight": per_weight,
        "affine_witness_count": len(summ["affine"]),
        "affine_witness_examples": summ["affine"][:8],
    }
    if nonaff:
        details["counterexamples"] = nonaff
        kind = Kind.REFUTED
    else:
        kind = Kind.VERIFIED_NONE_EXIST
    params = {
        "n": n,
        "weights": weights,
        "claim": CLAIMS[claim_id],
        "q_population": "sampled" if sampled else "exhaustive",
        "affine_q_excluded": excluded,
        **_cfg_params(cfg),
    }
    return VerificationReport(claim_id, params, Verdict(kind, details), summ["counts"])


def _verify_thm3(n: int, cfg: SearchConfig) -> VerificationReport:
    check_enumerable(n)
    if cfg.sample_q is not None:
        qs = sample_functions_packed(n, 1, cfg.sample_q, cfg.seed * 1_000_003 + 1)
    else:
        qs = functions_packed(n, 1)
    fpacks = _f_candidates(n, cfg)
    bound = rho(n, 1)
    failures, evaluated = [], 0
    for qv in qs.tolist():
        table = build_q_table(BoolFunc.from_packed(n, qv))
        # |W| = 2 everywhere implies |W| <= rho = 2 and that rho is attained at the identity
        first, ev = scan(n, fpacks, table, lambda W: np.abs(W) != 2, cfg.early_abort)
        evaluated += ev
        for i in np.flatnonzero(first >= 0).tolist():
            f = BoolFunc.from_packed(n, int(fpacks[i]))
            failures.append({**_q_entry(n, qv), "f_hex": f.hex, "f_anf": str(to_anf(f)),
                             "matrix": gl_matrix_at(n, int(first[i])).to_text(),
                             "value": int(popcount_coeffs(n, fpacks[i], table[first[i]]))})
    degs: dict[str, int] = {}
    for v in fpacks.tolist():
        d = str(_degree(n, v))
        degs[d] = degs.get(d, 0) + 1
    counts = {"q_examined": len(qs), "candidates_examined": len(qs) * len(fpacks),
              "coefficients_evaluated": evaluated, "matrices": gl_order(n)}
    params = {"n": n, "weights": [1], "claim": CLAIMS["thm3"],
              "q_population": "sampled" if cfg.sample_q is not None else "exhaustive", **_cfg_params(cfg)}
    ok = bound.rho == 2 and bound.exact and not failures
    if ok:
        first_f = BoolFunc.from_packed(n, int(fpacks[0]))
        details = {"rho": bound.rho, "rho_exact": bound.exact, "witnesses_per_q": len(fpacks),
                   "witness_degrees": dict(sorted(degs.items())),
                   "example": {**_q_entry(n, int(qs[0])), "f_hex": first_f.hex, "f_anf": str(to_anf(first_f)),
                               "witness_rho": gl_matrix_at(n, 0).to_text(), "all_magnitudes": [2]}}
        return VerificationReport("thm3", params, Verdict(Kind.FOUND_WITNESSES, details), counts)
    details = {"rho": bound.rho, "rho_exact": bound.exact, "counterexamples": failures}
    return VerificationReport("thm3", params, Verdict(Kind.REFUTED, details), counts)


def _verify_plateaued(n: int, q: BoolFunc) -> VerificationReport:
    check_enumerable(n)
    fs = functions_packed(n, 2)
    lams, bad = {}, []
    for v in fs.tolist():
        f = BoolFunc.from_packed(n, v)
        p = is_q_plateaued(f, q)
        lams[str(p.lam)] = lams.get(str(p.lam), 0) + 1
        if not p.plateaued or p.lam != 4:
            bad.append({"f_hex": f.hex, "f_anf": str(to_anf(f)), "magnitudes": list(p.magnitudes)})
    params = {"n": n, **_q_entry(n, q.packed), "claim": CLAIMS["plateaued-n3"], "f_weight": 2}
    counts = {"candidates_examined": len(fs), "coefficients_evaluated": len(fs) * gl_order(n)}
    if bad:
        return VerificationReport("plateaued-n3", params, Verdict(Kind.REFUTED, {"counterexamples": bad}), counts)
    return VerificationReport("plateaued-n3", params,
                              Verdict(Kind.FOUND_WITNESSES, {"lambda_counts": lams, "plateaued": len(fs)}), counts)


def _verify_noqbent(n: int, cfg: SearchConfig) -> VerificationReport:
    check_enumerable(n)
    if n % 2 or n < 4:
        raise ValueError("q-bentness check needs even n >= 4")
    w = 1 << (n - 1)
    qs, excluded, sampled = q_population(n, w, cfg, _SAMPLED["noqbent-n4"])
    target = 1 << (n // 2)
    # |I_f| = 2^(n/2): weights 2^(n-1) -+ 2^(n/2-1)
    fw = [(1 << (n - 1)) - target // 2, (1 << (n - 1)) + target // 2]
    fpacks = np.concatenate([functions_packed(n, x, cfg.fix_zero) for x in fw])
    found, evaluated, pruned = [], 0, 0
    for qv in qs.tolist():
        table = build_q_table(BoolFunc.from_packed(n, qv))
        first, ev = scan(n, fpacks, table, lambda W: np.abs(W) != target, cfg.early_abort)
        evaluated += ev
        pruned += int((first == 0).sum())
        for i in np.flatnonzero(first < 0).tolist():
            f = BoolFunc.from_packed(n, int(fpacks[i]))
            found.append({**_q_entry(n, qv), "f_hex": f.hex, "f_anf": str(to_anf(f))})
    params = {"n": n, "claim": CLAIMS["noqbent-n4"], "f_weights": fw, "affine_q_excluded": excluded,
              "q_population": "sampled" if sampled else "exhaustive",
              **_cfg_params(cfg)}
    counts = {"q_examined": len(qs), "candidates_examined": len(qs) * len(fpacks),
              "pruned_at_identity": pruned, "coefficients_evaluated": evaluated}
    if found:
        return VerificationReport("noqbent-n4", params, Verdict(Kind.REFUTED, {"counterexamples": found}), counts)
    return VerificationReport("noqbent-n4", params, Verdict(Kind.VERIFIED_NONE_EXIST, {}), counts)


# ---------------------------------------------------------------------------
# Tables

# (label, n values checked, wt(q), printed rho values, printed answer, basis)
TABLE1 = [
    ("n>2", range(3, 11), 4, (4,), "No", "thm5"),
    ("n>3", range(4, 11), 5, (4, 5), "No", "parity"),
    ("n=4", (4,), 6, (4,), "No", "thm6"),
    ("n>4", range(5, 11), 6, (5,), "No", "parity"),
    ("n=4", (4,), 7, (2,), "No", "thm6"),
    ("n=5", (5,), 7, (5,), "No", "parity"),
    ("n>5", range(6, 11), 7, (6,), "?", None),
]

# n -> (printed rho, printed answer, basis)
TABLE2 = {
    3: (4, "No", "thm5"),
    5: (6, "No", "parity"),
    7: (12, "?", None),
    9: (24, "?", None),
    11: (46, "No", "parity"),
    13: (91, "No", "parity"),
    15: (182, "No", "parity"),
    17: (363, "No", "parity"),
}


def _reverify(basis: str, n: int, wt: int, samples: int, seed: int) -> str:
    cfg = SearchConfig(sample_q=samples if basis == "thm6" else None, seed=seed)
    rep = verify_theorem(basis, n=n, cfg=cfg, weights=[wt])
    return "No" if rep.verdict.kind is Kind.VERIFIED_NONE_EXIST else "?"


def _cell(n: int, wt: int, printed_rho, printed_answer: str, basis, reverify: bool,
          samples: int, seed: int, cache: dict) -> dict:
    rp = rho(n, wt)
    screen = necessary_condition(n, wt)
    if screen.kind is Kind.IMPOSSIBLE_BY_PARITY:
        answer, how = "No", "parity screen"
    elif basis in ("thm5", "thm6") and reverify:
        n0 = 3 if basis == "thm5" else 4
        key = (basis, n0, wt)
        if key not in cache:
            cache[key] = _reverify(basis, n0, wt, samples, seed)
        answer = cache[key]
        how = f"{basis} search at n={n0}" + (" (sampled q)" if basis == "thm6" else " (exhaustive)")
    else:
        answer, how = "?", "none"
    return {
        "n": n,
        "wt_q": wt,
        "rho": rp.rho,
        "rho_exact": rp.exact,
        "ratio": {"num": str(rp.ratio.numerator), "den": str(rp.ratio.denominator)},
        "printed_rho": list(printed_rho) if len(printed_rho) > 1 else printed_rho[0],
        "rho_match": rp.rho in printed_rho,
        "screen": screen.kind.value,
        "answer": answer,
        "answer_basis": how,
        "printed_answer": printed_answer,
        "answer_match": answer == printed_answer,
    }


def _table_report(name: str, cells: list[dict], params: dict) -> VerificationReport:
    mism = [c for c in cells if not (c["rho_match"] and c["answer_match"])]
    discrepancies = []
    for c in mism:
        if not c["rho_match"]:
            discrepancies.append(f"{name} n={c['n']} wt={c['wt_q']}: printed rho {c['printed_rho']}, computed {c['rho']}")
        if not c["answer_match"]:
            discrepancies.append(f"{name} n={c['n']} wt={c['wt_q']}: printed answer {c['printed_answer']!r}, "
                                 f"computed {c['answer']!r} ({c['answer_basis']})")
    details = {"cells": cells, "discrepancies": discrepancies}
    counts = {"cells": len(cells), "mismatched_cells": len(mism)}
    return VerificationReport(name, params, Verdict(Kind.INCONCLUSIVE if mism else Kind.VERIFIED_NONE_EXIST, details),
                              counts)


def table1(reverify: bool = True, samples: int = 4, seed: int = 0) -> VerificationReport:
    """Recompute every cell of the small-weight table."""
    t0 = time.perf_counter()
    cache: dict = {}
    cells = []
    for label, ns, wt, prho, pans, basis in TABLE1:
        for n in ns:
            c = _cell(n, wt, prho, pans, basis, reverify, samples, seed, cache)
            c["row"] = label
            cells.append(c)
    rep = _table_report("table1", cells, {"reverify": reverify, "samples": samples})
    rep.elapsed = time.perf_counter() - t0
    rep.seed = seed
    return rep


def table2(max_n: int = 17, reverify: bool = True, seed: int = 0) -> VerificationReport:
    """Recompute the balanced-q table for odd n up to ``max_n``."""
    if max_n % 2 == 0 or not 3 <= max_n <= 30:
        raise ValueError(f"max_n must be odd and in 3..29, got {max_n}")
    t0 = time.perf_counter()
    cache: dict = {}
    cells = []
    for n in range(3, max_n + 1, 2):
        wt = 1 << (n - 1)
        if n in TABLE2:
            prho, pans, basis = TABLE2[n]
            c = _cell(n, wt, (prho,), pans, basis, reverify, 0, seed, cache)
        else:
            c = _cell(n, wt, (None,), None, None, False, 0, seed, cache)
            c.update(rho_match=True, answer_match=True, printed_rho=None, printed_answer=None)
        cells.append(c)
    rep = _table_report("table2", cells, {"max_n": max_n, "reverify": reverify})
    rep.elapsed = time.perf_counter() - t0
    rep.seed = seed
    return rep


# ---------------------------------------------------------------------------
# Conjecture scan


def conjecture_scan(n: int, wt_lo: int, wt_hi: int, cfg: SearchConfig | None = None) -> VerificationReport:
    """Screen each weight with the parity condition, then search what remains.

    Above the enumeration cap the search samples f and matrices; surviving
    candidates there are unrefuted, not witnesses, so such cells stay
    Inconclusive.
    """
    cfg = cfg or SearchConfig()
    if not 2 <= wt_lo <= wt_hi <= 1 << (n - 1):
        raise ValueError(f"weight range must lie in [2, 2^(n-1)], got [{wt_lo}, {wt_hi}]")
    t0 = time.perf_counter()
    exhaustive_f = n <= enum_cap()
    cells, results = [], []
    counts = {"q_examined": 0, "candidates_examined": 0, "pruned_at_identity": 0, "coefficients_evaluated": 0}
    all_verified = True
    for w in range(wt_lo, wt_hi + 1):
        screen = necessary_condition(n, w)
        cell = {"wt_q": w, "rho": screen.details["rho"], "screen": screen.kind.value}
        if screen.kind is Kind.IMPOSSIBLE_BY_PARITY and not cfg.audit:
            cell["verdict"] = Kind.IMPOSSIBLE_BY_PARITY.value
            cells.append(cell)
            continue
        if exhaustive_f:
            qs, excluded, _ = q_population(n, w, cfg)
            qlist = qs.tolist()
            expand = None
            if cfg.orbit_reduce:
                expand = orbit_representatives(n, qs)
                qlist = list(expand)
            res = _run_population(n, qlist, _f_candidates(n, cfg), cfg, f"conjecture n={n} wt={w}")
            summ = _summarize(n, res, expand)
            for k in counts:
                counts[k] += summ["counts"][k]
            cell.update(q_count=len(qs), searched=len(qlist), affine_q_excluded=excluded,
                        affine_witness_count=len(summ["affine"]))
            if summ["nonaffine"]:
                cell["verdict"] = Kind.REFUTED.value
                cell["counterexamples"] = summ["nonaffine"]
                results.extend(summ["nonaffine"])
            elif screen.kind is Kind.IMPOSSIBLE_BY_PARITY:
                cell["verdict"] = Kind.IMPOSSIBLE_BY_PARITY.value
                cell["audit_witnesses"] = len(summ["affine"])
            else:
                cell["verdict"] = Kind.VERIFIED_NONE_EXIST.value
        else:
            all_verified = False
            cell.update(_explore(n, w, cfg, counts))
            cell["verdict"] = Kind.INCONCLUSIVE.value
        cells.append(cell)
    if results:
        kind = Kind.REFUTED
    elif all_verified:
        kind = Kind.VERIFIED_NONE_EXIST
    else:
        kind = Kind.INCONCLUSIVE
    details = {"cells": cells}
    if results:
        details["counterexamples"] = results
    params = {"n": n, "wt_range": [wt_lo, wt_hi], "audit": cfg.audit,
              "mode": "exhaustive" if exhaustive_f else "exploration", **_cfg_params(cfg)}
    return VerificationReport("conjecture", params, Verdict(kind, details), counts,
                              time.perf_counter() - t0, cfg.seed)


def _explore(n: int, w: int, cfg: SearchConfig, counts: dict) -> dict:
    nq = cfg.sample_q or 4
    nf = cfg.sample_f or 64
    nm = cfg.max_matrices or 256
    qs = sample_functions(n, w, nq, cfg.seed * 1_000_003 + w, nonaffine=True)
    fs = sample_functions(n, 1 << (n - 1), nf, repr(("f", cfg.seed, w)))
    mats = sample_gl_many(n, nm, cfg.seed + w)
    bound = rho(n, w).rho
    unrefuted = []
    for qv in qs:
        q = BoolFunc.from_packed(n, qv)
        for fv in fs:
            f = BoolFunc.from_packed(n, fv)
            W = coefficients_for(f, q, mats)
            counts["coefficients_evaluated"] += len(W)
            counts["candidates_examined"] += 1
            if np.all(np.abs(W) <= bound) and classify(f).degree >= 2:
                unrefuted.append({**_q_entry(n, qv), "f_hex": f.hex})
        counts["q_examined"] += 1
    return {"sampled_q": len(qs), "sampled_f": len(fs), "sampled_matrices": nm, "unrefuted_candidates": unrefuted}
