"""Exact norms: adequate-family norms, Tsirelson-type norms, and l1 certificates.

All arithmetic is over :class:`fractions.Fraction`. A coefficient vector is a
``dict`` from positive index to nonzero Fraction.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Mapping, Sequence

import numpy as np

from . import families as fam
from .families import ResourceCapExceeded
from .ordinal import ONE, ZERO, as_ordinal
from .trees import dead_pattern

__all__ = [
    "NormError",
    "PreconditionError",
    "HypothesisFailed",
    "NormResult",
    "Leaf",
    "Split",
    "coeffvec",
    "parse_vec",
    "render_vec",
    "vec_to_json",
    "family_norm",
    "family_norm_value",
    "suppression_check",
    "suppression_exhaustive",
    "tsirelson_norm",
    "evaluate_witness",
    "base_family",
    "block_l1_lower_check",
    "l1_sp_estimate",
    "l1_sp_profile",
    "boolean_l1_certify",
    "perturbation_bound",
    "perturbation_check",
]

NAIVE_CAP = 14
MEMO_CAP = 120
ENUM_SUPPORT_LIMIT = 16


class NormError(ValueError):
    pass


class PreconditionError(NormError):
    pass


class HypothesisFailed(NormError):
    def __init__(self, pattern):
        super().__init__(f"sets are not Boolean independent: dead sign pattern {pattern}")
        self.pattern = pattern


# --- vectors -------------------------------------------------------------------

def coeffvec(data) -> dict:
    """Normalize a mapping or ``(index, coeff)`` pairs, dropping zeros."""
    items = data.items() if isinstance(data, Mapping) else data
    out = {}
    for k, v in items:
        k = int(k)
        if k < 1:
            raise NormError(f"indices must be positive, got {k}")
        v = Fraction(v)
        if v:
            out[k] = out.get(k, Fraction(0)) + v
    return {k: v for k, v in sorted(out.items()) if v}


def parse_vec(text: str) -> dict:
    """``index:coeff(,index:coeff)*`` with coefficients like ``-2/3``; empty text is 0."""
    text = text.strip()
    if not text:
        return {}
    pairs = []
    for chunk in text.split(","):
        try:
            k, v = chunk.split(":")
            pairs.append((int(k), Fraction(v.strip())))
        except (ValueError, ZeroDivisionError) as e:
            raise NormError(f"bad vector entry {chunk!r}") from e
    return coeffvec(pairs)


def render_vec(x: Mapping) -> str:
    return ",".join(f"{k}:{v}" for k, v in sorted(x.items()))


def vec_to_json(x: Mapping) -> dict:
    return {str(k): str(v) for k, v in sorted(x.items())}


def _restrict(x: Mapping, keep) -> dict:
    keep = set(keep)
    return {k: v for k, v in x.items() if k in keep}


# --- family norm -----------------------------------------------------------------

@dataclass(frozen=True)
class NormResult:
    value: Fraction
    witness: object = None
    iterations: int = 0

    def to_json(self) -> dict:
        return {"value": str(self.value), "witness": _witness_json(self.witness), "iterations": self.iterations}


def _members_within(spec, pool: Sequence[int], cap: int):
    """Members of an adequate family contained in ``pool`` (DFS with heredity pruning)."""
    pool = sorted(pool)
    out = [()]
    stack = [((), 0)]
    while stack:
        F, start = stack.pop()
        for i in range(start, len(pool)):
            G = F + (pool[i],)
            if fam.member(spec, G):
                out.append(G)
                if len(out) > cap:
                    raise ResourceCapExceeded(f"more than {cap} members inside the support")
                stack.append((G, i + 1))
    return out


def _better(cand, best):
    # larger |sum|, then fewer elements, then lexicographically smaller
    if best is None:
        return True
    (v1, F1), (v2, F2) = cand, best
    if v1 != v2:
        return v1 > v2
    if len(F1) != len(F2):
        return len(F1) < len(F2)
    return F1 < F2


def _fast_schreier1(x: Mapping, sign: int):
    """Best signed sum over sets with min F >= |F| inside one sign class."""
    idx = sorted(k for k, v in x.items() if v * sign > 0)
    best = (Fraction(0), ())
    for pos, m in enumerate(idx):
        later = sorted(idx[pos + 1 :], key=lambda k: (-abs(x[k]), k))[: m - 1]
        F = tuple(sorted((m,) + tuple(later)))
        val = sum(abs(x[k]) for k in F)
        if _better((val, F), best):
            best = (val, F)
    return best


def family_norm(spec, x: Mapping, cap: int = fam.DEFAULT_MEMBER_CAP, method: str = "auto") -> NormResult:
    """``sup |sum_{n in F} a_n|`` over members ``F`` with an explicit maximizing ``F``.

    ``method``: ``"enumerate"`` walks members inside each sign class of the
    support; ``"fast"`` uses closed-form greedy choices for Schreier(1) and
    singletons; ``"auto"`` picks fast only for large supports.
    """
    x = coeffvec(x)
    if not x:
        return NormResult(Fraction(0), ())
    if isinstance(spec, fam.Explicit):
        # not assumed hereditary: every member counts as listed
        best = None
        for F in sorted(spec.members):
            val = abs(sum(x.get(k, 0) for k in F))
            if _better((val, F), best):
                best = (val, F)
        return NormResult(Fraction(best[0]), best[1])
    fast_ok = isinstance(spec, fam.Singletons) or (isinstance(spec, fam.Schreier) and spec.alpha == ONE)
    if method == "fast" or (method == "auto" and fast_ok and len(x) > ENUM_SUPPORT_LIMIT):
        if not fast_ok:
            raise NormError("fast path only exists for Schreier(1) and singletons")
        if isinstance(spec, fam.Singletons):
            k = min(x, key=lambda k: (-abs(x[k]), k))
            return NormResult(abs(x[k]), (k,))
        best = None
        for sign in (1, -1):
            cand = _fast_schreier1(x, sign)
            if _better(cand, best):
                best = cand
        return NormResult(best[0], best[1])
    # optimal witnesses never mix signs: dropping the minority side only helps
    best = None
    for sign in (1, -1):
        pool = [k for k, v in x.items() if v * sign > 0]
        for F in _members_within(spec, pool, cap):
            val = abs(sum(x[k] for k in F))
            if _better((val, F), best):
                best = (val, F)
    return NormResult(Fraction(best[0]), best[1])


def family_norm_value(spec, x: Mapping) -> Fraction:
    return family_norm(spec, x).value


def suppression_check(spec, x: Mapping, G) -> bool:
    """Restricting to ``G`` does not increase the family norm."""
    return family_norm(spec, _restrict(x, G)).value <= family_norm(spec, x).value


def suppression_exhaustive(spec, N: int = 8, coeffs=(-2, -1, 1, 2), chunk: int = 50_000) -> dict:
    """1-suppression over every vector on ``[1..N]`` with entries in ``coeffs`` (or 0).

    The max over restriction sets ``G`` of ``||x|G||`` equals the max over
    members ``F`` of the larger of the positive and negative parts of ``x`` on
    ``F`` (take ``G`` = the positive or negative part of ``F``), so all ``G``
    are covered without enumerating them.
    """
    if isinstance(spec, fam.Explicit):
        members = sorted(F for F in spec.members if all(k <= N for k in F))
    else:
        members = list(fam.restrict(spec, N).members_sorted)
    M = np.zeros((len(members), N), dtype=np.int64)
    for r, F in enumerate(members):
        for k in F:
            M[r, k - 1] = 1
    values = np.array((0,) + tuple(coeffs), dtype=np.int64)
    total = len(values) ** N
    violations = []
    checked = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // (len(values) ** np.arange(N, dtype=np.int64))) % len(values)
        X = values[digits]
        sums = X @ M.T
        norm = np.abs(sums).max(axis=1)
        pos = np.clip(X, 0, None) @ M.T
        neg = np.clip(-X, 0, None) @ M.T
        worst = np.maximum(pos, neg).max(axis=1)
        bad = np.nonzero(worst > norm)[0]
        for b in bad[:5]:
            violations.append({k + 1: int(v) for k, v in enumerate(X[b]) if v})
        checked += len(codes)
    return {"vectors": checked, "members": len(members), "violations": violations, "ok": not violations}


# --- Tsirelson-type norm ------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    lo: int
    hi: int
    members: tuple  # witness set of the base norm


@dataclass(frozen=True)
class Split:
    lo: int
    hi: int
    points: tuple
    children: tuple


def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, tuple):
        return list(w)
    if isinstance(w, Leaf):
        return {"interval": [w.lo, w.hi], "base": list(w.members)}
    if isinstance(w, Split):
        return {"interval": [w.lo, w.hi], "points": list(w.points), "blocks": [_witness_json(c) for c in w.children]}
    return w


def base_family(alpha):
    alpha = as_ordinal(alpha)
    return fam.Singletons() if alpha == ZERO else fam.Schreier(alpha)


def _interval(x, lo, hi):
    return {k: v for k, v in x.items() if lo <= k <= hi}


def evaluate_witness(alpha, x: Mapping, w) -> Fraction:
    """Re-evaluate a partition tree from scratch, checking admissibility."""
    x = coeffvec(x)
    if w is None:
        return Fraction(0)
    if isinstance(w, Leaf):
        F = w.members
        if not fam.member(base_family(alpha), F):
            raise NormError(f"leaf witness {F} is not in the base family")
        if any(not (w.lo <= k <= w.hi) for k in F):
            raise NormError("leaf witness leaves its interval")
        return abs(sum(x.get(k, 0) for k in F))
    pts = w.points
    if len(pts) < 2 or len(pts) > pts[0] or list(pts) != sorted(set(pts)):
        raise NormError(f"partition points {pts} are not admissible")
    if len(w.children) != len(pts) or pts[0] < w.lo:
        raise NormError("partition does not match its blocks")
    total = Fraction(0)
    for t, child in enumerate(w.children):
        hi = pts[t + 1] - 1 if t + 1 < len(pts) else w.hi
        if child.lo != pts[t] or child.hi > hi:
            raise NormError("block bounds do not match the partition")
        total += evaluate_witness(alpha, x, child)
    return total / 2


def _base_values(alpha, x, s):
    """Base norm and witness on every support interval ``s[i..j]``."""
    spec = base_family(alpha)
    method = "fast" if alpha in (ZERO, ONE) else "enumerate"
    n = len(s)
    vals = {}
    for i in range(n):
        for j in range(i, n):
            r = family_norm(spec, {k: x[k] for k in s[i : j + 1]}, method=method)
            vals[i, j] = (r.value, r.witness)
    return vals


def _naive(alpha, x, s, free_end, cap):
    """Level-by-level iteration over every support interval until nothing moves."""
    n = len(s)
    if n > cap:
        raise ResourceCapExceeded(f"naive engine is limited to supports of size {cap}")
    base = _base_values(alpha, x, s)
    cur = {iv: (v, Leaf(s[iv[0]], s[iv[1]], w)) for iv, (v, w) in base.items()}
    settled = 0  # last round in which the full interval moved
    rounds = 0
    while True:
        rounds += 1
        nxt = {}
        changed = False
        for (i, j), (v, w) in cur.items():
            best_v, best_w = v, w
            for first in range(i, j + 1):
                for k in range(2, min(s[first], j - first + 1) + 1):
                    for rest in combinations(range(first + 1, j + 1), k - 1):
                        starts = (first,) + rest
                        last_ends = range(starts[-1], j + 1) if free_end else (j,)
                        for last in last_ends:
                            ends = [starts[t + 1] - 1 for t in range(k - 1)] + [last]
                            blocks = list(zip(starts, ends))
                            total = sum(cur[b][0] for b in blocks) / 2
                            if total > best_v:
                                best_v = total
                                best_w = Split(s[i], s[j], tuple(s[t] for t in starts), tuple(cur[b][1] for b in blocks))
            if best_v != v:
                changed = True
                if (i, j) == (0, n - 1):
                    settled = rounds
            nxt[i, j] = (best_v, best_w)
        cur = nxt
        if not changed:
            break
    value, witness = cur[0, n - 1]
    return value, witness, settled


def _memoized(alpha, x, s, free_end, cap):
    """Bottom-up interval DP with integer values scaled by ``lcd * 2**n``.

    ``N[i][j]`` is the norm of ``x`` on ``s[i..j]`` as ``(value, -depth)``,
    where depth is the smallest partition-tree depth reaching the value.
    ``C[i][j][K]`` is the best sum over at most ``K`` consecutive blocks that
    start at ``s[i]`` and cover ``s[i..j]``.
    """
    n = len(s)
    if n > cap:
        raise ResourceCapExceeded(f"memoized engine is limited to supports of size {cap}")
    base = _base_values(alpha, x, s)
    scale = lcm(*(v.denominator for v in x.values())) << n
    N = [[None] * n for _ in range(n)]
    how = [[None] * n for _ in range(n)]
    C = [[None] * n for _ in range(n)]
    C_how = [[None] * n for _ in range(n)]

    def cover(q, j, K):
        K = min(K, j - q + 1)
        return C[q][j][K], K

    for j in range(n):
        for i in range(j, -1, -1):
            bv, _ = base[i, j]
            best, choice = (int(bv * scale), 0), None
            for first in range(i, j + 1):
                limit = min(s[first], j - first + 1)
                if limit < 2:
                    continue
                for q in range(first + 1, j + 1):
                    tail, K = cover(q, j, limit - 1)
                    head = N[first][q - 1]
                    total = head[0] + tail[0]
                    assert total % 2 == 0, "scaled value lost integrality"
                    cand = (total // 2, min(head[1], tail[1]) - 1)
                    if cand > best:
                        best, choice = cand, (first, q, K)
            N[i][j] = best
            how[i][j] = choice

            row, row_how = [None], [None]
            single, single_how = N[i][j], ("single", j)
            if free_end:
                for r in range(i, j):
                    if N[i][r] > single:
                        single, single_how = N[i][r], ("single", r)
            row.append(single)
            row_how.append(single_how)
            for K in range(2, j - i + 2):
                bestK, bestK_how = row[K - 1], ("fewer",)
                for q in range(i + 1, j + 1):
                    tail, KK = cover(q, j, K - 1)
                    head = N[i][q - 1]
                    cand = (head[0] + tail[0], min(head[1], tail[1]))
                    if cand > bestK:
                        bestK, bestK_how = cand, ("split", q, KK)
                row.append(bestK)
                row_how.append(bestK_how)
            C[i][j] = row
            C_how[i][j] = row_how

    def blocks_of(q, j, K):
        """Block intervals of the best cover recorded in C_how."""
        out = []
        while True:
            step = C_how[q][j][K]
            if step[0] == "fewer":
                K -= 1
                continue
            if step[0] == "single":
                out.append((q, step[1]))
                return out
            _, nq, KK = step
            out.append((q, nq - 1))
            q, K = nq, KK

    def build(i, j):
        choice = how[i][j]
        if choice is None:
            return Leaf(s[i], s[j], base[i, j][1])
        first, q, K = choice
        blocks = [(first, q - 1)] + blocks_of(q, j, K)
        return Split(s[i], s[j], tuple(s[a] for a, _ in blocks), tuple(build(a, b) for a, b in blocks))

    value, neg_depth = N[0][n - 1]
    return Fraction(value, scale), build(0, n - 1), -neg_depth


def tsirelson_norm(alpha, x: Mapping, engine: str = "memoized", final_endpoint: str = "support",
                   naive_cap: int = NAIVE_CAP, memo_cap: int = MEMO_CAP) -> NormResult:
    """Norm of ``sum a_n t_n`` in the Tsirelson-type space over Schreier(``alpha``).

    The norm is the least fixed point of
    ``||x|| = max(base(x), 1/2 max sum_i ||x on [p_i, p_{i+1})||)`` over
    admissible ``p_1 < ... < p_k`` (``k <= p_1``, ``k >= 2``), with the last
    block running to the end of the support. ``final_endpoint="free"`` lets
    the last block stop anywhere instead; the two give the same value.
    """
    alpha = as_ordinal(alpha)
    x = coeffvec(x)
    if not x:
        return NormResult(Fraction(0), None, 0)
    if final_endpoint not in ("support", "free"):
        raise NormError(f"unknown final endpoint mode {final_endpoint!r}")
    free = final_endpoint == "free"
    s = sorted(x)
    if engine == "naive":
        value, witness, its = _naive(alpha, x, s, free, naive_cap)
    elif engine == "memoized":
        value, witness, its = _memoized(alpha, x, s, free, memo_cap)
    else:
        raise NormError(f"unknown engine {engine!r}")
    return NormResult(value, witness, its)


# --- block and spreading-model estimates -------------------------------------------

def block_l1_lower_check(alpha, blocks: Sequence[Mapping], coeffs: Sequence, engine: str = "memoized") -> dict:
    """Check ``sum|c_i| >= ||sum c_i u_i|| >= 1/2 sum|c_i|`` for normalized successive blocks."""
    blocks = [coeffvec(b) for b in blocks]
    coeffs = [Fraction(c) for c in coeffs]
    k = len(blocks)
    if k != len(coeffs) or k == 0:
        raise PreconditionError("need one coefficient per block")
    for b in blocks:
        if not b:
            raise PreconditionError("blocks must be nonzero")
        if min(b) <= k:
            raise PreconditionError(f"block supports must start past {k}")
    for a, b in zip(blocks, blocks[1:]):
        if max(a) >= min(b):
            raise PreconditionError("blocks must be successive")
    units = []
    for b in blocks:
        nb = tsirelson_norm(alpha, b, engine).value
        units.append({i: v / nb for i, v in b.items()})
    combo = {}
    for c, u in zip(coeffs, units):
        for i, v in u.items():
            combo[i] = combo.get(i, 0) + c * v
    value = tsirelson_norm(alpha, combo, engine).value
    l1 = sum(abs(c) for c in coeffs)
    return {"value": value, "lower": l1 / 2, "upper": l1, "ok": l1 / 2 <= value <= l1}


def l1_sp_estimate(spec, L: Sequence[int], k: int, m: int, with_witness: bool = False):
    """``min k^{-1} ||sum_{n in S} e_n||`` over ``k``-subsets ``S`` of the window past ``m``."""
    window = sorted(set(n for n in L if n >= m))
    if len(window) < k:
        raise PreconditionError(f"window has {len(window)} indices, fewer than k={k}")
    best, arg = None, None
    for S in combinations(window, k):
        v = family_norm(spec, {n: 1 for n in S}).value / k
        if best is None or v < best:
            best, arg = v, S
    return (best, arg) if with_witness else best


def l1_sp_profile(spec, L: Sequence[int], k: int, ms: Sequence[int]) -> dict:
    """Finite-stage estimates for several window starts and whether they are nondecreasing."""
    vals = []
    for m in ms:
        try:
            vals.append((m, l1_sp_estimate(spec, L, k, m)))
        except PreconditionError:
            break
    mono = all(a[1] <= b[1] for a, b in zip(vals, vals[1:]))
    return {"k": k, "stages": [(m, str(v)) for m, v in vals], "nondecreasing": mono}


# --- l1 certificates ---------------------------------------------------------------------

def boolean_l1_certify(functions: Sequence[Mapping], r, delta, trials: int = 1000, seed: int = 0) -> dict:
    """Certify ``||sum a_n f_n||_inf >= (delta/2) sum |a_n|`` from Boolean independence.

    The sets ``{f_n >= r + delta}`` and ``{f_n <= r}`` must be Boolean
    independent (checked on the full index tuple, which covers every sub-tuple).
    """
    r, delta = Fraction(r), Fraction(delta)
    if delta <= 0:
        raise NormError("delta must be positive")
    m = len(functions)
    points = sorted(set().union(*[set(f) for f in functions]), key=repr) if functions else []
    fs = [{p: Fraction(f.get(p, 0)) for p in points} for f in functions]
    pairs = [({p for p in points if f[p] >= r + delta}, {p for p in points if f[p] <= r}) for f in fs]
    if m:
        dead = dead_pattern(pairs, tuple(range(1, m + 1)))
        if dead is not None:
            raise HypothesisFailed(dead)

    # integer copies: f scaled by its common denominator; the ratio ignores the scale of a
    scale = lcm(*(v.denominator for f in fs for v in f.values())) if m and points else 1
    big = scale > 10**9
    M = np.array([[int(f[p] * scale) for p in points] for f in fs], dtype=object if big else np.int64)

    def worst_of(rows):
        A = np.array(rows, dtype=object if big else np.int64)
        sups = np.abs(A @ M).max(axis=1)
        totals = np.abs(A).sum(axis=1)
        out = None
        for sup, tot in zip(sups, totals):
            if tot:
                q = Fraction(int(sup), int(tot) * scale)
                out = q if out is None or q < out else out
        return out, int(np.count_nonzero(totals))

    bound = delta / 2
    worst, checked = None, 0
    if m and points:
        worst, checked = worst_of(list(product((1, -1), repeat=m)))
        rng = random.Random(seed)
        rows = [[rng.randint(-12, 12) * (60 // d) for d in (rng.randint(1, 6) for _ in range(m))]
                for _ in range(trials)]
        if rows:
            w, c = worst_of(rows)
            checked += c
            if w is not None and w < worst:
                worst = w
    ok = worst is None or worst >= bound
    return {"certified": ok, "constant": 2 / delta, "lower_ratio": bound, "worst_ratio": worst, "vectors": checked}


def perturbation_bound(delta, y_norm, dist) -> Fraction:
    """Lower l1 constant after adding a fixed ``y`` to every vector."""
    delta, y_norm, dist = Fraction(delta), Fraction(y_norm), Fraction(dist)
    if delta <= 0 or y_norm > 1 or dist < 0:
        raise PreconditionError("need delta > 0, ||y|| <= 1, dist >= 0")
    return max(delta * dist / 2, delta - y_norm)


def perturbation_check(m: int, delta, y: Sequence, trials: int = 500, seed: int = 0) -> dict:
    """Brute check in l1^N with ``x_n = delta * e_n`` (n <= m) and a given ``y``.

    The distance from ``y`` to the span of the ``x_n`` is the l1 mass of ``y``
    off the first ``m`` coordinates.
    """
    delta = Fraction(delta)
    y = [Fraction(v) for v in y]
    if len(y) < m:
        raise PreconditionError("y needs at least m coordinates")
    y_norm = sum(abs(v) for v in y)
    dist = sum(abs(v) for v in y[m:])
    bound = perturbation_bound(delta, y_norm, dist)
    rng = random.Random(seed)
    worst = None
    vectors = [list(sg) for sg in product((1, -1), repeat=m)]
    vectors += [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(m)] for _ in range(trials)]
    for a in vectors:
        total = sum(abs(c) for c in a)
        if not total:
            continue
        s = sum(a)
        vec = [s * v for v in y]
        for i, c in enumerate(a):
            vec[i] += c * delta
        q = sum(abs(v) for v in vec) / total
        worst = q if worst is None or q < worst else worst
    return {"bound": bound, "worst_ratio": worst, "ok": worst is None or worst >= bound}
