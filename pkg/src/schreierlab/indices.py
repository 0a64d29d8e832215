"""Oscillation sets, the finite-order l1 tree, the Lavrentiev index and cross-index checks.

Oscillation is only computed for indicator sequences ``f_n(G) = [n in G]``
over an adequate family, where the tail quantifiers reduce to membership of
``G + {n}`` for large ``n``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from . import families as fam
from .norms import PreconditionError, boolean_l1_certify, l1_sp_estimate
from .ordinal import (
    ONE,
    ZERO,
    Kind,
    Ordinal,
    OrdinalError,
    add,
    as_ordinal,
    classify,
    half,
    parse,
    predecessor,
    render,
)
from .trees import WellFoundedTree, dead_pattern, wf_order

__all__ = [
    "IndexError_",
    "IndicatorSeq",
    "oscillation_membership",
    "oscillation_index",
    "L1Tree",
    "build_l1_tree",
    "validate_l1_tree",
    "OrdinalCompact",
    "IntervalSet",
    "StepFn",
    "parse_stepfn",
    "LavrentievResult",
    "lavrentiev_index",
    "lavrentiev_brute",
    "validate_chain",
    "index_consistency_report",
]


class IndexError_(ValueError):
    pass


@dataclass(frozen=True)
class IndicatorSeq:
    family: object

    def __post_init__(self):
        if isinstance(self.family, fam.Explicit) and not fam.is_adequate(self.family):
            raise IndexError_("indicator sequences need an adequate family")
        if not isinstance(self.family, (fam.Explicit, fam.Schreier, fam.Singletons)):
            raise IndexError_(f"unsupported family {self.family!r}")

    def value(self, n: int, G: Sequence[int]) -> int:
        return 1 if n in G else 0


def _check_epsilon(epsilon):
    eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise IndexError_("epsilon must lie in (0, 1)")
    return eps


# --- oscillation -------------------------------------------------------------------

def oscillation_membership(seq: IndicatorSeq, F, lam, epsilon=Fraction(1, 2),
                           mode: str = "symbolic", window: int = 20) -> bool:
    """Is ``F`` in the ``lam``-th oscillation set of the indicator sequence?

    For indicators the answer is the same for every epsilon in (0, 1).
    ``mode="direct"`` iterates the level-one condition (``F + {n}`` stays in
    the previous set for large ``n``) instead of using the derivative engine.
    """
    _check_epsilon(epsilon)
    F = fam.finset(F)
    spec = seq.family
    if not fam.member(spec, F):
        raise fam.NotAMember(f"{list(F)} is not a member")
    lam = as_ordinal(lam)
    if mode == "symbolic":
        return fam.in_derivative(spec, F, lam)
    if mode != "direct":
        raise IndexError_(f"unknown mode {mode!r}")
    if not lam.is_finite():
        raise IndexError_("direct mode handles finite levels only")
    return _direct(spec, F, int(lam), window)


@lru_cache(maxsize=1 << 18)
def _direct(spec, G, k, window):
    if k == 0:
        return fam.member(spec, G)
    if not _direct(spec, G, k - 1, window):
        return False
    # basic neighborhoods of G fix the coordinates up to max G; the witness
    # points G + {n} lie in every such neighborhood and in A+_{n,m} for m > n
    probe = (G[-1] if G else 0) + window
    return all(_direct(spec, G + (n,), k - 1, window) for n in (probe, probe + 1))


def oscillation_index(seq: IndicatorSeq) -> Ordinal:
    """Largest level with a nonempty oscillation set; the last one is ``{()}``."""
    return fam.cb_rank(seq.family, ())


# --- finite-order l1 tree ----------------------------------------------------------------

@dataclass
class L1Tree:
    order: int
    epsilon: Fraction
    delta: Fraction
    r: Fraction
    tree: WellFoundedTree
    branches: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "predicted_half": render(half(Ordinal.of(self.order))) if self.order else "0",
            "epsilon": str(self.epsilon),
            "delta": str(self.delta),
            "r": str(self.r),
            "nodes": [[list(p) for p in node] for node in sorted(self.tree.nodes)],
            "branches": [
                {
                    "pairs": [list(p) for p in b["pairs"]],
                    "sets": [[[list(G) for G in A], [list(G) for G in B]] for A, B in b["sets"]],
                    "certificate": {
                        "certified": b["certificate"]["certified"],
                        "constant": str(b["certificate"]["constant"]),
                        "worst_ratio": str(b["certificate"]["worst_ratio"]),
                    },
                }
                for b in self.branches
            ],
        }


def _branch_points(spec, pairs):
    ground = sorted({i for p in pairs for i in p})
    out = []
    for k in range(len(ground) + 1):
        for G in combinations(ground, k):
            if fam.member(spec, G):
                out.append(G)
    return out


def build_l1_tree(seq: IndicatorSeq, order: int, epsilon=Fraction(1, 2),
                  branching: int = 2, window: int = 40) -> L1Tree:
    """Tree of index pairs ``(n, m)`` standing for ``f_n - f_m``, with per-branch certificates.

    A node at depth ``j`` extends its point ``G`` (the chosen ``n``'s) by an
    ``n`` with ``G + {n}`` still in the oscillation set of level
    ``order - j - 1``; ``m = n + 1`` stays outside every later point.
    """
    eps = _check_epsilon(epsilon)
    if order < 1:
        raise IndexError_("order must be at least 1")
    spec = seq.family
    if not oscillation_membership(seq, (), order, eps):
        raise PreconditionError(f"level 0: the empty set is not in oscillation set {order}")
    delta, r = eps / 2, eps / 4

    nodes = set()
    leaves = []
    stack = [((), ())]
    while stack:
        node, G = stack.pop()
        depth = len(node)
        if depth == order:
            leaves.append(node)
            continue
        start = node[-1][1] + 1 if node else 1
        kids = []
        for n in range(start, start + window):
            if fam.member(spec, G + (n,)) and fam.in_derivative(spec, G + (n,), order - depth - 1):
                kids.append(n)
                if len(kids) == branching:
                    break
        if not kids:
            raise PreconditionError(f"level {depth}: no extension of {list(G)} within the window")
        for n in reversed(kids):
            child = node + ((n, n + 1),)
            nodes.add(child)
            stack.append((child, G + (n,)))

    branches = []
    for leaf in sorted(leaves):
        points = _branch_points(spec, leaf)
        funcs = [{G: (1 if n in G else 0) - (1 if m in G else 0) for G in points} for n, m in leaf]
        sets = [
            (tuple(G for G in points if f[G] >= r + delta), tuple(G for G in points if f[G] <= r))
            for f in funcs
        ]
        cert = boolean_l1_certify(funcs, r, delta)
        branches.append({"pairs": leaf, "sets": sets, "certificate": cert})
    out = L1Tree(order, eps, delta, r, WellFoundedTree(frozenset(nodes)), branches)
    problems = validate_l1_tree(out)
    if problems:
        raise IndexError_("; ".join(problems))
    return out


def validate_l1_tree(t: L1Tree) -> list:
    problems = []
    if wf_order(t.tree) != Ordinal.of(t.order):
        problems.append(f"tree order {wf_order(t.tree)} differs from {t.order}")
    for b in t.branches:
        k = len(b["sets"])
        if dead_pattern(b["sets"], tuple(range(1, k + 1))) is not None:
            problems.append(f"branch {b['pairs']} is not Boolean independent")
        if not b["certificate"]["certified"]:
            problems.append(f"branch {b['pairs']} failed certification")
    return problems


# --- ordinal intervals ------------------------------------------------------------------

def _succ(a: Ordinal) -> Ordinal:
    return add(a, ONE)


@dataclass(frozen=True)
class OrdinalCompact:
    """The ordinals ``<= top`` with the order topology."""

    top: Ordinal

    def __post_init__(self):
        object.__setattr__(self, "top", as_ordinal(self.top))

    @property
    def end(self) -> Ordinal:
        return _succ(self.top)

    def full(self) -> "IntervalSet":
        return IntervalSet(self, ((ZERO, self.end),))

    def empty(self) -> "IntervalSet":
        return IntervalSet(self, ())


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of half-open intervals ``[lo, hi)``, sorted, disjoint and non-adjacent.

    Every interval of ordinals has this shape: ``[a, b] = [a, b+1)`` and
    ``(a, b) = [a+1, b)``.
    """

    space: OrdinalCompact
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", _normalize(self.parts, self.space.end))

    def __bool__(self):
        return bool(self.parts)

    def _wrap(self, parts):
        return IntervalSet(self.space, tuple(parts))

    def union(self, other):
        return self._wrap(self.parts + other.parts)

    def intersect(self, other):
        out = []
        for a, b in self.parts:
            for c, d in other.parts:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return self._wrap(out)

    def complement(self):
        out, cur = [], ZERO
        for a, b in self.parts:
            if cur < a:
                out.append((cur, a))
            cur = b
        if cur < self.space.end:
            out.append((cur, self.space.end))
        return self._wrap(out)

    def minus(self, other):
        return self.intersect(other.complement())

    def closure(self):
        # a half-open [lo, hi) misses only its supremum, and only when hi is a limit
        out = []
        for a, b in self.parts:
            if classify(b) is Kind.LIMIT and b <= self.space.top:
                b = _succ(b)
            out.append((a, b))
        return self._wrap(out)

    def is_closed(self) -> bool:
        return self.closure() == self

    def contains(self, x) -> bool:
        x = as_ordinal(x)
        return any(a <= x < b for a, b in self.parts)

    def subset_of(self, other) -> bool:
        return not self.minus(other)

    def render(self) -> str:
        if not self.parts:
            return "{}"
        return " u ".join(_render_interval(a, b) for a, b in self.parts)


def _render_interval(a, b):
    if classify(b) is Kind.SUCCESSOR:
        return f"[{render(a)},{render(predecessor(b))}]"
    return f"[{render(a)},{render(b)})"


def _normalize(parts, end):
    cleaned = sorted((as_ordinal(a), min(as_ordinal(b), end)) for a, b in parts)
    out = []
    for a, b in cleaned:
        if not a < b:
            continue
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return tuple(out)


# --- step functions --------------------------------------------------------------------

@dataclass(frozen=True)
class StepFn:
    """Rational values on half-open pieces ``[lo, hi)`` partitioning ``[0, top]``."""

    space: OrdinalCompact
    pieces: tuple

    def __post_init__(self):
        pieces = tuple(sorted(((as_ordinal(a), as_ordinal(b)), Fraction(v)) for (a, b), v in self.pieces))
        cur = ZERO
        for (a, b), _ in pieces:
            if a != cur or not a < b:
                raise IndexError_(f"pieces must partition [0, {render(self.space.top)}]")
            cur = b
        if cur != self.space.end:
            raise IndexError_(f"pieces must partition [0, {render(self.space.top)}]")
        object.__setattr__(self, "pieces", pieces)

    def where(self, pred) -> IntervalSet:
        return IntervalSet(self.space, tuple(iv for iv, v in self.pieces if pred(v)))

    def __call__(self, x):
        x = as_ordinal(x)
        for (a, b), v in self.pieces:
            if a <= x < b:
                return v
        raise IndexError_(f"{render(x)} is outside the space")


def parse_stepfn(text: str) -> StepFn:
    """Lines ``[a,b] -> p/q`` (closed) or ``[a,b) -> p/q`` (half-open); ``#`` starts a comment."""
    pieces = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        left, arrow, val = line.partition("->")
        left = left.strip()
        if not arrow or not left.startswith("[") or left[-1] not in "])" or left.count(",") != 1:
            raise IndexError_(f"bad step function line {raw!r}")
        lo_text, hi_text = left[1:-1].split(",")
        bracket = left[-1]
        try:
            lo, hi = parse(lo_text), parse(hi_text)
            value = Fraction(val.strip())
        except (OrdinalError, ValueError, ZeroDivisionError) as e:
            raise IndexError_(f"bad step function line {raw!r}: {e}") from e
        pieces.append(((lo, _succ(hi) if bracket == "]" else hi), value))
    if not pieces:
        raise IndexError_("empty step function")
    end = max(b for (_, b), _ in pieces)
    if classify(end) is not Kind.SUCCESSOR:
        raise IndexError_("the last piece must be closed on the right")
    return StepFn(OrdinalCompact(predecessor(end)), tuple(pieces))


# --- Lavrentiev index ----------------------------------------------------------------------

@dataclass
class LavrentievResult:
    index: int
    chain: list

    def to_json(self) -> dict:
        return {"index": str(self.index), "chain": [s.render() for s in self.chain]}


def _alternating_chain(K: IntervalSet, C: IntervalSet, D: IntervalSet, first: str):
    chain = [K]
    target = first
    while chain[-1]:
        nxt = chain[-1].intersect(D if target == "D" else C).closure()
        if nxt == chain[-1]:
            # no progress avoiding this side; try the other side next round
            target = "C" if target == "D" else "D"
            nxt = chain[-1].intersect(D if target == "D" else C).closure()
            if nxt == chain[-1]:
                raise IndexError_("chain stalls; C and D share a point")
        chain.append(nxt)
        target = "C" if target == "D" else "D"
    return chain


def validate_chain(chain, C: IntervalSet, D: IntervalSet) -> list:
    problems = []
    if not chain or chain[0] != chain[0].space.full():
        problems.append("chain must start at the whole space")
    if chain and chain[-1]:
        problems.append("chain must end empty")
    for i, s in enumerate(chain):
        if not s.is_closed():
            problems.append(f"set {i} is not closed")
    for i in range(len(chain) - 1):
        hi, lo = chain[i], chain[i + 1]
        if not lo.subset_of(hi):
            problems.append(f"set {i + 1} is not inside set {i}")
        diff = hi.minus(lo)
        if diff.intersect(C) and diff.intersect(D):
            problems.append(f"difference {i} meets both C and D")
    return problems


def lavrentiev_index(f: StepFn, c, d) -> LavrentievResult:
    """Shortest alternating closure chain separating ``{f <= c}`` from ``{f >= d}``."""
    c, d = Fraction(c), Fraction(d)
    if not c < d:
        raise IndexError_("need c < d")
    C = f.where(lambda v: v <= c)
    D = f.where(lambda v: v >= d)
    K = f.space.full()
    best = min((_alternating_chain(K, C, D, s) for s in ("D", "C")), key=len)
    problems = validate_chain(best, C, D)
    if problems:
        raise IndexError_("; ".join(problems))
    return LavrentievResult(len(best) - 1, best)


def _atoms(f: StepFn):
    """Pieces split so each limit endpoint becomes its own atom; closure maps atoms to atoms."""
    cuts = set()
    for (a, b), _ in f.pieces:
        cuts.add(a)
        cuts.add(b)
        if classify(a) is Kind.LIMIT:
            cuts.add(_succ(a))
    cuts = sorted(x for x in cuts if x <= f.space.end)
    return [(a, b) for a, b in zip(cuts, cuts[1:])]


def lavrentiev_brute(f: StepFn, c, d) -> int:
    """Breadth-first search over every chain of closed atom unions."""
    c, d = Fraction(c), Fraction(d)
    atoms = _atoms(f)
    n = len(atoms)
    in_c = sum(1 << i for i, (a, _) in enumerate(atoms) if f(a) <= c)
    in_d = sum(1 << i for i, (a, _) in enumerate(atoms) if f(a) >= d)
    # closure of an atom [a, b): itself plus the atom starting at b when b is a limit
    start_at = {a: i for i, (a, _) in enumerate(atoms)}
    cl = []
    for i, (a, b) in enumerate(atoms):
        m = 1 << i
        if classify(b) is Kind.LIMIT and b in start_at:
            m |= 1 << start_at[b]
        cl.append(m)
    closed = [S for S in range(1 << n) if all(cl[i] & ~S == 0 for i in range(n) if S >> i & 1)]
    full = (1 << n) - 1
    dist = {full: 0}
    queue = deque([full])
    while queue:
        S = queue.popleft()
        if S == 0:
            return dist[S]
        for T in closed:
            if T & ~S or T == S or T in dist:
                continue
            diff = S & ~T
            if diff & in_c and diff & in_d:
                continue
            dist[T] = dist[S] + 1
            queue.append(T)
    raise IndexError_("no separating chain exists")


# --- cross-index report -------------------------------------------------------------------

def index_consistency_report(seq: IndicatorSeq, finite_level: int, window: int = 20,
                             tolerance=Fraction(0), small=Fraction(1, 2)) -> dict:
    """Finite-stage checks that oscillation and the l1 spreading estimate move together."""
    spec = seq.family
    tol = Fraction(tolerance)

    spreading = []
    for j in range(1, finite_level + 1):
        osc = oscillation_membership(seq, (), j)
        L = range(j, j + window)
        est = l1_sp_estimate(spec, L, j, j) if len(L) >= j else None
        consequent = est is not None and est >= 1 - tol
        spreading.append({
            "key": f"level={j}",
            "oscillation": osc,
            "estimate": None if est is None else str(est),
            "holds": (not osc) or consequent,
        })

    # a point whose tail functions all vanish nearby is isolated from oscillation
    smallness = []
    if isinstance(spec, fam.Explicit):
        points = sorted(spec.members)
    else:
        points = list(fam.restrict(spec, min(window, 10)).members_sorted)
    for G in points:
        base = (G[-1] if G else 0) + 1
        top = max((max(H) for H in spec.members if H), default=0) if isinstance(spec, fam.Explicit) else base
        probes = range(max(base, top + 1), max(base, top + 1) + window)
        tails_small = not any(fam.member(spec, G + (n,)) for n in probes)
        osc = oscillation_membership(seq, G, 1)
        smallness.append({
            "key": str(list(G)),
            "tails_small": tails_small,
            "sup_tail": str(Fraction(0) if tails_small else Fraction(1)),
            "threshold": str(small),
            "oscillation": osc,
            "holds": (not tails_small) or not osc,
        })

    def claim(name, tag, instances):
        bad = [i for i in instances if not i["holds"]]
        return {
            "claim": name,
            "paper_ref": tag,
            "instances": instances,
            "result": "fail" if bad else "pass",
            "witness": bad[0] if bad else None,
        }

    claims = [
        claim("oscillation at the empty set forces an l1 spreading estimate near 1",
              "oscillation-implies-l1-spreading", spreading),
        claim("uniformly small tails near a point rule out level-one oscillation there",
              "small-tails-no-oscillation", smallness),
    ]
    return {
        "family": fam.render_family(spec),
        "finite_level": finite_level,
        "window": window,
        "claims": claims,
        "ok": all(c["result"] == "pass" for c in claims),
    }
