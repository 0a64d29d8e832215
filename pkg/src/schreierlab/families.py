"""Adequate families of finite sets and the Schreier hierarchy.

Finite sets are plain tuples of strictly increasing positive ints. A family
is described symbolically by one of three frozen dataclasses:

* :class:`Singletons`  -- the empty set and all one-point sets,
* :class:`Schreier`    -- the transfinite Schreier family of order ``alpha``,
* :class:`Explicit`    -- a finite list of members.

``Schreier(alpha)`` for ``alpha >= 1`` contains ``F`` (nonempty, ``m = min F``)
when ``F`` splits into consecutive blocks ``F_1 < ... < F_n`` with ``n <= m``
and ``F_i`` in the family of order ``alpha - 1`` (successor) or
``alpha[i]`` (limit, canonical fundamental sequence). Empty blocks are allowed.
Order 0 means :class:`Singletons`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .ordinal import (
    ONE,
    OMEGA,
    ZERO,
    Kind,
    Ordinal,
    OrdinalError,
    add,
    as_ordinal,
    classify,
    compare,
    fundamental_seq,
    omega_pow,
    parse as parse_ordinal,
    predecessor,
    render,
)

__all__ = [
    "FinSet",
    "Singletons",
    "Schreier",
    "Explicit",
    "FamilyError",
    "NotAMember",
    "ResourceCapExceeded",
    "finset",
    "member",
    "member_exhaustive",
    "member_greedy",
    "is_adequate",
    "adequacy_report",
    "is_spreading",
    "is_spreading_literal",
    "restrict",
    "in_derivative",
    "cb_rank",
    "brute_derivative_member",
    "parse_family",
    "render_family",
    "dump_members",
]

FinSet = tuple

DEFAULT_MEMBER_CAP = 200_000


class FamilyError(ValueError):
    pass


class NotAMember(FamilyError):
    pass


class ResourceCapExceeded(RuntimeError):
    pass


def finset(elements: Iterable[int]) -> FinSet:
    """Validate and normalize to a strictly increasing tuple of positive ints."""
    out = tuple(int(e) for e in elements)
    for a, b in zip(out, out[1:]):
        if a >= b:
            raise FamilyError(f"set elements must be strictly increasing: {out}")
    if out and out[0] < 1:
        raise FamilyError(f"set elements must be positive: {out}")
    return out


@dataclass(frozen=True)
class Singletons:
    pass


@dataclass(frozen=True)
class Schreier:
    alpha: Ordinal
    # "le": at most min F blocks; "eq": exactly min F block slots, the first
    # one holding min F.
    convention: str = "le"

    def __post_init__(self):
        alpha = as_ordinal(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if alpha == ZERO:
            raise FamilyError("Schreier order must be >= 1; use Singletons for order 0")
        if self.convention not in ("le", "eq"):
            raise FamilyError(f"unknown block convention {self.convention!r}")


@dataclass(frozen=True)
class Explicit:
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(finset(m) for m in self.members))


def _level(alpha: Ordinal, convention: str):
    """Family spec for order ``alpha`` (0 maps to Singletons)."""
    return Singletons() if alpha == ZERO else Schreier(alpha, convention)


@lru_cache(maxsize=None)
def _block_order(alpha: Ordinal, i: int) -> Ordinal:
    if classify(alpha) is Kind.SUCCESSOR:
        return predecessor(alpha)
    return fundamental_seq(alpha, i)


# --- membership ----------------------------------------------------------

def member(spec, F: Sequence[int]) -> bool:
    F = tuple(F)
    if not F:
        return True
    if isinstance(spec, Singletons):
        return len(F) == 1
    if isinstance(spec, Explicit):
        return F in spec.members
    if isinstance(spec, Schreier):
        if spec.alpha == ONE:
            return F[0] >= len(F)
        if spec.convention == "le" and classify(spec.alpha) is Kind.SUCCESSOR:
            return _greedy_member(spec.alpha, F)
        return _schreier_member(spec.alpha, spec.convention, F)
    raise FamilyError(f"unknown family spec {spec!r}")


@lru_cache(maxsize=1 << 20)
def _schreier_member(alpha: Ordinal, convention: str, F: tuple) -> bool:
    m = F[0]
    n = len(F)
    # forward reachability over block slots: prefix lengths placeable so far
    reach = {0}
    for slot in range(1, m + 1):
        sub = _level(_block_order(alpha, slot), convention)
        nxt = set() if (convention == "eq" and slot == 1) else set(reach)
        for pos in reach:
            for end in range(pos + 1, n + 1):
                if not member(sub, F[pos:end]):
                    # heredity: longer blocks from the same start fail too
                    break
                nxt.add(end)
        if n in nxt:
            return True
        if nxt == reach and classify(alpha) is Kind.SUCCESSOR:
            return False
        reach = nxt
    return False


def member_greedy(spec: Schreier, F: Sequence[int]) -> bool:
    """Longest-prefix greedy membership, only for successor orders.

    Valid because the block family is hereditary: taking the longest admissible
    block never hurts later blocks. Tests compare it with the slot recursion.
    """
    F = tuple(F)
    if not F:
        return True
    if classify(spec.alpha) is not Kind.SUCCESSOR:
        raise FamilyError("greedy membership needs a successor order")
    return _greedy_member(spec.alpha, F)


@lru_cache(maxsize=1 << 20)
def _greedy_member(alpha: Ordinal, F: tuple) -> bool:
    sub = _level(predecessor(alpha), "le")
    pos, blocks = 0, 0
    while pos < len(F):
        end = pos + 1
        while end < len(F) and member(sub, F[pos:end + 1]):
            end += 1
        if not member(sub, F[pos:end]):
            return False
        blocks += 1
        pos = end
    return blocks <= F[0]


def _compositions(n: int, parts: int):
    """All ways to cut ``range(n)`` into ``parts`` consecutive, possibly empty pieces."""
    for cuts in combinations(range(n + parts - 1), parts - 1):
        bounds, prev, taken = [], 0, 0
        # stars and bars: cut positions among n items and parts-1 bars
        for k, c in enumerate(cuts):
            size = c - k - taken
            bounds.append((prev, prev + size))
            prev += size
            taken += size
        bounds.append((prev, n))
        yield bounds


def member_exhaustive(spec, F: Sequence[int]) -> bool:
    """Independent oracle: enumerate every block composition explicitly."""
    F = tuple(F)
    if not F:
        return True
    if not isinstance(spec, Schreier):
        return member(spec, F)
    m = F[0]
    n = len(F)
    # m slots with trailing empties covers every "at most m blocks" choice
    for bounds in _compositions(n, m):
        if spec.convention == "eq" and bounds[0][0] == bounds[0][1]:
            continue
        ok = True
        for i, (a, b) in enumerate(bounds, start=1):
            if a == b:
                continue
            beta = _block_order(spec.alpha, i)
            if not member_exhaustive(_level(beta, spec.convention), F[a:b]):
                ok = False
                break
        if ok:
            return True
    return False


# --- structural checks ---------------------------------------------------

def adequacy_report(spec: Explicit) -> dict:
    members = spec.members
    missing = []
    for F in sorted(members):
        for r in range(len(F)):
            for G in combinations(F, r):
                if G not in members:
                    missing.append((F, G))
                    break
            if missing and missing[-1][0] == F:
                break
    ground = sorted({x for F in members for x in F})
    return {
        "hereditary": not missing,
        "has_empty": () in members,
        "missing_subsets": missing,
        "singletons_missing": [x for x in ground if (x,) not in members],
    }


def is_adequate(spec: Explicit) -> bool:
    """Hereditary and containing the empty set (singleton coverage is only reported)."""
    rep = adequacy_report(spec)
    return rep["hereditary"] and rep["has_empty"]


def _members_up_to(spec, N: int, cap: int):
    if isinstance(spec, Explicit):
        return sorted(F for F in spec.members if not F or F[-1] <= N)
    return restrict(spec, N, cap=cap).members_sorted


def is_spreading(spec, N: int, cap: int = DEFAULT_MEMBER_CAP) -> bool:
    """Check spreading at truncation ``N`` via single-element increments.

    Every spread ``sigma(F)`` with ``sigma(k) >= k`` is reached from ``F`` by
    bumping one element up by one at a time (largest first), so it is enough
    that each such elementary move keeps membership.
    """
    for F in _members_up_to(spec, N, cap):
        for i, x in enumerate(F):
            nxt = F[i + 1] if i + 1 < len(F) else N + 1
            if x + 1 < nxt and not member(spec, F[:i] + (x + 1,) + F[i + 1:]):
                return False
    return True


def is_spreading_literal(spec, N: int, cap: int = DEFAULT_MEMBER_CAP) -> bool:
    """The literal definition: every order-preserving dilation inside ``[1..N]``."""
    for F in _members_up_to(spec, N, cap):
        k = len(F)
        for image in combinations(range(1, N + 1), k):
            if all(a >= b for a, b in zip(image, F)) and not member(spec, image):
                return False
    return True


@dataclass(frozen=True)
class Restriction(Explicit):
    members_sorted: tuple = ()


def restrict(spec, N: int, cap: int = DEFAULT_MEMBER_CAP) -> Restriction:
    """All members inside ``[1..N]`` as an explicit family (sorted lexicographically)."""
    if N < 1:
        raise FamilyError("truncation N must be >= 1")
    if isinstance(spec, Explicit):
        found = [F for F in spec.members if not F or F[-1] <= N]
        if len(found) > cap:
            raise ResourceCapExceeded(f"more than {cap} members")
    else:
        found = []
        stack = [()]
        while stack:
            F = stack.pop()
            found.append(F)
            if len(found) > cap:
                raise ResourceCapExceeded(f"more than {cap} members in [1..{N}]")
            start = F[-1] + 1 if F else 1
            for x in range(start, N + 1):
                G = F + (x,)
                # heredity: a non-member has no member supersets
                if member(spec, G):
                    stack.append(G)
    found.sort()
    return Restriction(members=frozenset(found), members_sorted=tuple(found))


def dump_members(family: Explicit) -> str:
    """One member per line, ascending lexicographic, as JSON arrays."""
    rows = sorted(family.members)
    return "".join(json.dumps(list(F)) + "\n" for F in rows)


# --- Cantor-Bendixson rank ----------------------------------------------

def cb_rank(spec, F: Sequence[int]) -> Ordinal:
    """Cantor-Bendixson rank of the point ``F`` inside the compact family."""
    F = tuple(F)
    if not member(spec, F):
        raise NotAMember(f"{list(F)} is not a member")
    if isinstance(spec, Explicit):
        return ZERO
    if isinstance(spec, Singletons):
        return ONE if not F else ZERO
    if not F:
        # sup of rank({n}) + 1, cofinal in w^alpha (see the tests)
        return omega_pow(spec.alpha)
    if spec.alpha == ONE:
        return Ordinal.of(F[0] - len(F))
    return _schreier_rank(spec.alpha, spec.convention, F)


@lru_cache(maxsize=1 << 18)
def _schreier_rank(alpha: Ordinal, convention: str, F: tuple) -> Ordinal:
    m, n = F[0], len(F)
    # reach[j] = prefix lengths coverable by block slots 1..j
    reach = [{0}]
    for slot in range(1, m + 1):
        sub = _level(_block_order(alpha, slot), convention)
        nxt = set() if (convention == "eq" and slot == 1) else set(reach[-1])
        for pos in reach[-1]:
            for end in range(pos + 1, n + 1):
                if not member(sub, F[pos:end]):
                    break
                nxt.add(end)
        reach.append(nxt)

    # tails[j] = w^{b_m} + ... + w^{b_{j+1}}
    tails = [ZERO] * (m + 1)
    for j in range(m - 1, 0, -1):
        tails[j] = add(tails[j + 1], omega_pow(_block_order(alpha, j + 1)))

    # the point's rank is charged to the last open block j; every later
    # slot still contributes a full w^{b_i} of room for extensions
    best = None
    for j in range(1, m + 1):
        sub = _level(_block_order(alpha, j), convention)
        for t in reach[j - 1]:
            rest = F[t:]
            if not member(sub, rest):
                continue
            value = add(tails[j], cb_rank(sub, rest))
            if best is None or compare(value, best) > 0:
                best = value
    return best


def in_derivative(spec, F: Sequence[int], rho) -> bool:
    """Whether ``F`` survives ``rho`` Cantor-Bendixson derivatives of the family."""
    F = tuple(F)
    rho = as_ordinal(rho)
    if not member(spec, F):
        return False
    return compare(rho, cb_rank(spec, F)) <= 0


def brute_derivative_member(spec, F: Sequence[int], j: int, window: int = 20) -> bool:
    """Iterated tail-extension test of ``F`` in the ``j``-th derived family.

    ``F`` is in the first derived family of a spreading family when ``F + {n}``
    is a member for all large ``n``; spreading lets one far probe stand in for
    "all large n". The probe sits ``window`` past the current maximum.
    """
    F = tuple(F)
    for _ in range(j):
        F = F + ((F[-1] if F else 0) + window,)
    return member(spec, F)


# --- text ------------------------------------------------------------------

_SCHREIER = re.compile(r"^\s*schreier\s*\((.*?)(?:,\s*(le|eq))?\)\s*$", re.I)
_EXPLICIT = re.compile(r"^\s*explicit\s*\((.*)\)\s*$", re.I | re.S)


def parse_family(text: str):
    """``singletons`` | ``schreier(<ordinal>[,le|eq])`` | ``explicit(<json list of sets>)``."""
    t = text.strip()
    if t.lower() in ("singletons", "schreier(0)"):
        return Singletons()
    m = _SCHREIER.match(t)
    if m:
        try:
            alpha = parse_ordinal(m.group(1))
        except OrdinalError as e:
            raise FamilyError(str(e)) from e
        if alpha == ZERO:
            return Singletons()
        return Schreier(alpha, m.group(2) or "le")
    m = _EXPLICIT.match(t)
    if m:
        try:
            data = json.loads(m.group(1))
        except json.JSONDecodeError as e:
            raise FamilyError(f"bad explicit member list: {e}") from e
        return Explicit(frozenset(finset(x) for x in data))
    raise FamilyError(f"cannot parse family spec {text!r}")


def render_family(spec) -> str:
    if isinstance(spec, Singletons):
        return "singletons"
    if isinstance(spec, Schreier):
        suffix = "" if spec.convention == "le" else ",eq"
        return f"schreier({render(spec.alpha)}{suffix})"
    return "explicit(" + json.dumps([list(F) for F in sorted(spec.members)]) + ")"
