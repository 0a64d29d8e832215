"""Dyadic trees on {-1, +1}, their operators, and ordinal tree orders.

Nodes are tuples of +1/-1. Trees are described lazily by frozen dataclasses
and queried through :func:`member`; nothing infinite is ever materialized.

Operators (``e_n`` is the all-minus node of length ``n``):

* ``BoxPlus(T, S)``: T together with every ``u + y`` where ``u`` is in T and
  ``e_len(u) + y`` is in S.
* ``LSub(T, n)``: the nodes ``e_0..e_{n-1}`` plus the nodes of T that extend
  ``e_{n-1}``.
* ``TreeSum(gen)``: the union of ``LSub(gen(i), i)`` over ``i >= 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

from . import families as fam
from .ordinal import (
    ONE,
    ZERO,
    Kind,
    Ordinal,
    add,
    as_ordinal,
    classify,
    fundamental_seq,
    omega_pow,
    predecessor,
)

__all__ = [
    "Node",
    "ExplicitTree",
    "FromFamily",
    "SchreierTree",
    "BoxPlus",
    "LSub",
    "TreeSum",
    "SPINE",
    "WellFoundedTree",
    "TreeError",
    "Undecided",
    "UnsupportedTree",
    "parse_node",
    "render_node",
    "spine",
    "box_chain",
    "member",
    "nodes_up_to",
    "equivalent_on_depth",
    "is_weakly_independent",
    "has_property_FB",
    "wf_order",
    "boolean_tree",
    "dead_pattern",
    "delta_order",
    "parse_tree",
    "load_explicit_tree",
]

Node = tuple


class TreeError(ValueError):
    pass


class Undecided(TreeError):
    pass


class UnsupportedTree(TreeError):
    pass


def parse_node(text: str) -> Node:
    out = []
    for ch in text.strip():
        if ch == "+":
            out.append(1)
        elif ch == "-":
            out.append(-1)
        else:
            raise TreeError(f"bad node character {ch!r}")
    return tuple(out)


def render_node(node: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in node)


def spine(n: int) -> Node:
    return (-1,) * n


def _plus_positions(node):
    return tuple(i for i, s in enumerate(node, start=1) if s > 0)


# --- tree specs --------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitTree:
    nodes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        nodes = frozenset(tuple(x) for x in self.nodes) | {()}
        for x in nodes:
            if any(s not in (1, -1) for s in x):
                raise TreeError(f"node entries must be +1/-1: {x}")
            if x and x[:-1] not in nodes:
                raise TreeError(f"not prefix-closed: {render_node(x)} lacks its parent")
        object.__setattr__(self, "nodes", nodes)


@dataclass(frozen=True)
class FromFamily:
    spec: object


@dataclass(frozen=True)
class SchreierTree:
    alpha: Ordinal

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_ordinal(self.alpha))


@dataclass(frozen=True)
class BoxPlus:
    left: object
    right: object


@dataclass(frozen=True)
class LSub:
    tree: object
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise TreeError("LSub index must be >= 1")


@dataclass(frozen=True)
class TreeSum:
    generator: Callable = field(compare=False, hash=False)
    label: str = ""

    def __post_init__(self):
        # equality and memoization go through the label
        if not self.label:
            object.__setattr__(self, "label", f"sum@{id(self.generator):x}")


@dataclass(frozen=True)
class _Spine:
    pass


SPINE = _Spine()


def box_chain(trees: Iterable) -> object:
    """``[[spine (+) T_1] (+) T_2] ... (+) T_n``; the spine alone for an empty list."""
    acc = SPINE
    for t in trees:
        acc = BoxPlus(acc, t)
    return acc


@lru_cache(maxsize=None)
def _schreier_expansion(alpha: Ordinal) -> TreeSum:
    if classify(alpha) is Kind.SUCCESSOR:
        inner = SchreierTree(predecessor(alpha))
        gen = lambda i: box_chain([inner] * i)  # noqa: E731
    else:
        gen = lambda i: box_chain(SchreierTree(fundamental_seq(alpha, j)) for j in range(1, i + 1))  # noqa: E731
    return TreeSum(gen, f"schreier-sum({alpha})")


# --- membership ----------------------------------------------------------------

def member(t, node: Sequence[int]) -> bool:
    return _member(t, tuple(node))


@lru_cache(maxsize=1 << 20)
def _member(t, x: tuple) -> bool:
    if not x:
        return True
    if isinstance(t, _Spine):
        return all(s < 0 for s in x)
    if isinstance(t, ExplicitTree):
        return x in t.nodes
    if isinstance(t, FromFamily):
        return fam.member(t.spec, _plus_positions(x))
    if isinstance(t, SchreierTree):
        if t.alpha == ZERO:
            return sum(1 for s in x if s > 0) <= 1
        return _member(_schreier_expansion(t.alpha), x)
    if isinstance(t, BoxPlus):
        if _member(t.left, x):
            return True
        for k in range(len(x)):
            if _member(t.left, x[:k]) and _member(t.right, spine(k) + x[k:]):
                return True
        return False
    if isinstance(t, LSub):
        head = x[: t.n - 1]
        if any(s > 0 for s in head):
            return False
        if len(x) <= t.n - 1:
            return True
        return _member(t.tree, x)
    if isinstance(t, TreeSum):
        pos = _plus_positions(x)
        if not pos:
            return True
        return any(_member(t.generator(i), x) for i in range(1, pos[0] + 1))
    raise TreeError(f"unknown tree spec {t!r}")


def nodes_up_to(t, depth: int):
    """Member nodes of length <= depth, by breadth-first growth from the root."""
    level = [()]
    out = [()]
    for _ in range(depth):
        nxt = []
        for x in level:
            for s in (-1, 1):
                y = x + (s,)
                if member(t, y):
                    nxt.append(y)
        out.extend(nxt)
        level = nxt
    return out


def equivalent_on_depth(a, b, d: int) -> bool:
    for length in range(d + 1):
        for x in product((-1, 1), repeat=length):
            if member(a, x) != member(b, x):
                return False
    return True


def is_weakly_independent(t, depth: int) -> bool:
    """Every member keeps membership after turning any +1 entries into -1.

    Single flips suffice: any weakening is a chain of single flips.
    """
    for x in nodes_up_to(t, depth):
        for i, s in enumerate(x):
            if s > 0 and not member(t, x[:i] + (-1,) + x[i + 1 :]):
                return False
    return True


def _spreading_family(spec) -> bool:
    return isinstance(spec, (fam.Schreier, fam.Singletons))


def has_property_FB(t, stem: Sequence[int], probe: int, window: int = 8):
    """Return ``(holds, case)`` for the one-step positive extensions past ``stem``.

    ``case`` is ``"i"`` when ``stem + e_j + (+1)`` is a member for every probed
    ``j`` and ``"ii"`` when it never is.
    """
    stem = tuple(stem)
    if not member(t, stem):
        raise TreeError("stem is not a member")
    ext = lambda j: member(t, stem + spine(j) + (1,))  # noqa: E731
    if isinstance(t, FromFamily) and _spreading_family(t.spec):
        # membership does not depend on j once j >= 0 for these families
        return True, "i" if ext(probe) else "ii"
    if isinstance(t, ExplicitTree):
        deepest = max(len(x) for x in t.nodes)
        if len(stem) + probe + window <= deepest:
            raise Undecided("window does not reach past the explicit tree")
    values = {ext(j) for j in range(probe, probe + window)}
    if len(values) == 2:
        return False, None
    return True, "i" if values.pop() else "ii"


# --- well-founded trees and orders --------------------------------------------

@dataclass(frozen=True)
class WellFoundedTree:
    nodes: frozenset = field(default_factory=frozenset)
    truncated: bool = False

    def __post_init__(self):
        nodes = frozenset(tuple(x) for x in self.nodes) - {()}
        for x in nodes:
            if len(x) > 1 and x[:-1] not in nodes:
                raise TreeError(f"not prefix-closed at {x}")
        object.__setattr__(self, "nodes", nodes)


def wf_order(t: WellFoundedTree) -> Ordinal:
    """Number of leaf-stripping rounds until the tree is empty."""
    current = set(t.nodes)
    rounds = 0
    while current:
        parents = {x[:-1] for x in current}
        current = {x for x in current if x in parents}
        rounds += 1
    return Ordinal.of(rounds)


def _masks(pairs):
    ground = sorted({g for A, B in pairs for g in A} | {g for A, B in pairs for g in B}, key=repr)
    bit = {g: 1 << i for i, g in enumerate(ground)}
    to_mask = lambda S: sum(bit[g] for g in S)  # noqa: E731
    return [(to_mask(A), to_mask(B)) for A, B in pairs]


def dead_pattern(pairs, indices: Sequence[int]):
    """First sign pattern whose mixed intersection is empty, or None.

    ``indices`` are 1-based positions into ``pairs``; sign +1 picks A, -1 picks B.
    """
    masks = _masks(pairs)
    full = -1
    for signs in product((1, -1), repeat=len(indices)):
        acc = full
        for s, n in zip(signs, indices):
            A, B = masks[n - 1]
            acc &= A if s > 0 else B
        if acc == 0:
            return signs
    return None


def boolean_tree(pairs, depth_cap: int = 8) -> WellFoundedTree:
    """Tree of index tuples whose every mixed intersection is nonempty."""
    masks = _masks(pairs)
    nodes = set()
    truncated = False
    # each stack entry: (tuple, list of the 2^k intersection masks)
    stack = [((), [-1])]
    while stack:
        tup, cells = stack.pop()
        for n, (A, B) in enumerate(masks, start=1):
            nxt = []
            for c in cells:
                a, b = c & A, c & B
                if not a or not b:
                    break
                nxt.append(a)
                nxt.append(b)
            else:
                child = tup + (n,)
                if len(child) > depth_cap:
                    truncated = True
                    continue
                nodes.add(child)
                stack.append((child, nxt))
    return WellFoundedTree(frozenset(nodes), truncated)


# --- delta order ---------------------------------------------------------------

def _top_rank(t) -> Ordinal:
    """Rank of the all-minus limit point among the tree's infinite branches."""
    if isinstance(t, SchreierTree):
        return omega_pow(t.alpha) if t.alpha != ZERO else ONE
    if isinstance(t, FromFamily):
        return fam.cb_rank(t.spec, ())
    if isinstance(t, _Spine):
        return ZERO
    if isinstance(t, LSub):
        return _top_rank(t.tree)
    if isinstance(t, BoxPlus):
        if not _schreier_like(t.right):
            raise UnsupportedTree("box-plus rank needs a Schreier-type right operand")
        return add(_top_rank(t.right), _top_rank(t.left))
    raise UnsupportedTree(f"no closed form for {type(t).__name__}")


def _schreier_like(t) -> bool:
    if isinstance(t, (SchreierTree, _Spine)):
        return True
    if isinstance(t, FromFamily):
        return _spreading_family(t.spec)
    if isinstance(t, BoxPlus):
        return _schreier_like(t.left) and _schreier_like(t.right)
    if isinstance(t, LSub):
        return _schreier_like(t.tree)
    return False


def delta_order(t) -> Ordinal:
    """Order of the delta-derivation: one more than the rank of the top limit point.

    Finite explicit trees have no limit points and order 1.
    """
    if isinstance(t, ExplicitTree):
        return ONE
    if isinstance(t, FromFamily) and isinstance(t.spec, fam.Explicit):
        return ONE
    if isinstance(t, TreeSum):
        raise UnsupportedTree("sums are only supported through SchreierTree")
    return add(_top_rank(t), ONE)


# --- text ------------------------------------------------------------------------

def load_explicit_tree(text: str) -> ExplicitTree:
    """One node per line in +/- form; blank lines are the root."""
    nodes = {parse_node(line) for line in text.splitlines()}
    return ExplicitTree(frozenset(nodes))


class _TreeParser:
    def __init__(self, text):
        self.s = text.replace(" ", "")
        self.i = 0

    def fail(self, msg):
        raise TreeError(f"{msg} at {self.i} in {self.s!r}")

    def eat(self, lit):
        if not self.s.startswith(lit, self.i):
            self.fail(f"expected {lit!r}")
        self.i += len(lit)

    def args(self):
        # raw text up to the matching close paren, split at top-level commas
        depth, start, parts = 0, self.i, []
        while self.i < len(self.s):
            ch = self.s[self.i]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0:
                    parts.append(self.s[start : self.i])
                    self.i += 1
                    return parts
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(self.s[start : self.i])
                start = self.i + 1
            self.i += 1
        self.fail("unbalanced parentheses")

    def tree(self):
        for name in ("schreier", "family", "L", "box", "spine", "explicit"):
            if self.s.startswith(name + "(", self.i) or (name == "spine" and self.s.startswith("spine", self.i)):
                break
        else:
            self.fail("unknown tree constructor")
        if name == "spine" and not self.s.startswith("spine(", self.i):
            self.i += len("spine")
            return SPINE
        self.eat(name + "(")
        parts = self.args()
        if name == "schreier":
            return SchreierTree(as_ordinal(parts[0]))
        if name == "family":
            return FromFamily(fam.parse_family(",".join(parts)))
        if name == "L":
            if len(parts) != 2:
                self.fail("L takes a tree and an index")
            return LSub(parse_tree(parts[0]), int(parts[1]))
        if name == "box":
            return box_chain(parse_tree(p) for p in parts if p)
        if name == "spine":
            return SPINE
        nodes = {parse_node(p.strip('"\'')) for p in parts if p.strip('"\'')}
        return ExplicitTree(frozenset(nodes))


def parse_tree(text: str):
    """Tree spec grammar::

        tree := "schreier(" ordinal ")" | "family(" family ")" | "L(" tree "," int ")"
              | "box(" tree ("," tree)* ")" | "spine" | "explicit(" node ("," node)* ")"
    """
    p = _TreeParser(text)
    try:
        t = p.tree()
    except (ValueError, IndexError) as e:
        raise TreeError(str(e)) from e
    if p.i != len(p.s):
        p.fail("trailing input")
    return t
