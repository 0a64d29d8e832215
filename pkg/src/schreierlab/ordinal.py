"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is a tuple of ``(exponent, coefficient)`` terms with strictly
decreasing exponents, each exponent itself an :class:`Ordinal`. Values are
immutable and canonical, so ``==`` and ``hash`` are structural.

Text form::

    ordinal := "0" | term ("+" term)*
    term    := nat | "w" ["*" nat] | "w^(" ordinal ")" ["*" nat]

e.g. ``w^(2)*3+w*2+5`` or ``w^(w)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

__all__ = [
    "Ordinal",
    "OrdinalError",
    "Kind",
    "ZERO",
    "ONE",
    "OMEGA",
    "as_ordinal",
    "compare",
    "add",
    "omega_pow",
    "nat_mul",
    "classify",
    "predecessor",
    "fundamental_seq",
    "p_alpha",
    "half",
    "parse",
    "render",
    "to_json",
    "from_json",
]


class OrdinalError(ValueError):
    pass


class Kind(Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    LIMIT = "limit"


@dataclass(frozen=True, eq=True)
class Ordinal:
    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for exp, coef in self.terms:
            if not isinstance(exp, Ordinal):
                raise OrdinalError(f"exponent must be an Ordinal, got {exp!r}")
            if not isinstance(coef, int) or coef < 1:
                raise OrdinalError(f"coefficient must be a positive int, got {coef!r}")
            if prev is not None and compare(prev, exp) <= 0:
                raise OrdinalError("exponents must be strictly decreasing")
            prev = exp

    # --- convenience -----------------------------------------------------
    @classmethod
    def of(cls, n: int) -> Ordinal:
        if n < 0:
            raise OrdinalError("negative ordinal")
        return cls(((ZERO_EXP, n),)) if n else cls()

    def is_finite(self) -> bool:
        return all(not exp.terms for exp, _ in self.terms)

    def __int__(self) -> int:
        if not self.is_finite():
            raise OrdinalError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def leading(self) -> tuple:
        if not self.terms:
            raise OrdinalError("zero has no leading term")
        return self.terms[0]

    def _cmp(self, other) -> int:
        return compare(self, as_ordinal(other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __add__(self, other):
        return add(self, as_ordinal(other))

    def __radd__(self, other):
        return add(as_ordinal(other), self)

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Ordinal({render(self)!r})"


# The exponent of a finite term is the empty ordinal; built before the
# public constants so that ``Ordinal.of`` can reference it.
ZERO_EXP = Ordinal()
ZERO = ZERO_EXP
ONE = Ordinal(((ZERO_EXP, 1),))
OMEGA = Ordinal(((ONE, 1),))

OrdinalLike = Union[Ordinal, int, str]


def as_ordinal(x: OrdinalLike) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not an ordinal")
    if isinstance(x, int):
        return Ordinal.of(x)
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot interpret {x!r} as an ordinal")


def compare(a: Ordinal, b: Ordinal) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    lead_exp, lead_coef = b.terms[0]
    kept = []
    for exp, coef in a.terms:
        c = compare(exp, lead_exp)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            # terms of equal exponent merge; smaller ones are absorbed
            kept.append((exp, coef + lead_coef))
            return Ordinal(tuple(kept) + b.terms[1:])
        else:
            break
    return Ordinal(tuple(kept) + b.terms)


def omega_pow(a: OrdinalLike) -> Ordinal:
    return Ordinal(((as_ordinal(a), 1),))


def nat_mul(a: Ordinal, k: int) -> Ordinal:
    """``a * k`` for a natural number ``k`` (repeated addition)."""
    if k < 0:
        raise OrdinalError("negative multiplier")
    if k == 0 or not a.terms:
        return ZERO
    (exp, coef), rest = a.terms[0], a.terms[1:]
    # a*k = w^e*(c*k) + rest, since every copy of rest is absorbed by the next leading term
    return Ordinal(((exp, coef * k),) + rest)


def classify(a: Ordinal) -> Kind:
    if not a.terms:
        return Kind.ZERO
    return Kind.SUCCESSOR if not a.terms[-1][0].terms else Kind.LIMIT


def predecessor(a: Ordinal) -> Ordinal:
    if classify(a) is not Kind.SUCCESSOR:
        raise OrdinalError(f"{a} has no predecessor")
    *head, (exp, coef) = a.terms
    tail = ((exp, coef - 1),) if coef > 1 else ()
    return Ordinal(tuple(head) + tail)


def successor(a: Ordinal) -> Ordinal:
    return add(a, ONE)


def fundamental_seq(a: Ordinal, i: int) -> Ordinal:
    """The ``i``-th element (``i >= 1``) of the canonical sequence increasing to a limit ``a``."""
    if classify(a) is not Kind.LIMIT:
        raise OrdinalError(f"{a} is not a limit ordinal")
    if i < 1:
        raise OrdinalError("index must be positive")
    *head, (exp, coef) = a.terms
    prefix = Ordinal(tuple(head) + (((exp, coef - 1),) if coef > 1 else ()))
    if classify(exp) is Kind.SUCCESSOR:
        step = Ordinal(((predecessor(exp), i),))
    else:
        step = omega_pow(fundamental_seq(exp, i))
    return add(prefix, step)


def p_alpha(a: Ordinal) -> Ordinal:
    """Leading CNF term ``w^g * k`` of ``a``."""
    if not a.terms:
        raise OrdinalError("p_alpha of zero")
    return Ordinal((a.terms[0],))


def half(a: Ordinal) -> Ordinal:
    """``w^g * floor((k+1)/2)`` where ``w^g * k`` is the leading term of ``a``."""
    if not a.terms:
        raise OrdinalError("half of zero")
    exp, coef = a.terms[0]
    return Ordinal(((exp, (coef + 1) // 2),))


# --- text and JSON -------------------------------------------------------

def render(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for exp, coef in a.terms:
        if not exp.terms:
            parts.append(str(coef))
            continue
        base = "w" if exp == ONE else f"w^({render(exp)})"
        parts.append(base if coef == 1 else f"{base}*{coef}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(\d+|w\^\(|w|\*|\+|\))")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise OrdinalError(f"unexpected input at {pos}: {text[pos:]!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise OrdinalError(f"expected {expected or 'token'}, got {tok!r}")
        self.i += 1
        return tok

    def ordinal(self) -> Ordinal:
        value = self.term()
        while self.peek() == "+":
            self.take("+")
            value = add(value, self.term())
        return value

    def term(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            return Ordinal.of(int(tok))
        if tok == "w":
            exp = ONE
        elif tok == "w^(":
            exp = self.ordinal()
            self.take(")")
        else:
            raise OrdinalError(f"unexpected token {tok!r}")
        coef = 1
        if self.peek() == "*":
            self.take("*")
            n = self.take()
            if not n.isdigit():
                raise OrdinalError(f"expected natural number after '*', got {n!r}")
            coef = int(n)
        if coef == 0:
            return ZERO
        return Ordinal(((exp, coef),))


def parse(text: str) -> Ordinal:
    p = _Parser(text)
    if not p.tokens:
        raise OrdinalError("empty ordinal text")
    value = p.ordinal()
    if p.peek() is not None:
        raise OrdinalError(f"trailing input: {p.tokens[p.i:]}")
    return value


def to_json(a: Ordinal) -> list:
    return [[to_json(exp), coef] for exp, coef in a.terms]


def from_json(data) -> Ordinal:
    if not isinstance(data, list):
        raise OrdinalError("ordinal JSON must be a list")
    terms = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2):
            raise OrdinalError("each term must be [exponent, coefficient]")
        terms.append((from_json(item[0]), item[1]))
    return Ordinal(tuple(terms))
