"""Hypothesis strategies shared by the test modules."""
from hypothesis import strategies as st

from schreierlab.ordinal import Ordinal, compare


def _from_pairs(pairs):
    # sort by exponent descending, drop duplicate exponents
    out = []
    for exp, coef in sorted(pairs, key=_Key, reverse=True):
        if out and compare(out[-1][0], exp) == 0:
            continue
        out.append((exp, coef))
    return Ordinal(tuple(out))


class _Key:
    def __init__(self, pair):
        self.o = pair[0]

    def __lt__(self, other):
        return compare(self.o, other.o) < 0

    def __eq__(self, other):
        return compare(self.o, other.o) == 0


def ordinals(depth=3, max_terms=3, max_coef=4):
    if depth == 0:
        return st.integers(0, max_coef * 3).map(Ordinal.of)
    exps = ordinals(depth - 1, max_terms, max_coef)
    pairs = st.lists(st.tuples(exps, st.integers(1, max_coef)), max_size=max_terms)
    return pairs.map(_from_pairs)


def finsets(max_elem=12, max_size=8):
    return st.lists(st.integers(1, max_elem), max_size=max_size, unique=True).map(
        lambda xs: tuple(sorted(xs))
    )
