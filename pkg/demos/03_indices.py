# %% [markdown]
# # Oscillation, l1 trees and the Lavrentiev index

# %%
from fractions import Fraction

from schreierlab import Schreier, Singletons
from schreierlab.families import render_family
from schreierlab.indices import (
    IndicatorSeq,
    build_l1_tree,
    index_consistency_report,
    lavrentiev_index,
    oscillation_index,
    parse_stepfn,
)
from schreierlab.ordinal import render

for spec in (Singletons(), Schreier(1), Schreier(2), Schreier(3)):
    print(render_family(spec), render(oscillation_index(IndicatorSeq(spec))))

# %% [markdown]
# An order-3 tree of differences `f_n - f_m` over the first Schreier family.
# Each branch carries sets that are Boolean independent, and that gives a
# lower l1 estimate on the branch.

# %%
tree = build_l1_tree(IndicatorSeq(Schreier(1)), 3, Fraction(1, 2))
for b in tree.branches[:3]:
    print(b["pairs"], b["certificate"]["certified"], b["certificate"]["worst_ratio"])

# %%
f = parse_stepfn("""
[0,w) -> 0
[w,w] -> 1
[w+1,w*2) -> 0
[w*2,w*2] -> 1
[w*2+1,w^(2)] -> 0
""")
r = lavrentiev_index(f, Fraction(1, 4), Fraction(3, 4))
print(r.index, [s.render() for s in r.chain])

# %%
rep = index_consistency_report(IndicatorSeq(Schreier(1)), 4, 12)
for c in rep["claims"]:
    print(c["result"], c["claim"])
