# %% [markdown]
# # Trees and norms
#
# Dyadic trees built from families, their delta orders, and the
# Tsirelson-type norm computed two ways.

# %%
from fractions import Fraction
import time

from schreierlab import Schreier
from schreierlab.norms import evaluate_witness, family_norm, suppression_exhaustive, tsirelson_norm
from schreierlab.ordinal import render
from schreierlab.trees import FromFamily, delta_order, equivalent_on_depth, nodes_up_to, parse_tree, render_node

t = parse_tree("schreier(1)")
print([render_node(x) for x in nodes_up_to(t, 3)])
print(equivalent_on_depth(t, FromFamily(Schreier(1)), 8))

# %%
for text in ["schreier(0)", "L(schreier(1),2)", "L(schreier(2),3)", "box(schreier(1),schreier(1))"]:
    print(text, "->", render(delta_order(parse_tree(text))))

# %% [markdown]
# Restricting a vector to a subset of its support never raises the family
# norm. Every vector on `[1..6]` with entries in {-2,-1,0,1,2} is checked.

# %%
print(suppression_exhaustive(Schreier(2), N=6)["ok"])
r = family_norm(Schreier(1), {3: 1, 4: -2, 5: 1})
print(r.value, r.witness)

# %%
x = {3: 1, 4: 1, 5: 1}
print(tsirelson_norm(0, x).value, tsirelson_norm(1, x).value)

x = {i: Fraction((-1) ** i * (i % 5 + 1), i % 3 + 1) for i in range(1, 31)}
start = time.perf_counter()
r = tsirelson_norm(0, x)
print(r.value, f"{time.perf_counter() - start:.2f}s", "witness re-evaluates to", evaluate_witness(0, x, r.witness))
