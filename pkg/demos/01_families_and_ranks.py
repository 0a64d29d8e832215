# %% [markdown]
# # Schreier families and their derivatives
#
# Membership, Cantor-Bendixson ranks, and a look at how the symbolic rank
# lines up with the slow probe-based test.

# %%
from schreierlab import Schreier, Singletons, parse_ordinal, render_ordinal
from schreierlab.families import brute_derivative_member, cb_rank, in_derivative, member, restrict

S1, S2 = Schreier(1), Schreier(2)
print(member(S1, (3, 5, 9)), member(S1, (2, 5, 9)))
print(member(S2, (2, 3, 6, 7, 8)))

# %% [markdown]
# In the first family the rank of a member is `min F - |F|`.

# %%
for F in [(5, 7), (9,), (4, 5, 6, 7), ()]:
    print(F, render_ordinal(cb_rank(S1, F)))

# %%
for alpha in ["1", "2", "3", "w", "w+1", "w^(2)"]:
    spec = Schreier(parse_ordinal(alpha))
    print(f"rank of the empty set in Schreier({alpha}) = {render_ordinal(cb_rank(spec, ()))}")

# %% [markdown]
# The probe test appends far-away points one at a time. It agrees with the
# symbolic answer on every member of `S2` inside `[1..10]`.

# %%
members = restrict(S2, 10).members_sorted
agree = all(in_derivative(S2, F, j) == brute_derivative_member(S2, F, j) for F in members for j in range(10))
print(len(members), "members checked, agree:", agree)
print("singletons:", render_ordinal(cb_rank(Singletons(), ())))
