import random
from itertools import product

import pytest

from schreierlab.families import Explicit, Schreier, Singletons, cb_rank, is_adequate, restrict
from schreierlab.ordinal import OMEGA, ONE, Ordinal, add, omega_pow, parse
from schreierlab.trees import (
    SPINE,
    BoxPlus,
    ExplicitTree,
    FromFamily,
    LSub,
    SchreierTree,
    TreeError,
    TreeSum,
    Undecided,
    UnsupportedTree,
    WellFoundedTree,
    boolean_tree,
    box_chain,
    dead_pattern,
    delta_order,
    equivalent_on_depth,
    has_property_FB,
    is_weakly_independent,
    load_explicit_tree,
    member,
    nodes_up_to,
    parse_node,
    parse_tree,
    render_node,
    wf_order,
)

P, M = 1, -1


def n(text):
    return parse_node(text)


# --- membership and operators ---------------------------------------------------

def test_member_examples():
    t = FromFamily(Schreier(1))
    assert member(t, n("-++"))
    assert not member(t, n("++"))
    for tree in (t, SchreierTree(2), SPINE, ExplicitTree()):
        assert member(tree, ())


def test_schreier0_is_at_most_one_plus():
    t = SchreierTree(0)
    assert member(t, n("--+--"))
    assert not member(t, n("-+-+"))
    assert equivalent_on_depth(t, FromFamily(Singletons()), 8)


def test_box_plus_definition():
    # brute: T (+) S = T u {u + y : u in T, e_len(u) + y in S}
    T = ExplicitTree({n("+"), n("-"), n("+-")})
    S = SchreierTree(0)
    box = BoxPlus(T, S)
    for length in range(6):
        for x in product((M, P), repeat=length):
            expect = member(T, x) or any(
                member(T, x[:k]) and member(S, (M,) * k + x[k:]) for k in range(len(x) + 1)
            )
            assert member(box, x) == expect


def test_box_power_of_s0_counts_plus_signs():
    for k in range(4):
        t = box_chain([SchreierTree(0)] * k)
        for length in range(7):
            for x in product((M, P), repeat=length):
                assert member(t, x) == (x.count(P) <= k)


def test_lsub_reading():
    t = LSub(SchreierTree(1), 3)
    assert member(t, n("--"))
    assert member(t, n("--+"))
    assert member(t, n("---++"))
    assert not member(t, n("-+"))
    assert not member(t, n("+"))


def test_tree_sum_rule():
    gens = {1: SchreierTree(0), 2: ExplicitTree({n("+")}), 3: box_chain([SchreierTree(0)] * 3)}
    t = TreeSum(lambda i: gens.get(i, ExplicitTree()), "test-sum")
    assert member(t, n("----"))
    assert member(t, n("+"))
    assert not member(t, n("+---+"))
    assert member(t, n("--+-+-+"))
    assert not member(t, n("--+-+-++"))


@pytest.mark.parametrize("alpha", [0, 1, 2, 3, OMEGA])
def test_schreier_tree_matches_family(alpha):
    spec = Singletons() if alpha == 0 else Schreier(alpha)
    assert equivalent_on_depth(SchreierTree(alpha), FromFamily(spec), 8)


def test_equivalence_detects_difference():
    assert not equivalent_on_depth(SchreierTree(1), FromFamily(Schreier(2)), 4)
    assert not member(SchreierTree(1), n("-+++"))
    assert member(FromFamily(Schreier(2)), n("-+++"))
    t = SchreierTree(2)
    assert equivalent_on_depth(t, t, 5)


@pytest.mark.parametrize("tree", [SchreierTree(1), SchreierTree(2), FromFamily(Schreier(2)), LSub(SchreierTree(1), 2), box_chain([SchreierTree(1)] * 2)])
def test_prefix_closed(tree):
    for x in nodes_up_to(tree, 8):
        for k in range(len(x)):
            assert member(tree, x[:k])
    # breadth-first growth finds every member
    count = sum(member(tree, x) for L in range(7) for x in product((M, P), repeat=L))
    assert count == len(nodes_up_to(tree, 6))


# --- weak independence and FB ---------------------------------------------------

def test_weak_independence_examples():
    assert is_weakly_independent(FromFamily(Schreier(1)), 8)
    assert not is_weakly_independent(ExplicitTree({n("+"), n("++")}), 2)
    assert is_weakly_independent(ExplicitTree({n("+"), n("-")}), 1)


def test_single_flip_check_matches_all_weakenings():
    rng = random.Random(5)
    for _ in range(200):
        nodes = set()
        for _ in range(rng.randint(1, 6)):
            x = tuple(rng.choice((M, P)) for _ in range(rng.randint(1, 4)))
            nodes.update(x[:k] for k in range(1, len(x) + 1))
        t = ExplicitTree(frozenset(nodes))
        literal = all(
            member(t, tuple(-1 if keep == 0 else s for s, keep in zip(x, mask)))
            for x in t.nodes
            for mask in product((0, 1), repeat=len(x))
        )
        assert is_weakly_independent(t, 4) == literal


def test_property_fb():
    t = FromFamily(Schreier(1))
    assert has_property_FB(t, n("--+"), 20) == (True, "i")
    assert has_property_FB(t, n("+-"), 20) == (True, "ii")
    assert has_property_FB(t, (), 5) == (True, "i")
    small = ExplicitTree({n("-"), n("--"), n("--+")})
    with pytest.raises(Undecided):
        has_property_FB(small, (), 0, window=2)
    assert has_property_FB(small, (), 3, window=4) == (True, "ii")


def test_property_fb_lazy_tree_window():
    t = SchreierTree(1)
    assert has_property_FB(t, n("--+"), 2) == (True, "i")
    assert has_property_FB(t, n("+"), 0) == (True, "ii")


# --- well-founded trees -------------------------------------------------------------

def test_wf_order_examples():
    assert wf_order(WellFoundedTree()) == Ordinal.of(0)
    assert wf_order(WellFoundedTree({("a",)})) == Ordinal.of(1)
    assert wf_order(WellFoundedTree({("a",), ("a", "b")})) == Ordinal.of(2)
    with pytest.raises(TreeError):
        WellFoundedTree({("a", "b")})


def test_wf_order_monotone_random():
    rng = random.Random(11)
    for _ in range(1000):
        nodes = set()
        for _ in range(rng.randint(0, 6)):
            x = tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 5)))
            nodes.update(x[:k] for k in range(1, len(x) + 1))
        sub = {x for x in nodes if rng.random() < 0.6}
        sub = {x for x in sub if all(x[:k] in sub for k in range(1, len(x)))}
        t, s = WellFoundedTree(frozenset(nodes)), WellFoundedTree(frozenset(sub))
        assert wf_order(s) <= wf_order(t)
        assert wf_order(t) == Ordinal.of(max((len(x) for x in nodes), default=0))


# --- Boolean trees -------------------------------------------------------------------

def cube_pairs(k):
    ground = list(product((0, 1), repeat=k))
    return [({g for g in ground if g[i]}, {g for g in ground if not g[i]}) for i in range(k)]


def brute_boolean_order(pairs, cap):
    best = 0
    frontier = [()]
    for depth in range(1, cap + 1):
        nxt = []
        for tup in frontier:
            for i in range(1, len(pairs) + 1):
                cand = tup + (i,)
                if dead_pattern(pairs, cand) is None:
                    nxt.append(cand)
        if not nxt:
            break
        best = depth
        frontier = nxt
    return best


def test_boolean_tree_independent_pairs():
    pairs = cube_pairs(3)
    t = boolean_tree(pairs, 6)
    assert wf_order(t) == Ordinal.of(3)
    assert not t.truncated
    assert brute_boolean_order(pairs, 6) == 3


def test_boolean_tree_dependent_pairs():
    A = {0, 1}
    B = {2, 3}
    pairs = [(A, B), (A, B)]
    assert dead_pattern(pairs, (1, 2)) == (1, -1)
    t = boolean_tree(pairs, 4)
    assert (1, 2) not in t.nodes
    assert wf_order(t) == Ordinal.of(1)


def test_boolean_tree_empty_and_truncated():
    assert wf_order(boolean_tree([], 4)) == Ordinal.of(0)
    t = boolean_tree(cube_pairs(4), 2)
    assert t.truncated and wf_order(t) == Ordinal.of(2)


def test_boolean_tree_random_matches_brute():
    rng = random.Random(2)
    for _ in range(60):
        ground = range(8)
        pairs = []
        for _ in range(rng.randint(1, 4)):
            A = {g for g in ground if rng.random() < 0.5}
            B = {g for g in ground if g not in A and rng.random() < 0.8}
            pairs.append((A, B))
        assert wf_order(boolean_tree(pairs, 5)) == Ordinal.of(brute_boolean_order(pairs, 5))


@pytest.mark.parametrize("spec", [Schreier(1), Schreier(2), Singletons()])
def test_positive_projection_matches_boolean_tree(spec):
    depth = 8
    members = restrict(spec, depth).members_sorted
    # n-th support is the set of members containing n; its complement is the B side
    pairs = [({F for F in members if k in F}, {F for F in members if k not in F}) for k in range(1, depth + 1)]
    bt = boolean_tree(pairs, depth)
    increasing = {x for x in bt.nodes if all(a < b for a, b in zip(x, x[1:]))} | {()}
    projected = {tuple(i for i, s in enumerate(x, 1) if s > 0) for x in nodes_up_to(FromFamily(spec), depth)}
    assert increasing == projected


# --- delta order ---------------------------------------------------------------------------

def test_delta_examples():
    assert delta_order(SchreierTree(0)) == Ordinal.of(2)
    for alpha in (1, 2, 3):
        for j in (1, 2, 3):
            assert delta_order(LSub(SchreierTree(alpha), j)) == add(omega_pow(alpha), ONE)
    assert delta_order(LSub(SchreierTree(2), 1)) == parse("w^(2)+1")


@pytest.mark.parametrize("alpha", [1, 2, 3, OMEGA])
def test_delta_family_and_schreier_tree_agree(alpha):
    via_family = delta_order(FromFamily(Schreier(alpha)))
    assert via_family == add(cb_rank(Schreier(alpha), ()), ONE)
    assert via_family == delta_order(SchreierTree(alpha))


def test_delta_box_chain_claim():
    # [S_a (+) ... (+) S_a] n times has top rank w^a * n
    for k in range(1, 4):
        t = box_chain([SchreierTree(1)] * k)
        assert delta_order(LSub(t, 2)) == add(Ordinal(((ONE, k),)), ONE)
    mixed = box_chain([SchreierTree(1), SchreierTree(2)])
    assert delta_order(mixed) == parse("w^(2)+w+1")


def test_delta_degenerate_and_unsupported():
    assert delta_order(ExplicitTree({n("+")})) == ONE
    assert delta_order(SPINE) == ONE
    assert delta_order(FromFamily(Explicit({(), (1,)}))) == ONE
    with pytest.raises(UnsupportedTree):
        delta_order(TreeSum(lambda i: SPINE, "s"))
    with pytest.raises(UnsupportedTree):
        delta_order(BoxPlus(SchreierTree(1), ExplicitTree({n("+")})))


# --- adequacy triangle (tree leg) -------------------------------------------------------------

@pytest.mark.parametrize("alpha", [1, 2])
def test_adequate_family_gives_weakly_independent_tree(alpha):
    fam_ = restrict(Schreier(alpha), 10)
    assert is_adequate(fam_)
    assert is_weakly_independent(FromFamily(fam_), 10)


def test_non_adequate_family_breaks_independence():
    bad = Explicit({(), (1,), (1, 3)})
    assert not is_adequate(bad)
    assert not is_weakly_independent(FromFamily(bad), 3)


# --- text --------------------------------------------------------------------------------------

def test_node_text():
    assert parse_node("--+") == (M, M, P)
    assert render_node((P, M)) == "+-"
    with pytest.raises(TreeError):
        parse_node("+x")


def test_parse_tree():
    assert parse_tree("L(schreier(1),2)") == LSub(SchreierTree(1), 2)
    assert parse_tree("schreier(w)") == SchreierTree(OMEGA)
    assert parse_tree("family(schreier(2))") == FromFamily(Schreier(2))
    assert parse_tree("box(schreier(1),schreier(1))") == box_chain([SchreierTree(1)] * 2)
    assert parse_tree("spine") == SPINE
    assert parse_tree("explicit(+,+-)") == ExplicitTree({n("+"), n("+-")})
    for bad in ("oak(1)", "L(schreier(1)", "schreier(1)x"):
        with pytest.raises(TreeError):
            parse_tree(bad)


def test_load_explicit_tree():
    t = load_explicit_tree("\n+\n+-\n")
    assert t.nodes == {(), (P,), (P, M)}
    with pytest.raises(TreeError):
        load_explicit_tree("+-\n")
