import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schreierlab.ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Kind,
    Ordinal,
    OrdinalError,
    add,
    classify,
    compare,
    from_json,
    fundamental_seq,
    half,
    nat_mul,
    omega_pow,
    p_alpha,
    parse,
    predecessor,
    render,
    to_json,
)
from strategies import ordinals

W = OMEGA


def o(text):
    return parse(text)


# --- independent oracles ---------------------------------------------------

def rewrite_add(a, b):
    """Concatenate the term lists, then rewrite adjacent pairs until canonical."""
    terms = list(a.terms) + list(b.terms)
    changed = True
    while changed:
        changed = False
        for i in range(len(terms) - 1):
            (e1, c1), (e2, c2) = terms[i], terms[i + 1]
            c = compare(e1, e2)
            if c < 0:
                del terms[i]
                changed = True
                break
            if c == 0:
                terms[i : i + 2] = [(e1, c1 + c2)]
                changed = True
                break
    return Ordinal(tuple(terms))


def tails_of(a):
    """Every (rho, beta) with rho + beta = a, beta a nonzero tail, rho minimal."""
    out = [(a, ZERO)]
    for i, (exp, coef) in enumerate(a.terms):
        head = a.terms[:i]
        for j in range(1, coef + 1):
            rest = ((exp, coef - j),) if coef > j else ()
            rho = Ordinal(head + rest)
            beta = Ordinal(((exp, j),) + a.terms[i + 1 :])
            out.append((rho, beta))
    return out


def p_alpha_oracle(a):
    best = None
    for rho, beta in tails_of(a):
        assert add(rho, beta) == a
        v = add(beta, rho)
        if best is None or v < best:
            best = v
    return best


# --- compare / add ---------------------------------------------------------

def test_compare_examples():
    assert compare(W, Ordinal.of(5)) == 1
    assert compare(o("w^(2)*2"), o("w^(2)*2")) == 0
    assert compare(o("w*3+1"), o("w*3+2")) == -1


def test_add_examples():
    assert add(Ordinal.of(3), W) == W
    assert render(add(W, Ordinal.of(3))) == "w+3"
    assert add(o("w^(2)+w*2"), o("w*5")) == o("w^(2)+w*7")


@settings(max_examples=400)
@given(ordinals(), ordinals(), ordinals())
def test_add_laws(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))
    assert add(a, ZERO) == a == add(ZERO, a)
    assert add(a, b) == rewrite_add(a, b)
    assert compare(a, b) == -compare(b, a)
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0


@settings(max_examples=300)
@given(ordinals(), ordinals())
def test_add_monotone_right(a, b):
    # b > 0 implies a + b > a
    if b != ZERO:
        assert add(a, b) > a


def test_add_random_triples_bulk():
    import random

    rng = random.Random(7)

    def rand(depth):
        if depth == 0:
            return Ordinal.of(rng.randint(0, 5))
        pairs = [(rand(depth - 1), rng.randint(1, 3)) for _ in range(rng.randint(0, 3))]
        acc = ZERO
        for exp, coef in pairs:
            acc = add(acc, nat_mul(omega_pow(exp), coef))
        return acc

    for _ in range(10_000):
        a, b, c = rand(3), rand(3), rand(3)
        assert add(add(a, b), c) == add(a, add(b, c))
        assert add(a, ZERO) == a


# --- constructors, classification ------------------------------------------

def test_omega_pow():
    assert omega_pow(0) == ONE
    assert omega_pow(1) == W
    assert render(omega_pow(W)) == "w^(w)"


def test_classify():
    assert classify(ZERO) is Kind.ZERO
    a = o("w*2+3")
    assert classify(a) is Kind.SUCCESSOR
    assert predecessor(a) == o("w*2+2")
    assert classify(o("w^(2)")) is Kind.LIMIT
    with pytest.raises(OrdinalError):
        predecessor(W)


def test_nat_mul():
    assert nat_mul(o("w+1"), 3) == o("w*3+1")
    assert nat_mul(W, 0) == ZERO
    a = o("w^(2)+w*2+5")
    assert nat_mul(a, 3) == add(add(a, a), a)


def test_invalid_terms_rejected():
    with pytest.raises(OrdinalError):
        Ordinal(((ONE, 1), (W, 1)))
    with pytest.raises(OrdinalError):
        Ordinal(((ONE, 0),))


# --- fundamental sequences -------------------------------------------------

def test_fundamental_seq_examples():
    assert fundamental_seq(W, 3) == Ordinal.of(3)
    assert fundamental_seq(o("w^(2)"), 2) == o("w*2")
    assert fundamental_seq(o("w^(w)"), 3) == o("w^(3)")
    assert fundamental_seq(o("w^(2)*3"), 2) == o("w^(2)*2+w*2")
    assert fundamental_seq(o("w^(w^(w))"), 2) == o("w^(w^(2))")
    with pytest.raises(OrdinalError):
        fundamental_seq(Ordinal.of(4), 1)


@pytest.mark.parametrize("text", ["w", "w^(2)", "w^(w)", "w^(2)*3+w", "w^(w+1)", "w^(w^(w))"])
def test_fundamental_seq_increasing_below(text):
    a = o(text)
    seq = [fundamental_seq(a, i) for i in range(1, 101)]
    assert all(x < y for x, y in zip(seq, seq[1:]))
    assert all(x < a for x in seq)


@settings(max_examples=200)
@given(ordinals(depth=2), st.data())
def test_fundamental_seq_cofinal(a, data):
    if classify(a) is not Kind.LIMIT:
        return
    b = data.draw(ordinals(depth=2))
    if not b < a:
        return
    assert any(b < fundamental_seq(a, i) for i in range(1, 1001))


# --- p_alpha / half ----------------------------------------------------------

def test_p_alpha_examples():
    assert p_alpha(o("w^(2)*3+w*2+5")) == o("w^(2)*3")
    assert p_alpha(Ordinal.of(7)) == Ordinal.of(7)
    assert p_alpha(o("w^(w)+w")) == o("w^(w)")
    with pytest.raises(OrdinalError):
        p_alpha(ZERO)


@settings(max_examples=300)
@given(ordinals())
def test_p_alpha_matches_inf_oracle(a):
    if a == ZERO:
        return
    assert p_alpha(a) == p_alpha_oracle(a)


@settings(max_examples=200)
@given(ordinals(), ordinals())
def test_p_alpha_leading_term_stable(a, r):
    if a == ZERO:
        return
    lead = p_alpha(a)
    exp = lead.terms[0][0]
    if r < omega_pow(exp):
        assert p_alpha(add(lead, r)) == lead


def test_half_examples():
    assert half(o("w^(2)*3+w*2+5")) == o("w^(2)*2")
    assert half(W) == W
    assert half(Ordinal.of(6)) == Ordinal.of(3)
    with pytest.raises(OrdinalError):
        half(ZERO)


@settings(max_examples=200)
@given(ordinals(depth=2), st.integers(1, 20))
def test_half_doubling(exp, k):
    a = nat_mul(omega_pow(exp), k)
    h = half(a)
    assert add(h, h) >= a
    assert h <= a


# --- text and JSON -----------------------------------------------------------

@pytest.mark.parametrize(
    "text,canonical",
    [
        ("0", "0"),
        ("w^(1)", "w"),
        ("w^(2)*3+w*2+5", "w^(2)*3+w*2+5"),
        ("1+w", "w"),
        ("w*1", "w"),
        ("w^(w)", "w^(w)"),
        (" w + 3 ", "w+3"),
    ],
)
def test_parse_render(text, canonical):
    assert render(parse(text)) == canonical


@pytest.mark.parametrize("bad", ["", "w^", "w^(2", "x", "w*", "3+", "w*w"])
def test_parse_errors(bad):
    with pytest.raises(OrdinalError):
        parse(bad)


@settings(max_examples=300)
@given(ordinals())
def test_round_trips(a):
    assert parse(render(a)) == a
    assert from_json(to_json(a)) == a
    assert hash(parse(render(a))) == hash(a)


def test_json_shape():
    assert to_json(ZERO) == []
    assert to_json(W) == [[[[[], 1]], 1]]
