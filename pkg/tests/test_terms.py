import random

import pytest

from medial.system_p import make_p_spec
from medial.terms import (
    Compound,
    Constant,
    ParseError,
    PathMismatch,
    PathStep,
    Variable,
    ac_canonical,
    context_at,
    equal_mod_ac,
    negate,
    parse_formula,
    plug,
    print_formula,
    subformula_at,
    subformula_at_sides,
)

from helpers import random_formula

spec = make_p_spec()
x, y, z = Variable("x"), Variable("y"), Variable("z")


def test_negate_constants_and_compounds():
    assert negate(spec, Constant("T")) == Constant("F")
    f = parse_formula("(x | y)")
    assert negate(spec, f) == parse_formula("(~x & ~y)")
    assert negate(spec, parse_formula("(x p0 y)")) == parse_formula("(~x p0 ~y)")


def test_negate_involution_random():
    rng = random.Random(0)
    for _ in range(200):
        f = random_formula(rng, 3)
        assert negate(spec, negate(spec, f)) == f


def test_negation_is_ac_congruence_morphism():
    rng = random.Random(1)
    for _ in range(100):
        f = random_formula(rng, 3)
        g = ac_canonical(spec, f)
        assert equal_mod_ac(spec, negate(spec, f), negate(spec, g))


def test_plug_basics():
    assert plug((), x) == x
    ctx = (PathStep("|", "L", y),)
    assert plug(ctx, x) == Compound("|", x, y)
    ctx2 = (PathStep("&", "R", z),)
    assert plug(ctx + ctx2, x) == plug(ctx, plug(ctx2, x))


def test_subformula_at():
    f = Compound("|", x, y)
    assert subformula_at(f, (PathStep("|", "L", y),)) == x
    assert subformula_at(f, ()) == f
    with pytest.raises(PathMismatch):
        subformula_at(f, (PathStep("&", "L", y),))
    with pytest.raises(PathMismatch):
        subformula_at(f, (PathStep("|", "L", z),))


def test_plug_subformula_round_trip_random():
    rng = random.Random(2)
    for _ in range(200):
        f = random_formula(rng, 4)
        sides = []
        cur = f
        while isinstance(cur, Compound) and rng.random() < 0.7:
            side = rng.choice("LR")
            sides.append(side)
            cur = cur.left if side == "L" else cur.right
        ctx = context_at(f, sides)
        sub = subformula_at(f, ctx)
        assert sub == subformula_at_sides(f, sides)
        assert plug(ctx, sub) == f


def test_ac_canonical_examples():
    assert ac_canonical(spec, parse_formula("((x | y) | z)")) == parse_formula(
        "(x | y | z)"
    )
    assert ac_canonical(spec, parse_formula("(y | x)")) == parse_formula("(x | y)")
    # projections flatten but never commute
    assert ac_canonical(spec, parse_formula("(x p0 y)")) == parse_formula("(x p0 y)")
    assert ac_canonical(spec, parse_formula("(y p0 x)")) == parse_formula("(y p0 x)")
    assert ac_canonical(spec, parse_formula("((x p0 y) p0 z)")) == parse_formula(
        "(x p0 y p0 z)"
    )


def test_ac_canonical_idempotent_random():
    rng = random.Random(3)
    for _ in range(200):
        f = random_formula(rng, 4)
        c = ac_canonical(spec, f)
        assert ac_canonical(spec, c) == c


def test_equal_mod_ac():
    assert equal_mod_ac(spec, parse_formula("(x | y)"), parse_formula("(y | x)"))
    assert not equal_mod_ac(spec, parse_formula("(x p0 y)"), parse_formula("(y p0 x)"))
    # associativity only: no idempotence collapse
    assert equal_mod_ac(
        spec, parse_formula("(x | (y | x))"), parse_formula("((x | y) | x)")
    )
    assert not equal_mod_ac(spec, parse_formula("(x | x)"), x)


def test_parse_print_round_trip_random():
    rng = random.Random(4)
    for _ in range(300):
        f = random_formula(rng, 4)
        assert parse_formula(print_formula(f)) == f
        assert parse_formula(print_formula(f, spaces=False)) == f


def test_parse_chains_right_nest():
    assert parse_formula("(x | y | z)") == Compound("|", x, Compound("|", y, z))
    with pytest.raises(ParseError):
        parse_formula("(x | y & z)")
    with pytest.raises(ParseError):
        parse_formula("(x |")
    with pytest.raises(ParseError):
        parse_formula("~T")


def test_parse_atoms():
    assert parse_formula("~x") == Variable("x", True)
    assert parse_formula("T") == Constant("T")
    assert parse_formula("(x !> y)") == Compound("!>", x, y)
    assert parse_formula("(x np0 y)") == Compound("np0", x, y)
