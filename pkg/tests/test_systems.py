import random

import pytest

from medial.system_p import make_p_spec
from medial.systems import (
    RelationSymbol,
    Scheme,
    SideConditionViolated,
    SystemSpec,
    classify_relation,
    enumerate_redexes,
    eq_step_for,
    instantiate_rule,
    match_pattern,
    spec_from_text,
    spec_to_text,
    validate_spec,
)
from medial.terms import Constant, Variable, equal_mod_ac, parse_formula

from helpers import random_formula

spec = make_p_spec()
a, b, c, d = (Variable(n) for n in "abcd")
ABCD = dict(A=a, B=b, C=c, D=d)


def test_validate_p_ok():
    assert validate_spec(spec) == []


def test_validate_catches_reflexive_order():
    bad = SystemSpec(
        name="bad",
        constants=("T", "F"),
        constant_negation={"T": "F", "F": "T"},
        relations=(RelationSymbol("r", "r"),),
        order=(("r", "r"),),
    )
    assert any("irreflexive" in issue for issue in validate_spec(bad))


def test_validate_flags_exclusive():
    bad = SystemSpec(
        name="bad",
        constants=("T", "F"),
        constant_negation={"T": "F", "F": "T"},
        relations=(RelationSymbol("r", "r", unitary="T", right_weakening=True),),
    )
    assert any("exclusive" in issue for issue in validate_spec(bad))


def test_classify_relation():
    assert classify_relation(spec, "&") == "strong"
    assert classify_relation(spec, "|") == "weak"
    assert classify_relation(spec, "p0") == "intermediate"
    assert classify_relation(spec, "p1") == "intermediate"


def test_instantiate_rule_switch():
    rule = instantiate_rule(spec, Scheme.SPLIT_DOWN, ABCD, "&", "|")
    assert rule.premise == parse_formula("((a | b) & (c | d))")
    assert rule.conclusion == parse_formula("((a & c) | (b | d))")
    assert rule.rule_id == "sd"


def test_instantiate_rule_projection_self_dual():
    rule = instantiate_rule(spec, Scheme.SPLIT_DOWN, ABCD, "p0", "|")
    assert rule.premise == parse_formula("((a | b) p0 (c | d))")
    assert rule.conclusion == parse_formula("((a p0 c) | (b p0 d))")


def test_instantiate_rule_side_condition():
    with pytest.raises(SideConditionViolated):
        instantiate_rule(spec, Scheme.SPLIT_DOWN, ABCD, "|", "|")


def test_rule_rebuild_round_trip():
    for decl in spec.rules:
        rule = instantiate_rule(
            spec, decl.scheme, ABCD, decl.alpha, decl.beta, rule_id=decl.rule_id
        )
        rebuilt = instantiate_rule(
            spec, decl.scheme, dict(rule.bindings), decl.alpha, decl.beta
        )
        assert rebuilt.premise == rule.premise
        assert rebuilt.conclusion == rule.conclusion


def test_split_down_up_are_inverse_shapes():
    from medial.systems import _scheme_shapes

    down_prem, down_conc = _scheme_shapes(spec, Scheme.SPLIT_DOWN, "p0", "|", a, b, c, d)
    up_prem, up_conc = _scheme_shapes(spec, Scheme.SPLIT_UP, "p0", "|", a, b, c, d)
    assert down_prem == up_conc
    assert down_conc == up_prem


def test_enumerate_redexes_switch():
    f = parse_formula("((a | b) & (c | d))")
    found = enumerate_redexes(spec, f, schemes=(Scheme.SPLIT_DOWN,))
    assert any(
        ctx == () and rule.rule_id == "sd" and rule.premise == f
        for ctx, rule in found
    )


def test_enumerate_redexes_atom_empty():
    assert enumerate_redexes(spec, Variable("x"), schemes=(Scheme.SPLIT_DOWN,)) == []


def test_enumerate_redexes_expansion_needs_hint():
    t = Constant("T")
    plain = enumerate_redexes(spec, t, schemes=(Scheme.EQ_DOWN,))
    assert not any(r.axiom_id == "var_em" for _, r in plain)
    hinted = enumerate_redexes(
        spec, t, schemes=(Scheme.EQ_DOWN,),
        expansion_targets=(parse_formula("(x | ~x)"),),
    )
    assert any(
        r.axiom_id == "var_em" and r.conclusion == parse_formula("(x | ~x)")
        for _, r in hinted
    )


def test_enumerate_redexes_sound():
    rng = random.Random(5)
    from medial.terms import context_at, subformula_at_sides

    for _ in range(30):
        f = random_formula(rng, 3)
        for ctx, rule in enumerate_redexes(spec, f):
            sides = tuple(p.hole_side for p in ctx)
            sub = subformula_at_sides(f, sides)
            assert equal_mod_ac(spec, sub, rule.premise)


def test_eq_step_for_orientations():
    # forward, backward, and negated instances are all found
    inst = eq_step_for(spec, parse_formula("(x | ~x)"), Constant("T"))
    assert inst.axiom_id == "var_em" and inst.direction == "fwd"
    inst = eq_step_for(spec, Constant("T"), parse_formula("(x | ~x)"))
    assert inst.direction == "bwd"
    inst = eq_step_for(spec, parse_formula("(x & y)"), parse_formula("((x & y) & T)"))
    assert inst.axiom_id == "or_unit" and inst.negated
    assert eq_step_for(spec, parse_formula("(x | y)"), Constant("T")) is None


def test_match_pattern_respects_sorts():
    ax = spec.axioms_by_id["var_idem"]
    assert match_pattern(spec, ax.lhs, parse_formula("(x | x)")) is not None
    assert match_pattern(spec, ax.lhs, parse_formula("((x & y) | (x & y))")) is None


def test_spec_file_round_trip():
    text = spec_to_text(spec)
    again = spec_from_text(text)
    assert validate_spec(again) == []
    assert spec_to_text(again) == text
    rule = instantiate_rule(again, Scheme.SPLIT_DOWN, ABCD, "&", "|")
    assert rule.rule_id == "sd"


def test_classify_stable_under_incomparable_additions():
    base = dict(
        constants=("T", "F"),
        constant_negation={"T": "F", "F": "T"},
        order=(("a", "b"),),
    )
    small = SystemSpec(
        name="small",
        relations=(RelationSymbol("a", "a"), RelationSymbol("b", "b")),
        **base,
    )
    widened = SystemSpec(
        name="widened",
        relations=(
            RelationSymbol("a", "a"),
            RelationSymbol("b", "b"),
            RelationSymbol("c", "c"),
        ),
        **base,
    )
    for rel in ("a", "b"):
        assert classify_relation(small, rel) == classify_relation(widened, rel)
