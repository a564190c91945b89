import itertools
import random

import pytest

from medial.derivations import check
from medial.system_p import (
    LineLiteralizer,
    NotATautology,
    UnboundVariable,
    VarNotInShape,
    VariableMismatch,
    audit_soundness,
    evaluate,
    is_tautology,
    make_p_spec,
    opposite_literal,
    projection_chain,
    prove_line,
    prove_tautology,
    tau,
)
from medial.systems import instantiate, validate_spec
from medial.terms import Compound, Constant, Variable, parse_formula, variables

from helpers import random_formula

spec = make_p_spec()
T, F = Constant("T"), Constant("F")

# the four binary truth tables, rows (F,F) (F,T) (T,F) (T,T)
P_TABLES = {
    "&": (False, False, False, True),
    "|": (False, True, True, True),
    "p0": (False, False, True, True),
    "p1": (False, True, False, True),
}


def test_spec_validates():
    assert validate_spec(spec) == []


def test_eval_examples():
    assert evaluate(parse_formula("(F p0 T)"), {}) is False
    for v in ({"x": True}, {"x": False}):
        assert evaluate(parse_formula("(x | ~x)"), v) is True
    with pytest.raises(UnboundVariable):
        evaluate(Variable("q"), {})


def test_eval_matches_tables_on_constants():
    for rel, table in P_TABLES.items():
        for i, (a, b) in enumerate(itertools.product("FT", repeat=2)):
            f = Compound(rel, Constant(a), Constant(b))
            assert evaluate(f, {}) == table[i]


def test_is_tautology():
    assert is_tautology(parse_formula("(x | ~x)"))
    assert not is_tautology(Variable("x"))
    assert is_tautology(parse_formula("((x & y) | ~x | ~y)"))


def test_audit_soundness_all_rules():
    report = audit_soundness()
    assert len(report) == 12
    assert all(ok for _, ok in report)


def test_audit_catches_corrupt_rule():
    # the converse of a strict implication must fail the 16-row audit
    from medial.systems import instantiate_rule, Scheme

    fresh = dict(A=Variable("a"), B=Variable("b"), C=Variable("c"), D=Variable("d"))
    rule = instantiate_rule(spec, Scheme.SPLIT_DOWN, fresh, "&", "|")
    from medial.system_p import all_valuations

    backwards = all(
        (not evaluate(rule.conclusion, v)) or evaluate(rule.premise, v)
        for v in all_valuations(("a", "b", "c", "d"))
    )
    assert not backwards


def test_congruence_axioms_respect_semantics():
    rng = random.Random(12)
    for ax in spec.axioms:
        for _ in range(20):
            bindings = {}
            for t in {m for m in ax.metavars()}:
                sort = next(
                    s.sort
                    for s in _pattern_metavars(ax.lhs, ax.rhs)
                    if s.name == t
                )
                if sort == "constant":
                    bindings[t] = Constant(rng.choice("TF"))
                elif sort == "literal":
                    bindings[t] = Variable(rng.choice("xyz"), rng.random() < 0.5)
                else:
                    bindings[t] = random_formula(rng, 2)
            lhs = instantiate(spec, ax.lhs, bindings)
            rhs = instantiate(spec, ax.rhs, bindings)
            names = sorted(variables(lhs) | variables(rhs))
            from medial.system_p import all_valuations

            for v in all_valuations(names):
                assert evaluate(lhs, v) == evaluate(rhs, v)


def _pattern_metavars(*patterns):
    from medial.terms import Metavar, subterms

    for p in patterns:
        for t in subterms(p):
            if isinstance(t, Metavar):
                yield t


def test_line_literalizer_row_order():
    lit = LineLiteralizer(0, ("x", "y"))
    assert lit.valuation() == {"x": False, "y": False}
    lit = LineLiteralizer(1, ("x", "y"))
    assert lit.valuation() == {"x": False, "y": True}
    lit = LineLiteralizer(3, ("x", "y"))
    assert lit.valuation() == {"x": True, "y": True}


def test_tau():
    lit = LineLiteralizer(2, ("x", "y"))  # x=T, y=F
    assert tau(lit, "x") == Variable("x")
    assert tau(lit, "y") == Variable("y", True)
    assert tau(lit, parse_formula("(x & y)")) == parse_formula("(~x | ~y)")
    taut = parse_formula("(x | ~x | y)")
    for line in range(4):
        assert tau(LineLiteralizer(line, ("x", "y")), taut) == taut


def test_projection_chain():
    d = projection_chain(Variable("x"), parse_formula("(x p0 y)"))
    assert d.conclusion == Variable("x")
    assert check(spec, d) is None
    d = projection_chain(Variable("x"), parse_formula("((z p1 x) p0 y)"))
    assert len(d.steps) == 2
    assert check(spec, d) is None
    d = projection_chain(Variable("x"), Variable("x"))
    assert len(d.steps) == 0
    with pytest.raises(VarNotInShape):
        projection_chain(Variable("x"), parse_formula("(y p0 x)"))


def test_prove_line_examples():
    d = prove_line(Variable("x"), LineLiteralizer(1, ("x",)))
    assert d.premise == T
    assert d.conclusion == parse_formula("(x | ~x)")
    assert check(spec, d) is None

    # projections route through the selection axioms
    d = prove_line(parse_formula("(x p0 y)"), LineLiteralizer(3, ("x", "y")))
    assert check(spec, d) is None
    assert d.conclusion == parse_formula("((x p0 y) | ~x | ~y)")

    # a falsified conjunction is signed negatively
    lit = LineLiteralizer(2, ("x", "y"))  # x=T, y=F
    d = prove_line(parse_formula("(x & y)"), lit)
    assert check(spec, d) is None
    assert d.conclusion == parse_formula("((~x | ~y) | ~x | y)")
    assert evaluate(d.conclusion, lit.valuation()) is True


def test_prove_line_signs_cover_all_patterns():
    f = parse_formula("(x & y)")
    seen = set()
    for line in range(4):
        lit = LineLiteralizer(line, ("x", "y"))
        d = prove_line(f, lit)
        assert check(spec, d) is None
        assert evaluate(d.conclusion, lit.valuation()) is True
        opps = tuple(
            opposite_literal(n, lit.valuation()).negated for n in ("x", "y")
        )
        seen.add(opps)
    assert len(seen) == 4


def test_prove_line_variable_mismatch():
    with pytest.raises(VariableMismatch):
        prove_line(Variable("x"), LineLiteralizer(0, ("x", "y")))


def test_prove_tautology_plain():
    d = prove_tautology(parse_formula("(x | ~x)"))
    assert d.premise == T
    assert d.conclusion == parse_formula("(x | ~x)")
    assert check(spec, d) is None


def test_prove_tautology_with_hypotheses():
    d = prove_tautology(Variable("x"), [parse_formula("(x & y)")])
    assert d.conclusion == parse_formula("(x | (~x | ~y))")
    assert check(spec, d) is None


def test_prove_tautology_closed():
    d = prove_tautology(parse_formula("(T | F)"))
    assert check(spec, d) is None
    assert d.conclusion == parse_formula("(T | F)")


def test_prove_tautology_rejects_falsifiable():
    with pytest.raises(NotATautology):
        prove_tautology(Variable("x"))
