import pytest

from medial.derivations import Builder, check
from medial.generators import derive_excluded_middle
from medial.splitting import (
    FragmentError,
    IrreducibleCase,
    NotDownFragment,
    context_reduce,
    eliminate_all_up,
    eliminate_up_step,
    first_up_index,
    in_down_fragment,
    instantiate_hole,
    make_fragment,
    shallow_split,
)
from medial.system_p import make_p_spec
from medial.systems import RelationSymbol, Scheme, SystemSpec
from medial.terms import Compound, Constant, Variable, parse_formula

from helpers import injected_corpus

spec = make_p_spec()
frag = make_fragment(spec)
T = Constant("T")


def test_fragment_rule_lists():
    assert set(frag.down_rules) == {"ai0d", "ai1d", "sd"}
    assert set(frag.up_rules) == {"ai0u", "ai1u", "su"}
    assert frag.weak == (("|", "F", "T"),)


def test_fragment_requires_weak_relation():
    loner = SystemSpec(
        name="loner",
        constants=("T", "F"),
        constant_negation={"T": "F", "F": "T"},
        relations=(RelationSymbol("r", "r"),),
    )
    with pytest.raises(FragmentError):
        make_fragment(loner)


def test_shallow_split_unitary():
    p = derive_excluded_middle(spec, "&", parse_formula("(x & y)"))
    rec = []
    res = shallow_split(frag, p, ("L",), rec)
    assert res.kind == "unitary"
    assert res.q0 is not None and res.q1 is not None
    assert check(spec, res.q0) is None
    assert check(spec, res.q1) is None
    assert check(spec, res.d) is None
    assert res.q0.conclusion == Compound("|", Variable("x"), res.k0)
    assert res.q1.conclusion == Compound("|", Variable("y"), res.k1)
    assert res.d.premise == Compound("|", res.k0, res.k1)
    assert res.d.conclusion == parse_formula("(~x | ~y)")
    assert all(r.bound_holds for r in rec)


def test_shallow_split_weakening_kinds():
    p = derive_excluded_middle(spec, "&", parse_formula("(x p0 y)"))
    res = shallow_split(frag, p, ("L",))
    assert res.kind == "right_weakening"
    assert res.q0 is not None and res.q1 is None
    p = derive_excluded_middle(spec, "&", parse_formula("(x p1 y)"))
    res = shallow_split(frag, p, ("L",))
    assert res.kind == "left_weakening"
    assert res.q1 is not None and res.q0 is None


def test_shallow_split_rejects_contractive_steps():
    from medial.generators import derive_contraction

    d = derive_contraction(spec, "|", parse_formula("(x & y)"))
    b = Builder(spec, T)
    b.apply_eq((), "var_em", dict(X=Variable("x")), direction="bwd")
    with pytest.raises(NotDownFragment):
        shallow_split(frag, d, ("L",))


def test_shallow_split_length_bound_logged():
    rec = []
    for text in ["((x | y) & (z p0 w))", "((x & y) & (z & w))"]:
        p = derive_excluded_middle(spec, "&", parse_formula(text))
        shallow_split(frag, p, ("L",), rec)
    assert rec and all(r.bound_holds for r in rec)


def test_context_reduce_root_hole():
    p = derive_excluded_middle(spec, "&", parse_formula("(x & y)"))
    cr = context_reduce(frag, p, ())
    assert cr.k == Constant("F")
    assert check(spec, cr.q) is None
    inst = instantiate_hole(spec, cr.ctx, p.conclusion)
    assert check(spec, inst) is None


def test_context_reduce_spine_hole():
    p = derive_excluded_middle(spec, "&", parse_formula("(x & y)"))
    # conclusion ((x & y) | (~x | ~y)); select the conjunction
    cr = context_reduce(frag, p, ("L",))
    assert check(spec, cr.q) is None
    assert cr.q.conclusion == Compound("|", parse_formula("(x & y)"), cr.k)
    inst = instantiate_hole(spec, cr.ctx, parse_formula("(x & y)"))
    assert inst.premise == Compound("|", parse_formula("(x & y)"), cr.k)
    assert check(spec, inst) is None
    assert inst.conclusion == p.conclusion


def test_context_reduce_deep_hole():
    p = derive_excluded_middle(spec, "&", parse_formula("((x & y) & z)"))
    # conclusion (((x & y) & z) | ...); hole at the inner conjunction
    cr = context_reduce(frag, p, ("L", "L"))
    assert check(spec, cr.q) is None
    assert cr.q.conclusion == Compound("|", parse_formula("(x & y)"), cr.k)
    inst = instantiate_hole(spec, cr.ctx, parse_formula("(x & y)"))
    assert check(spec, inst) is None
    assert inst.conclusion == p.conclusion


def test_context_reduce_erased_side_is_loud():
    p = derive_excluded_middle(spec, "&", parse_formula("(x p0 y)"))
    with pytest.raises(IrreducibleCase):
        context_reduce(frag, p, ("L", "R"))


def test_eliminate_noop_and_single():
    p = derive_excluded_middle(spec, "&", parse_formula("(x & y)"))
    assert eliminate_up_step(frag, p) is p or first_up_index(frag, p) is None
    corpus = injected_corpus(seed=42, size=5)
    for q in corpus:
        assert check(spec, q) is None
        r = eliminate_all_up(frag, q)
        assert check(spec, r) is None
        assert r.premise == q.premise and r.conclusion == q.conclusion
        assert first_up_index(frag, r) is None
        assert all(in_down_fragment(s) for s in r.steps)


def test_eliminate_terminates_in_up_step_rounds():
    corpus = injected_corpus(seed=77, size=5)
    for q in corpus:
        ups = sum(1 for s in q.steps if s.rule.scheme is Scheme.SPLIT_UP)
        rounds = 0
        cur = q
        while first_up_index(frag, cur) is not None:
            cur = eliminate_up_step(frag, cur)
            rounds += 1
        assert rounds == ups
        assert check(spec, cur) is None


def test_shallow_split_survives_spine_regrouping():
    # an explicit rearrangement regroups the conjunction spine between the
    # proof and the designated reading
    p = derive_excluded_middle(spec, "&", parse_formula("((x & y) & z)"))
    b = Builder(spec, p.premise)
    b.splice((), p)
    b.acr((), Compound("|", parse_formula("(x & (y & z))"),
                       parse_formula("((~x | ~y) | ~z)")))
    q = b.derivation()
    assert check(spec, q) is None
    rec = []
    res = shallow_split(frag, q, ("L",), rec)
    assert res.kind == "unitary"
    for piece in (res.q0, res.q1, res.d):
        assert check(spec, piece) is None
    assert res.q0.conclusion == Compound("|", Variable("x"), res.k0)
    assert res.q1.conclusion == Compound("|", parse_formula("(y & z)"), res.k1)
    assert all(r.bound_holds for r in rec)
