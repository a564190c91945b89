import itertools

import pytest

from medial.clones import (
    AND2,
    CLONES,
    GENERATORS,
    MAJ,
    NOT,
    TRUE,
    ArityCap,
    BoolFn,
    binary_slice,
    classify,
    closure,
    formula_function,
    is_monotone,
    membership,
    projection,
)
from medial.terms import parse_formula

ALL16 = [BoolFn(2, t) for t in itertools.product((False, True), repeat=4)]


def test_membership_examples():
    assert membership(AND2, "C2")
    assert not membership(NOT, "C2")
    assert membership(MAJ, "D3")
    assert all(membership(f, "C1") for f in ALL16)


def test_predicates_match_closures_on_binary_slice():
    for clone in ("C2", "C3", "L1", "A1", "D3"):
        predicate = {f for f in ALL16 if membership(f, clone)}
        oracle = binary_slice(closure(GENERATORS[clone], 2))
        assert predicate == oracle, clone


def test_closure_full_clone():
    got = binary_slice(closure((AND2, NOT, TRUE), 2))
    assert len(got) == 16


def test_closure_projections_only():
    got = closure((projection(2, 0),), 2)
    assert binary_slice(got) == {projection(2, 0), projection(2, 1)}


def test_closure_arity_cap():
    with pytest.raises(ArityCap):
        closure((AND2,), 4)


def test_pairwise_incomparability_witnesses():
    # the D3/A1 separation needs ternary functions; every other pair
    # separates already on the binary slice
    pool = ALL16 + [
        BoolFn(3, t) for t in itertools.product((False, True), repeat=8)
    ]
    maximal = ("C2", "C3", "L1", "A1", "D3")
    for one, other in itertools.permutations(maximal, 2):
        assert any(
            membership(f, one) and not membership(f, other) for f in pool
        ), (one, other)


def test_formula_function():
    assert formula_function(parse_formula("(x | ~x)")).table == (True, True)
    assert formula_function(parse_formula("(x p0 y)")) == projection(2, 0)
    # negation-free formulas denote monotone functions
    assert is_monotone(formula_function(parse_formula("((x & y) | (y p1 x))")))
    assert not is_monotone(formula_function(parse_formula("(x | ~y)")))


def test_classify():
    assert classify(projection(2, 0)) == CLONES  # projections live everywhere
    assert "D3" not in classify(AND2)
