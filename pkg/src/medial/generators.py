"""Constructive derivation generators: excluded middle, contraction, and
atomic deduction.  Each builds a checkable derivation by structural
recursion, using only the axioms its hypotheses demand."""

from __future__ import annotations

from .derivations import (
    Builder,
    Derivation,
    DerivationError,
    check,
)
from .systems import Scheme, SystemSpec, classify_relation
from .terms import Compound, Constant, Formula, equal_mod_ac, is_atom, negate


class GeneratorError(DerivationError):
    pass


class NotStrong(GeneratorError):
    pass


class NotWeak(GeneratorError):
    pass


class MissingAxiom(GeneratorError):
    pass


class CheckFailed(GeneratorError):
    pass


def _rewrite(builder: Builder, sides, target: Formula, what: str) -> None:
    try:
        builder.rewrite(sides, target)
    except DerivationError as e:
        raise MissingAxiom(f"{what}: {e}") from None


def derive_excluded_middle(spec: SystemSpec, alpha: str, A: Formula) -> Derivation:
    """Derivation from u_alpha to A ~alpha ~A, for strong unitary alpha."""
    if classify_relation(spec, alpha) != "strong":
        raise NotStrong(alpha)
    unit = spec.unit_of(alpha)
    if unit is None:
        raise MissingAxiom(f"{alpha} has no unit")
    na = spec.dual(alpha)

    def go(f: Formula) -> Derivation:
        target = Compound(na, f, negate(spec, f))
        b = Builder(spec, Constant(unit))
        if is_atom(f):
            _rewrite(b, (), target, f"excluded middle base for {f}")
            return b.derivation(target)
        gamma = f.rel
        if gamma == na:
            # weak-topped formulas: merge two recursions with one split
            b0, b1 = go(f.left), go(f.right)
            _rewrite(b, (), Compound(alpha, Constant(unit), Constant(unit)),
                     f"unit merge at {alpha}")
            b.splice(("L",), b0)
            b.splice(("R",), b1)
            nl, nr = negate(spec, f.left), negate(spec, f.right)
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN,
                dict(A=nl, B=f.left, C=nr, D=f.right), alpha, na,
            )
            return b.derivation(target)
        if not spec.precedes(gamma, na):
            raise MissingAxiom(f"relation {gamma} not below {na}")
        b0, b1 = go(f.left), go(f.right)
        _rewrite(b, (), Compound(gamma, Constant(unit), Constant(unit)),
                 f"unit merge at {gamma}")
        b.splice(("L",), b0)
        b.splice(("R",), b1)
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN,
            dict(A=f.left, B=negate(spec, f.left), C=f.right, D=negate(spec, f.right)),
            gamma, na,
        )
        return b.derivation(target)

    return go(A)


def derive_contraction(spec: SystemSpec, beta: str, A: Formula) -> Derivation:
    """Derivation from A beta A to A, for weak beta."""
    if classify_relation(spec, beta) != "weak":
        raise NotWeak(beta)

    def go(f: Formula) -> Derivation:
        b = Builder(spec, Compound(beta, f, f))
        if is_atom(f):
            _rewrite(b, (), f, f"idempotence base for {f}")
            return b.derivation(f)
        gamma = f.rel
        if gamma == beta:
            b.acr((), Compound(beta, Compound(beta, f.left, f.left),
                               Compound(beta, f.right, f.right)))
            b.splice(("L",), go(f.left))
            b.splice(("R",), go(f.right))
            return b.derivation(f)
        if not spec.precedes(gamma, beta):
            raise MissingAxiom(f"relation {gamma} not below {beta}")
        b.apply_scheme(
            (), Scheme.CONTRACT_DOWN,
            dict(A=f.left, B=f.right, C=f.left, D=f.right), gamma, beta,
        )
        b.splice(("L",), go(f.left))
        b.splice(("R",), go(f.right))
        return b.derivation(f)

    return go(A)


def atomic_deduction(
    spec: SystemSpec, beta: str, head: Formula, B: Formula, P: Derivation
) -> Derivation:
    """Given P from ~u_beta to head beta B with atomic head, build the
    derivation from ~head to B."""
    if not is_atom(head):
        raise GeneratorError(f"head must be atomic, got {head}")
    unit = spec.unit_of(beta)
    if unit is None:
        raise MissingAxiom(f"{beta} has no unit")
    u = Constant(unit)
    nu = Constant(spec.negate_constant(unit))
    nb = spec.dual(beta)
    failure = check(spec, P)
    if failure is not None:
        raise CheckFailed(str(failure))
    if P.premise != nu or not equal_mod_ac(spec, P.conclusion, Compound(beta, head, B)):
        raise CheckFailed("P must run from the co-unit to head beta B")

    nh = negate(spec, head)
    b = Builder(spec, nh)
    _rewrite(b, (), Compound(beta, nh, u), "unit padding")
    _rewrite(b, (), Compound(nb, Compound(beta, nh, u), nu), "co-unit padding")
    b.splice(("R",), P)
    b.acr(("R",), Compound(beta, head, B))
    b.apply_scheme((), Scheme.SPLIT_DOWN, dict(A=nh, B=u, C=head, D=B), nb, beta)
    _rewrite(b, ("L",), u, "annihilation of the head")
    b.acr((), Compound(beta, Compound(beta, B, u), u))
    _rewrite(b, ("L",), B, "unit removal")
    _rewrite(b, (), B, "unit removal")
    return b.derivation(B)
