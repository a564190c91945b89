"""Shared test machinery: random formulas, proof corpus generation and
up-rule injection."""

from __future__ import annotations

import random

from medial.derivations import Builder, Derivation
from medial.generators import derive_excluded_middle
from medial.system_p import make_p_spec
from medial.systems import Scheme
from medial.terms import Compound, Constant, Formula, Variable

T = Constant("T")
F = Constant("F")
P_RELS = ("&", "|", "p0", "p1")


def random_formula(rng: random.Random, depth: int, names=("x", "y", "z"),
                   atom_p: float = 0.35, consts: bool = True) -> Formula:
    if depth == 0 or rng.random() < atom_p:
        if consts and rng.random() < 0.15:
            return Constant(rng.choice("TF"))
        return Variable(rng.choice(names), rng.random() < 0.4)
    rel = rng.choice(P_RELS)
    return Compound(rel, random_formula(rng, depth - 1, names, atom_p, consts),
                    random_formula(rng, depth - 1, names, atom_p, consts))


def enumerate_formulas(max_height: int, leaves) -> list:
    """All formulas over the leaf set with height at most max_height
    (atoms at height 1)."""
    layers = [list(leaves)]
    for _ in range(max_height - 1):
        prev = layers[-1]
        everything = [f for layer in layers for f in layer]
        new = [
            Compound(rel, a, b)
            for rel in P_RELS
            for a in everything
            for b in everything
        ]
        layers.append(new)
    return [f for layer in layers for f in layer]


def all_tree_positions(f: Formula, prefix: tuple = ()):
    yield prefix
    if isinstance(f, Compound):
        yield from all_tree_positions(f.left, prefix + ("L",))
        yield from all_tree_positions(f.right, prefix + ("R",))


def base_down_proof(rng: random.Random) -> Derivation:
    """A pure down-fragment proof from T: an excluded-middle derivation or
    a conjunction of two."""
    spec = make_p_spec()
    if rng.random() < 0.6:
        return derive_excluded_middle(spec, "&", random_formula(rng, 2))
    b = Builder(spec, T)
    b.apply_eq((), "const_idem", dict(U=F), negated=True, direction="bwd")
    b.splice(("L",), derive_excluded_middle(spec, "&", random_formula(rng, 1)))
    b.splice(("R",), derive_excluded_middle(spec, "&", random_formula(rng, 1)))
    return b.derivation()


def inject_up_step(rng: random.Random, b: Builder) -> None:
    """Append one splitting up-rule instance (plus the equational setup it
    needs) at a random position of the running conclusion."""
    from medial.terms import subformula_at_sides

    spec = make_p_spec()
    pos = rng.choice(list(all_tree_positions(b.current)))
    x = subformula_at_sides(b.current, pos)
    kind = rng.choice(["su", "ai0u", "ai1u"])
    junk = random_formula(rng, 1)
    b.rewrite(pos, Compound("&", x, T))
    if kind == "su":
        if not (isinstance(x, Compound) and x.rel == "|"):
            b.apply_eq(pos + ("L",), "or_unit", dict(A=x), direction="bwd")
            x = Compound("|", x, F)
        b.rewrite(pos + ("R",), Compound("&", T, T))
        b.apply_scheme(pos, Scheme.SPLIT_UP,
                       dict(A=x.left, B=T, C=x.right, D=T), "|", "&")
    elif kind == "ai0u":
        b.rewrite(pos + ("L",), Compound("p0", x, junk))
        b.rewrite(pos + ("R",), Compound("p0", T, T))
        b.apply_scheme(pos, Scheme.SPLIT_UP,
                       dict(A=x, B=T, C=junk, D=T), "p0", "&")
    else:
        b.rewrite(pos + ("L",), Compound("p1", junk, x))
        b.rewrite(pos + ("R",), Compound("p1", T, T))
        b.apply_scheme(pos, Scheme.SPLIT_UP,
                       dict(A=junk, B=T, C=x, D=T), "p1", "&")


def injected_corpus(seed: int, size: int) -> list:
    """Seed-fixed pure down-fragment proofs, each injected with one to
    three up-rule instances."""
    rng = random.Random(seed)
    spec = make_p_spec()
    out = []
    for _ in range(size):
        base = base_down_proof(rng)
        b = Builder(spec, base.premise)
        b.splice((), base)
        for _ in range(rng.randint(1, 3)):
            inject_up_step(rng, b)
        out.append(b.derivation())
    return out
