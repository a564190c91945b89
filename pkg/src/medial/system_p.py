"""The concrete system P: conjunction, disjunction and the two self-dual
projections over constants T/F, with boolean semantics, a rule soundness
auditor, truth-table line proofs and the tautology proof synthesiser."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .derivations import (
    Builder,
    Derivation,
    identity,
    reverse_equational,
)
from .generators import derive_contraction
from .systems import (
    Axiom,
    Metavar,
    RuleDecl,
    Scheme,
    SystemError,
    SystemSpec,
    RelationSymbol,
    validate_spec,
)
from .terms import (
    Compound,
    Constant,
    Formula,
    Variable,
    is_atom,
    join,
    negate,
    spine,
    subformula_at_sides,
    variables,
)

T = Constant("T")
F = Constant("F")

AND, OR, P0, P1 = "&", "|", "p0", "p1"


class UnboundVariable(SystemError):
    pass


class VarNotInShape(SystemError):
    pass


class VariableMismatch(SystemError):
    pass


class NotATautology(SystemError):
    pass


# ---------------------------------------------------------------------------
# Spec construction


def _axioms() -> tuple:
    A = Metavar("A")
    B = Metavar("B")
    C = Metavar("C")
    U = Metavar("U", sort="constant")
    nU = Metavar("U", negated=True, sort="constant")
    X = Metavar("X", sort="literal")
    nX = Metavar("X", negated=True, sort="literal")
    out = []
    for rel, tag in ((AND, "and"), (OR, "or"), (P0, "p0"), (P1, "p1")):
        out.append(
            Axiom(
                f"assoc_{tag}", 1,
                Compound(rel, Compound(rel, A, B), C),
                Compound(rel, A, Compound(rel, B, C)),
            )
        )
    for rel, tag in ((AND, "and"), (OR, "or")):
        out.append(Axiom(f"comm_{tag}", 2, Compound(rel, A, B), Compound(rel, B, A)))
    out.append(Axiom("or_unit", 3, Compound(OR, A, F), A))
    out.append(Axiom("p0_select", 4, Compound(P0, A, B), A))
    out.append(Axiom("p1_select", 5, Compound(P1, A, B), B))
    out.append(Axiom("and_false", 6, Compound(AND, U, F), F))
    out.append(Axiom("const_em", 6, Compound(OR, U, nU), T))
    out.append(Axiom("var_em", 8, Compound(OR, X, nX), T))
    out.append(Axiom("const_idem", 6, Compound(OR, U, U), U))
    out.append(Axiom("var_idem", 7, Compound(OR, X, X), X))
    return tuple(out)


_P_RULES = (
    RuleDecl("ai0d", Scheme.SPLIT_DOWN, P0, OR),
    RuleDecl("ai1d", Scheme.SPLIT_DOWN, P1, OR),
    RuleDecl("sd", Scheme.SPLIT_DOWN, AND, OR),
    RuleDecl("md", Scheme.CONTRACT_DOWN, AND, OR),
    RuleDecl("c0d", Scheme.CONTRACT_DOWN, P0, OR),
    RuleDecl("c1d", Scheme.CONTRACT_DOWN, P1, OR),
    RuleDecl("ai0u", Scheme.SPLIT_UP, P0, AND),
    RuleDecl("ai1u", Scheme.SPLIT_UP, P1, AND),
    RuleDecl("su", Scheme.SPLIT_UP, OR, AND),
    RuleDecl("mu", Scheme.CONTRACT_UP, OR, AND),
    RuleDecl("c0u", Scheme.CONTRACT_UP, P0, AND),
    RuleDecl("c1u", Scheme.CONTRACT_UP, P1, AND),
)

_P_SPEC: Optional[SystemSpec] = None


def make_p_spec() -> SystemSpec:
    """The validated system P (cached: the spec is immutable)."""
    global _P_SPEC
    if _P_SPEC is not None:
        return _P_SPEC
    spec = SystemSpec(
        name="P",
        constants=("T", "F"),
        constant_negation={"T": "F", "F": "T"},
        relations=(
            RelationSymbol(AND, OR, associative=True, commutative=True, unitary="T"),
            RelationSymbol(OR, AND, associative=True, commutative=True, unitary="F"),
            RelationSymbol(P0, P0, associative=True, right_weakening=True),
            RelationSymbol(P1, P1, associative=True, left_weakening=True),
        ),
        order=((AND, P0), (AND, P1), (P0, OR), (P1, OR)),
        axioms=_axioms(),
        rules=_P_RULES,
        scheme_flags={s.value: True for s in Scheme if s is not Scheme.AC},
    )
    issues = validate_spec(spec)
    if issues:
        raise SystemError(f"system P failed validation: {issues}")
    _P_SPEC = spec
    return spec


# ---------------------------------------------------------------------------
# Boolean semantics

BOOL_OPS: dict[str, Callable[[bool, bool], bool]] = {
    "&": lambda a, b: a and b,
    "|": lambda a, b: a or b,
    "p0": lambda a, b: a,
    "p1": lambda a, b: b,
    "np0": lambda a, b: not a,
    "np1": lambda a, b: not b,
    "->": lambda a, b: (not a) or b,
    "<-": lambda a, b: a or (not b),
    "!>": lambda a, b: a and not b,
    "!<": lambda a, b: (not a) and b,
}


def evaluate(f: Formula, valuation: Mapping[str, bool]) -> bool:
    if isinstance(f, Constant):
        if f.name == "T":
            return True
        if f.name == "F":
            return False
        raise SystemError(f"constant {f.name} has no boolean value")
    if isinstance(f, Variable):
        try:
            value = valuation[f.name]
        except KeyError:
            raise UnboundVariable(f.name) from None
        return (not value) if f.negated else value
    op = BOOL_OPS.get(f.rel)
    if op is None:
        raise SystemError(f"relation {f.rel} has no boolean table")
    return op(evaluate(f.left, valuation), evaluate(f.right, valuation))


def all_valuations(names: Sequence[str]) -> Iterable[dict]:
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def is_tautology(f: Formula) -> bool:
    names = sorted(variables(f))
    return all(evaluate(f, v) for v in all_valuations(names))


def audit_soundness(spec: Optional[SystemSpec] = None) -> list[tuple[str, bool]]:
    """For every declared rule, check that truth of the premise forces truth
    of the conclusion over all assignments to the metavariables."""
    from .systems import instantiate_rule

    spec = spec or make_p_spec()
    fresh = dict(A=Variable("a"), B=Variable("b"), C=Variable("c"), D=Variable("d"))
    report = []
    for decl in spec.rules:
        rule = instantiate_rule(spec, decl.scheme, fresh, decl.alpha, decl.beta,
                                rule_id=decl.rule_id)
        ok = all(
            (not evaluate(rule.premise, v)) or evaluate(rule.conclusion, v)
            for v in all_valuations(("a", "b", "c", "d"))
        )
        report.append((decl.rule_id, ok))
    return report


# ---------------------------------------------------------------------------
# Truth-table lines and the literal-signing map


@dataclass(frozen=True)
class LineLiteralizer:
    line: int
    variables: tuple

    def __post_init__(self):
        if not 0 <= self.line < 2 ** len(self.variables):
            raise SystemError(f"line {self.line} out of range")

    def valuation(self) -> dict:
        n = len(self.variables)
        return {
            name: bool((self.line >> (n - 1 - i)) & 1)
            for i, name in enumerate(self.variables)
        }


def tau(lit: LineLiteralizer, item) -> Formula:
    """Sign an item by its truth-table entry at the line: unchanged when the
    entry is T, negated when F."""
    if isinstance(item, str):
        item = Variable(item)
    val = lit.valuation()
    spec = make_p_spec()
    return item if evaluate(item, val) else negate(spec, item)


def opposite_literal(name: str, valuation: Mapping[str, bool]) -> Variable:
    """The literal over name that is false at the valuation."""
    return Variable(name, negated=bool(valuation[name]))


def projection_chain(target: Formula, shape: Formula) -> Derivation:
    """Equational derivation from a projection nest onto the literal it
    selects."""
    spec = make_p_spec()
    if isinstance(target, str):
        target = Variable(target)
    b = Builder(spec, shape)
    cur = shape
    while isinstance(cur, Compound):
        if cur.rel == P0 and target.name in variables(cur.left):
            b.apply_eq((), "p0_select", dict(A=cur.left, B=cur.right))
            cur = cur.left
        elif cur.rel == P1 and target.name in variables(cur.right):
            b.apply_eq((), "p1_select", dict(A=cur.left, B=cur.right))
            cur = cur.right
        else:
            raise VarNotInShape(f"{target} not reachable in {shape}")
    if cur != target:
        raise VarNotInShape(f"chain ends at {cur}, not {target}")
    return b.derivation(target)


# ---------------------------------------------------------------------------
# Line proofs (compactness) and the tautology synthesiser (completeness)
#
# Clause states are grown from T-seeds: the pair axioms produce a literal
# together with its partner, duplication and partner-merging turn the seed
# into any needed false literal while keeping a T element alive, and the
# final seed hosts the one true part of the clause.


def _insert_atom_at_t(b: Builder, tpath: tuple, atom: Formula,
                      valuation: Mapping[str, bool]) -> None:
    """Rewrite the T element at tpath into (atom | T)."""
    if atom == T:
        b.apply_eq(tpath, "const_idem", dict(U=T), direction="bwd")
        return
    if atom == F:
        b.apply_eq(tpath, "or_unit", dict(A=T), direction="bwd")
        b.acr(tpath, Compound(OR, F, T))
        return
    live = atom if evaluate(atom, valuation) else negate(make_p_spec(), atom)
    dead = negate(make_p_spec(), live)
    b.apply_eq(tpath, "var_em", dict(X=live), direction="bwd")
    # current subtree: (live | dead); duplicate the wanted copy, merge the pair
    side = "L" if atom == live else "R"
    b.apply_eq(tpath + (side,), "var_idem", dict(X=atom), direction="bwd")
    b.acr(tpath, Compound(OR, atom, Compound(OR, live, dead)))
    b.apply_eq(tpath + ("R",), "var_em", dict(X=live))


def _rest_elements(spec: SystemSpec, clause: Formula) -> list:
    """Elements of a seeded clause (T | rest) with exactly one seed removed."""
    elems = spine(spec, clause, OR)
    out = list(elems)
    out.remove(T)
    return out


def _chain_insert(spec: SystemSpec, element: Formula, P: Derivation,
                  valuation: Mapping[str, bool]) -> Derivation:
    """Given P from T to a clause (T | rest) (or bare T), return a proof of
    (T | element | rest).  The element may be semantically dead; the clause
    keeps a live T seed throughout."""
    old_rest = _rest_elements(spec, P.conclusion)

    def arranged(new: Formula) -> Formula:
        return Compound(OR, T, join(OR, [new] + old_rest))

    b = Builder(spec, P.premise)
    b.splice((), P)
    tpath = () if b.current == T else ("L",)
    if is_atom(element):
        _insert_atom_at_t(b, tpath, element, valuation)
        b.acr((), arranged(element))
        return b.derivation()
    if element.rel in (P0, P1):
        kept, junk = (
            (element.left, element.right)
            if element.rel == P0
            else (element.right, element.left)
        )
        inner = _chain_insert(spec, kept, P, valuation)
        b2 = Builder(spec, inner.premise)
        b2.splice((), inner)
        kpath = ("R",) if not old_rest else ("R", "L")
        if element.rel == P0:
            b2.apply_eq(kpath, "p0_select", dict(A=kept, B=junk), direction="bwd")
        else:
            b2.apply_eq(kpath, "p1_select", dict(A=junk, B=kept), direction="bwd")
        b2.acr((), arranged(element))
        return b2.derivation()
    if element.rel == OR:
        out = P
        for part in reversed(spine(spec, element, OR)):
            out = _chain_insert(spec, part, out, valuation)
        return out
    # conjunction: two supported sub-clauses, one split, one contraction
    d0 = _chain_insert(spec, element.left, P, valuation)
    d1 = _chain_insert(spec, element.right, P, valuation)
    base = P.conclusion  # (T | rest) or T
    b3 = Builder(spec, T)
    b3.apply_eq((), "const_idem", dict(U=F), negated=True, direction="bwd")
    b3.splice(("L",), d0)
    b3.acr(("L",), Compound(OR, element.left, base))
    b3.splice(("R",), d1)
    b3.acr(("R",), Compound(OR, element.right, base))
    b3.apply_scheme(
        (), Scheme.SPLIT_DOWN,
        dict(A=element.left, B=base, C=element.right, D=base), AND, OR,
    )
    b3.splice(("R",), derive_contraction(spec, OR, base))
    b3.acr((), arranged(element))
    return b3.derivation()


def _pos(spec: SystemSpec, w: Formula, valuation: Mapping[str, bool]) -> Derivation:
    """Proof of (w | J) from T, where w is true at the valuation and J joins
    one false literal per variable of w (sorted); bare w when w is closed."""
    names = sorted(variables(w))
    target = (
        Compound(OR, w, join(OR, [opposite_literal(n, valuation) for n in names]))
        if names
        else w
    )
    if is_atom(w):
        if isinstance(w, Constant):
            if w != T:
                raise SystemError("false constant cannot head a line proof")
            return identity(T)
        b = Builder(spec, T)
        b.apply_eq((), "var_em", dict(X=w), direction="bwd")
        return b.derivation(target)
    if w.rel == AND:
        d0 = _pos(spec, w.left, valuation)
        d1 = _pos(spec, w.right, valuation)
        b = Builder(spec, T)
        b.apply_eq((), "const_idem", dict(U=F), negated=True, direction="bwd")
        b.splice(("L",), d0)
        b.splice(("R",), d1)
        j0 = _ensure_join(spec, b, ("L",), w.left)
        j1 = _ensure_join(spec, b, ("R",), w.right)
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN, dict(A=w.left, B=j0, C=w.right, D=j1), AND, OR
        )
        _finish_clause(spec, b, w)
        return b.derivation(target)
    if w.rel in (P0, P1):
        kept = w.left if w.rel == P0 else w.right
        junk = w.right if w.rel == P0 else w.left
        pads = sorted(variables(w) - variables(kept))
        P = identity(T)
        for name in reversed(pads):
            P = _chain_insert(spec, opposite_literal(name, valuation), P, valuation)
        b = Builder(spec, T)
        b.splice((), P)
        tpath = () if b.current == T else ("L",)
        sub = _pos(spec, kept, valuation)
        b.splice(tpath, sub)
        kpath = tpath if sub.conclusion == kept else tpath + ("L",)
        if w.rel == P0:
            b.apply_eq(kpath, "p0_select", dict(A=kept, B=junk), direction="bwd")
        else:
            b.apply_eq(kpath, "p1_select", dict(A=junk, B=kept), direction="bwd")
        _finish_clause(spec, b, w)
        return b.derivation(target)
    # disjunction: seed dead material first, host the live disjunct last
    elems = spine(spec, w, OR)
    live = next(i for i, e in enumerate(elems) if evaluate(e, valuation))
    pads = sorted(variables(w) - variables(elems[live]))
    P = identity(T)
    for name in reversed(pads):
        P = _chain_insert(spec, opposite_literal(name, valuation), P, valuation)
    for i, e in enumerate(elems):
        if i != live:
            P = _chain_insert(spec, e, P, valuation)
    b = Builder(spec, T)
    b.splice((), P)
    tpath = () if b.current == T else ("L",)
    b.splice(tpath, _pos(spec, elems[live], valuation))
    _finish_clause(spec, b, w)
    return b.derivation(target)


def _ensure_join(spec: SystemSpec, b: Builder, sides: tuple, w_part: Formula) -> Formula:
    """Make the clause at sides literally (w_part | J); returns J (padding
    with F when the sub-proof was bare)."""
    sub = subformula_at_sides(b.current, sides)
    if sub == w_part:
        b.apply_eq(sides, "or_unit", dict(A=w_part), direction="bwd")
        return F
    return subformula_at_sides(b.current, sides + ("R",))


def _finish_clause(spec: SystemSpec, b: Builder, w: Formula) -> None:
    """Normalise the clause to (w | J): the elements of w itself are kept
    apart as one block while surplus junk (F padding, duplicate false
    literals) is merged away."""
    w_count: dict = {}
    for e in spine(spec, w, OR):
        w_count[e] = w_count.get(e, 0) + 1

    def junk_of(cur: Formula) -> list:
        seen: dict = {}
        out = []
        for e in spine(spec, cur, OR):
            if seen.get(e, 0) < w_count.get(e, 0):
                seen[e] = seen.get(e, 0) + 1
            else:
                out.append(e)
        return out

    while True:
        junk = junk_of(b.current)
        if F in junk:
            rest = list(junk)
            rest.remove(F)
            keep = join(OR, [w] + rest) if rest else w
            b.acr((), Compound(OR, keep, F))
            b.apply_eq((), "or_unit", dict(A=keep))
            continue
        dup = next((e for e in junk if junk.count(e) > 1), None)
        if dup is None:
            break
        rest = list(junk)
        rest.remove(dup)
        rest.remove(dup)
        pair = Compound(OR, dup, dup)
        b.acr((), Compound(OR, pair, join(OR, [w] + rest)))
        axiom = "const_idem" if isinstance(dup, Constant) else "var_idem"
        key = "U" if isinstance(dup, Constant) else "X"
        b.apply_eq(("L",), axiom, {key: dup})


def prove_line(A: Formula, lit: LineLiteralizer) -> Derivation:
    """Checkable proof of tau(l,A) | ~tau(l,x1) | ... | ~tau(l,xn) from T."""
    spec = make_p_spec()
    if set(lit.variables) != variables(A):
        raise VariableMismatch(
            f"line variables {lit.variables} differ from vars({A})"
        )
    valuation = lit.valuation()
    w = tau(lit, A)
    d = _pos(spec, w, valuation)
    b = Builder(spec, T)
    b.splice((), d)
    opps = [opposite_literal(n, valuation) for n in lit.variables]
    target = Compound(OR, w, join(OR, opps)) if opps else w
    return b.derivation(target)


def _closed_tautology_proof(spec: SystemSpec, x: Formula) -> Derivation:
    """T -> x for variable-free x that evaluates to T: reverse the
    equational evaluation of x."""

    def reduce(f: Formula) -> Derivation:
        b = Builder(spec, f)
        if isinstance(f, Compound):
            b.splice(("L",), reduce(f.left))
            b.splice(("R",), reduce(f.right))
            value = T if evaluate(f, {}) else F
            b.rewrite((), value)
        return b.derivation()

    return reverse_equational(spec, reduce(x))


def _fold_var(spec: SystemSpec, y: Formula, name: str,
              p_true: Derivation, p_false: Derivation) -> Derivation:
    """Merge proofs of (y | name) and (y | ~name) into a proof of y."""
    v = Variable(name)
    nv = Variable(name, negated=True)
    b = Builder(spec, T)
    b.apply_eq((), "const_idem", dict(U=F), negated=True, direction="bwd")
    b.splice(("L",), p_false)
    b.acr(("L",), Compound(OR, v, y))
    b.splice(("R",), p_true)
    b.acr(("R",), Compound(OR, nv, y))
    b.apply_scheme((), Scheme.SPLIT_DOWN, dict(A=v, B=y, C=nv, D=y), AND, OR)
    b.apply_eq(("L",), "var_em", dict(X=nv), negated=True)
    b.acr((), Compound(OR, Compound(OR, y, y), F))
    b.apply_eq((), "or_unit", dict(A=Compound(OR, y, y)))
    b.splice((), derive_contraction(spec, OR, y))
    return b.derivation(y)


def prove_tautology(A: Formula, hypotheses: Sequence[Formula] = ()) -> Derivation:
    """Proof from T of A | ~B1 | ... | ~Bn, synthesised line by line and
    folded one variable at a time."""
    spec = make_p_spec()
    x = A
    if hypotheses:
        x = Compound(OR, A, join(OR, [negate(spec, h) for h in hypotheses]))
    if not is_tautology(x):
        raise NotATautology(f"{x} is falsifiable")
    names = tuple(sorted(variables(x)))
    if not names:
        return _closed_tautology_proof(spec, x)
    proofs = {}
    n = len(names)
    for line in range(2 ** n):
        lit = LineLiteralizer(line, names)
        proofs[line] = prove_line(x, lit)
    for k in range(n, 0, -1):
        name = names[k - 1]
        prefix_vars = names[: k - 1]
        merged = {}
        for pref in range(2 ** (k - 1)):
            y_pref = (
                Compound(OR, x, join(OR, [
                    opposite_literal(m, LineLiteralizer(pref, prefix_vars).valuation())
                    for m in prefix_vars
                ]))
                if prefix_vars
                else x
            )
            merged[pref] = _fold_var(
                spec, y_pref, name, proofs[pref * 2 + 1], proofs[pref * 2]
            )
        proofs = merged
    return proofs[0]
