"""System descriptors: relation alphabets, orders, axioms and rule schemes.

A system declares its relations (with duals and unit/weakening flags), a
strict partial order among them, a set of equational axioms given as
patterns, and the medial-shape rules it enables.  Rule instances are fully
instantiated premise/conclusion pairs; equational instances may use either
orientation of an axiom, or of its negation (the congruence is closed
under the involutive negation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .terms import (
    Compound,
    Constant,
    Formula,
    Metavar,
    TermError,
    Variable,
    context_at,
    equal_mod_ac,
    join,
    negate,
    parse_formula,
    print_formula,
    spine,
    subformula_at_sides,
    subterms,
)


class SystemError(TermError):
    pass


class SideConditionViolated(SystemError):
    pass


class UnknownAxiom(SystemError):
    pass


class UnknownSymbolError(SystemError):
    pass


class Scheme(Enum):
    SPLIT_DOWN = "split_down"
    SPLIT_UP = "split_up"
    CONTRACT_DOWN = "contract_down"
    CONTRACT_UP = "contract_up"
    EQ_DOWN = "eq_down"
    EQ_UP = "eq_up"
    AC = "ac"  # bookkeeping rearrangement within the silent AC theory

    @property
    def is_medial(self) -> bool:
        return self in (
            Scheme.SPLIT_DOWN,
            Scheme.SPLIT_UP,
            Scheme.CONTRACT_DOWN,
            Scheme.CONTRACT_UP,
        )


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    dual: str
    associative: bool = False
    commutative: bool = False
    unitary: Optional[str] = None  # unit constant name
    right_weakening: bool = False
    left_weakening: bool = False


@dataclass(frozen=True)
class Axiom:
    """One equational axiom lhs = rhs; patterns may contain metavariables
    whose sort restricts matching (formula / constant / literal)."""

    axiom_id: str
    kind: int  # 1..9, the generating axiom family
    lhs: Formula
    rhs: Formula

    def metavars(self) -> set[str]:
        return {t.name for t in subterms(self.lhs) if isinstance(t, Metavar)} | {
            t.name for t in subterms(self.rhs) if isinstance(t, Metavar)
        }


@dataclass(frozen=True)
class RuleDecl:
    rule_id: str
    scheme: Scheme
    alpha: str
    beta: str


@dataclass(frozen=True)
class RuleInstance:
    scheme: Scheme
    rule_id: str
    premise: Formula
    conclusion: Formula
    bindings: tuple  # tuple[tuple[str, Formula], ...], sorted by name
    relations: Optional[tuple] = None  # (alpha, beta) for medial schemes
    axiom_id: Optional[str] = None
    negated: bool = False  # equational: instance of the negated axiom
    direction: str = "fwd"  # equational only: fwd (lhs->rhs) or bwd

    def binding(self, name: str) -> Formula:
        for k, v in self.bindings:
            if k == name:
                return v
        raise KeyError(name)


def _bind(**kw: Formula) -> tuple:
    return tuple(sorted(kw.items()))


class SystemSpec:
    """Validated, immutable system descriptor.  Hash/eq by identity."""

    def __init__(
        self,
        name: str,
        constants: Iterable[str],
        constant_negation: Mapping[str, str],
        relations: Iterable[RelationSymbol],
        order: Iterable[tuple] = (),
        axioms: Iterable[Axiom] = (),
        rules: Iterable[RuleDecl] = (),
        scheme_flags: Optional[Mapping[str, bool]] = None,
    ):
        self.name = name
        self.constants = frozenset(constants)
        self.constant_negation = dict(constant_negation)
        self.relations = {r.name: r for r in relations}
        self.order = frozenset(tuple(p) for p in order)
        self.axioms = tuple(axioms)
        self.axioms_by_id = {a.axiom_id: a for a in self.axioms}
        self.rules = tuple(rules)
        self.rules_by_id = {r.rule_id: r for r in self.rules}
        self._rule_index = {(r.scheme, r.alpha, r.beta): r for r in self.rules}
        flags = dict(scheme_flags or {})
        self.scheme_flags = {
            s.value: flags.get(s.value, False) for s in Scheme if s is not Scheme.AC
        }
        self.order_closure = self._transitive_closure(self.order)
        self.ac_cache: dict = {}
        self.eq_cache: dict = {}

    @staticmethod
    def _transitive_closure(pairs: frozenset) -> frozenset:
        closure = set(pairs)
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(tuple(closure), repeat=2):
                if b == c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
        return frozenset(closure)

    # -- lookups used across modules -------------------------------------
    def negate_constant(self, name: str) -> str:
        try:
            return self.constant_negation[name]
        except KeyError:
            raise UnknownSymbolError(name) from None

    def relation(self, name: str) -> RelationSymbol:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownSymbolError(name) from None

    def dual(self, rel: str) -> str:
        return self.relation(rel).dual

    def is_associative(self, rel: str) -> bool:
        r = self.relations.get(rel)
        return bool(r and r.associative)

    def is_commutative(self, rel: str) -> bool:
        r = self.relations.get(rel)
        return bool(r and r.commutative)

    def unit_of(self, rel: str) -> Optional[str]:
        return self.relation(rel).unitary

    def precedes(self, a: str, b: str) -> bool:
        """Strict order a < b in the transitive closure."""
        return (a, b) in self.order_closure

    def rule_for(self, scheme: Scheme, alpha: str, beta: str) -> Optional[RuleDecl]:
        decl = self._rule_index.get((scheme, alpha, beta))
        if decl is not None:
            return decl
        if self.scheme_flags.get(scheme.value) and not self.rules:
            # flag-only systems admit every order-compatible instance
            return RuleDecl(f"{scheme.value}[{alpha},{beta}]", scheme, alpha, beta)
        return None


# ---------------------------------------------------------------------------
# Pattern matching and instantiation


def _sort_ok(spec: SystemSpec, sort: str, f: Formula) -> bool:
    if sort == "formula":
        return True
    if sort == "constant":
        return isinstance(f, Constant)
    if sort == "literal":
        return isinstance(f, Variable)
    raise SystemError(f"unknown metavar sort {sort!r}")


def instantiate(spec: SystemSpec, pattern: Formula, bindings: Mapping[str, Formula]) -> Formula:
    if isinstance(pattern, Metavar):
        try:
            bound = bindings[pattern.name]
        except KeyError:
            raise SystemError(f"unbound metavariable {pattern.name}") from None
        return negate(spec, bound) if pattern.negated else bound
    if isinstance(pattern, Compound):
        return Compound(
            pattern.rel,
            instantiate(spec, pattern.left, bindings),
            instantiate(spec, pattern.right, bindings),
        )
    return pattern


def negate_pattern(spec: SystemSpec, pattern: Formula) -> Formula:
    return negate(spec, pattern)


_MATCH_CAP = 64  # bounded AC fan-out per spine, matching cost guard


def match_pattern(
    spec: SystemSpec,
    pattern: Formula,
    term: Formula,
    bindings: Optional[dict] = None,
) -> Optional[dict]:
    """Match term against pattern modulo the declared AC theory, returning
    bindings or None.  Spine regroupings are capped at _MATCH_CAP."""
    for res in iter_matches(spec, pattern, term, bindings):
        return res
    return None


def iter_matches(
    spec: SystemSpec,
    pattern: Formula,
    term: Formula,
    bindings: Optional[dict] = None,
):
    yield from _match(spec, pattern, term, dict(bindings or {}), [_MATCH_CAP])


def _match(spec, pattern, term, bindings, budget):
    if budget[0] <= 0:
        return
    if isinstance(pattern, Metavar):
        want = negate(spec, term) if pattern.negated else term
        if not _sort_ok(spec, pattern.sort, want):
            return
        seen = bindings.get(pattern.name)
        if seen is not None:
            if equal_mod_ac(spec, seen, want):
                yield bindings
            return
        new = dict(bindings)
        new[pattern.name] = want
        yield new
        return
    if isinstance(pattern, (Constant, Variable)):
        if pattern == term:
            yield bindings
        return
    if not isinstance(term, Compound) or term.rel != pattern.rel:
        return
    rel = pattern.rel
    if spec.is_associative(rel):
        pelems = spine(spec, pattern, rel)
        telems = spine(spec, term, rel)
        yield from _match_spine(spec, rel, pelems, telems, bindings, budget)
        return
    options = [(term.left, term.right)]
    if spec.is_commutative(rel):
        options.append((term.right, term.left))
    for lt, rt in options:
        for b1 in _match(spec, pattern.left, lt, bindings, budget):
            yield from _match(spec, pattern.right, rt, b1, budget)


def _match_spine(spec, rel, pelems, telems, bindings, budget):
    if len(pelems) == 1:
        pat = pelems[0]
        if isinstance(pat, Metavar):
            yield from _match(spec, pat, join(rel, telems), bindings, budget)
        elif len(telems) == 1:
            yield from _match(spec, pat, telems[0], bindings, budget)
        return
    if not telems:
        return
    commutative = spec.is_commutative(rel)
    if commutative:
        # commit rigid pattern elements first; metavars absorb the rest
        pelems = sorted(
            pelems,
            key=lambda q: isinstance(q, Metavar) and q.sort == "formula",
        )
    pat, rest = pelems[0], pelems[1:]
    # a non-metavar head (or a sorted metavar) consumes exactly one element
    atomic_head = not isinstance(pat, Metavar) or pat.sort != "formula"
    if atomic_head:
        picks = range(len(telems)) if commutative else [0]
        for i in picks:
            budget[0] -= 1
            if budget[0] <= 0:
                return
            for b1 in _match(spec, pat, telems[i], bindings, budget):
                yield from _match_spine(
                    spec, rel, rest, telems[:i] + telems[i + 1 :], b1, budget
                )
        return
    if commutative:
        n = len(telems)
        indices = list(range(n))
        for r in range(1, n - len(rest) + 1):
            for combo in itertools.combinations(indices, r):
                budget[0] -= 1
                if budget[0] <= 0:
                    return
                taken = [telems[i] for i in combo]
                left = [telems[i] for i in indices if i not in combo]
                for b1 in _match(spec, pat, join(rel, taken), bindings, budget):
                    yield from _match_spine(spec, rel, rest, left, b1, budget)
    else:
        for cut in range(1, len(telems) - len(rest) + 1):
            budget[0] -= 1
            if budget[0] <= 0:
                return
            for b1 in _match(spec, pat, join(rel, telems[:cut]), bindings, budget):
                yield from _match_spine(spec, rel, rest, telems[cut:], b1, budget)


# ---------------------------------------------------------------------------
# Rule instantiation


def _scheme_shapes(spec: SystemSpec, scheme: Scheme, alpha: str, beta: str, A, B, C, D):
    na = spec.dual(alpha)
    if scheme is Scheme.SPLIT_DOWN:
        prem = Compound(alpha, Compound(beta, A, B), Compound(beta, C, D))
        conc = Compound(beta, Compound(alpha, A, C), Compound(na, B, D))
    elif scheme is Scheme.SPLIT_UP:
        prem = Compound(beta, Compound(alpha, A, C), Compound(na, B, D))
        conc = Compound(alpha, Compound(beta, A, B), Compound(beta, C, D))
    elif scheme is Scheme.CONTRACT_DOWN:
        prem = Compound(beta, Compound(alpha, A, B), Compound(alpha, C, D))
        conc = Compound(alpha, Compound(beta, A, C), Compound(beta, B, D))
    elif scheme is Scheme.CONTRACT_UP:
        prem = Compound(alpha, Compound(beta, A, C), Compound(beta, B, D))
        conc = Compound(beta, Compound(alpha, A, B), Compound(alpha, C, D))
    else:
        raise SystemError(f"not a medial scheme: {scheme}")
    return prem, conc


def _side_condition_ok(spec: SystemSpec, scheme: Scheme, alpha: str, beta: str) -> bool:
    if scheme in (Scheme.SPLIT_DOWN, Scheme.CONTRACT_DOWN):
        return spec.precedes(alpha, beta)
    return spec.precedes(beta, alpha)


def instantiate_rule(
    spec: SystemSpec,
    scheme: Scheme,
    bindings: Mapping[str, Formula],
    alpha: str,
    beta: str,
    rule_id: Optional[str] = None,
) -> RuleInstance:
    """Build the fully instantiated medial rule for one scheme."""
    if not scheme.is_medial:
        raise SystemError("instantiate_rule builds medial schemes only")
    if not _side_condition_ok(spec, scheme, alpha, beta):
        raise SideConditionViolated(f"{scheme.value} needs order between {alpha},{beta}")
    if rule_id is None:
        decl = spec.rule_for(scheme, alpha, beta)
        if decl is None:
            raise SideConditionViolated(
                f"system {spec.name} declares no {scheme.value} rule at ({alpha},{beta})"
            )
        rule_id = decl.rule_id
    A, B, C, D = (bindings[k] for k in "ABCD")
    prem, conc = _scheme_shapes(spec, scheme, alpha, beta, A, B, C, D)
    return RuleInstance(
        scheme=scheme,
        rule_id=rule_id,
        premise=prem,
        conclusion=conc,
        bindings=_bind(A=A, B=B, C=C, D=D),
        relations=(alpha, beta),
    )


def eq_instance(
    spec: SystemSpec,
    axiom_id: str,
    bindings: Mapping[str, Formula],
    negated: bool = False,
    direction: str = "fwd",
) -> RuleInstance:
    """Equational rule instance: one oriented application of an axiom (or of
    its negation).  Premise/conclusion are the exact pattern instantiations."""
    try:
        ax = spec.axioms_by_id[axiom_id]
    except KeyError:
        raise UnknownAxiom(axiom_id) from None
    lhs, rhs = ax.lhs, ax.rhs
    if negated:
        lhs, rhs = negate(spec, lhs), negate(spec, rhs)
    for t in subterms(ax.lhs):
        if isinstance(t, Metavar) and not _sort_ok(spec, t.sort, bindings[t.name]):
            raise SystemError(f"binding for {t.name} violates sort {t.sort}")
    left = instantiate(spec, lhs, bindings)
    right = instantiate(spec, rhs, bindings)
    if direction == "fwd":
        prem, conc = left, right
    elif direction == "bwd":
        prem, conc = right, left
    else:
        raise SystemError(f"bad direction {direction!r}")
    return RuleInstance(
        scheme=Scheme.EQ_UP if negated else Scheme.EQ_DOWN,
        rule_id=f"eq:{axiom_id}" + (":n" if negated else ""),
        premise=prem,
        conclusion=conc,
        bindings=tuple(sorted(bindings.items())),
        axiom_id=axiom_id,
        negated=negated,
        direction=direction,
    )


def ac_instance(spec: SystemSpec, premise: Formula, conclusion: Formula) -> RuleInstance:
    if not equal_mod_ac(spec, premise, conclusion):
        raise SystemError("ac rearrangement between AC-distinct formulas")
    return RuleInstance(
        scheme=Scheme.AC,
        rule_id="acr",
        premise=premise,
        conclusion=conclusion,
        bindings=_bind(A=premise, B=conclusion),
    )


def eq_step_for(
    spec: SystemSpec, lhs: Formula, rhs: Formula
) -> Optional[RuleInstance]:
    """Search declared axioms (and their negations, both orientations) for a
    one-step proof of lhs -> rhs.  Premise/conclusion of the returned
    instance are pattern-exact; callers bridge AC differences themselves."""
    key = (lhs, rhs)
    try:
        return spec.eq_cache[key]
    except KeyError:
        pass
    inst = _eq_step_for(spec, lhs, rhs)
    spec.eq_cache[key] = inst
    return inst


def _eq_step_for(
    spec: SystemSpec, lhs: Formula, rhs: Formula
) -> Optional[RuleInstance]:
    for ax in spec.axioms:
        for negated in (False, True):
            pl, pr = ax.lhs, ax.rhs
            if negated:
                pl, pr = negate(spec, pl), negate(spec, pr)
            for direction, (pp, pc) in (("fwd", (pl, pr)), ("bwd", (pr, pl))):
                for b in iter_matches(spec, pp, lhs):
                    b2 = match_pattern(spec, pc, rhs, b)
                    if b2 is None:
                        continue
                    if set(b2) != ax.metavars():
                        continue
                    inst = eq_instance(spec, ax.axiom_id, b2, negated, direction)
                    if equal_mod_ac(spec, inst.premise, lhs) and equal_mod_ac(
                        spec, inst.conclusion, rhs
                    ):
                        return inst
    return None


def check_rule_instance(spec: SystemSpec, rule: RuleInstance) -> Optional[str]:
    """None when the instance is valid for spec, else a reason string."""
    bindings = dict(rule.bindings)
    if rule.scheme is Scheme.AC:
        if not equal_mod_ac(spec, rule.premise, rule.conclusion):
            return "ac step between AC-distinct formulas"
        return None
    if rule.scheme.is_medial:
        if rule.relations is None:
            return "medial instance lacks relations"
        alpha, beta = rule.relations
        if alpha not in spec.relations or beta not in spec.relations:
            return f"undeclared relation in {rule.relations}"
        if not _side_condition_ok(spec, rule.scheme, alpha, beta):
            return f"side condition fails for {rule.rule_id} at ({alpha},{beta})"
        decl = spec.rule_for(rule.scheme, alpha, beta)
        if decl is None:
            return f"no declared rule {rule.scheme.value} at ({alpha},{beta})"
        try:
            prem, conc = _scheme_shapes(
                spec, rule.scheme, alpha, beta, *(bindings[k] for k in "ABCD")
            )
        except KeyError as e:
            return f"missing binding {e}"
        if prem != rule.premise or conc != rule.conclusion:
            return f"stored formulas disagree with scheme shape for {rule.rule_id}"
        return None
    # equational
    if rule.axiom_id is None or rule.axiom_id not in spec.axioms_by_id:
        return f"axiom not declared: {rule.axiom_id}"
    try:
        rebuilt = eq_instance(spec, rule.axiom_id, bindings, rule.negated, rule.direction)
    except (SystemError, KeyError) as e:
        return f"bad equational instance: {e}"
    if rebuilt.premise != rule.premise or rebuilt.conclusion != rule.conclusion:
        return f"stored formulas disagree with axiom {rule.axiom_id}"
    return None


# ---------------------------------------------------------------------------
# Validation


def classify_relation(spec: SystemSpec, rel: str) -> str:
    """strong (order-minimal) / weak (order-maximal) / intermediate."""
    if rel not in spec.relations:
        raise UnknownSymbolError(rel)
    minimal = not any(b == rel for (_, b) in spec.order_closure)
    maximal = not any(a == rel for (a, _) in spec.order_closure)
    if minimal and not maximal:
        return "strong"
    if maximal and not minimal:
        return "weak"
    if minimal and maximal:
        return "strong"  # isolated symbols satisfy both defining clauses
    return "intermediate"


def validate_spec(spec: SystemSpec) -> list[str]:
    """Structured violations; empty list means the spec is well formed."""
    issues: list[str] = []
    for a, b in spec.order:
        if a not in spec.relations or b not in spec.relations:
            issues.append(f"order mentions undeclared relation: {a} < {b}")
    for a, b in spec.order_closure:
        if a == b:
            issues.append(f"order not irreflexive at {a}")
    for c, nc in spec.constant_negation.items():
        if c not in spec.constants or nc not in spec.constants:
            issues.append(f"negation entry outside constant set: {c} -> {nc}")
        elif spec.constant_negation.get(nc) != c:
            issues.append(f"constant negation not involutive at {c}")
    for c in spec.constants:
        if c not in spec.constant_negation:
            issues.append(f"constant lacks negation entry: {c}")
    for r in spec.relations.values():
        flags = [r.unitary is not None, r.right_weakening, r.left_weakening]
        if sum(flags) > 1:
            issues.append(f"unitary/right/left weakening flags not exclusive on {r.name}")
        if r.dual not in spec.relations:
            issues.append(f"dual of {r.name} undeclared: {r.dual}")
        elif spec.relations[r.dual].dual != r.name:
            issues.append(f"dual map not involutive at {r.name}")
        else:
            d = spec.relations[r.dual]
            if (r.associative, r.commutative) != (d.associative, d.commutative):
                issues.append(f"negation breaks AC declarations between {r.name}/{d.name}")
        if r.unitary is not None:
            if r.unitary not in spec.constants:
                issues.append(f"unit of {r.name} undeclared: {r.unitary}")
            elif _unit_axiom(spec, r) is None:
                issues.append(f"unitary flag on {r.name} has no unit axiom instance")
        if r.right_weakening and _weakening_axiom(spec, r.name, "right") is None:
            issues.append(f"right_weakening flag on {r.name} has no axiom")
        if r.left_weakening and _weakening_axiom(spec, r.name, "left") is None:
            issues.append(f"left_weakening flag on {r.name} has no axiom")
    # order-consistency of negation where duals are comparable at all
    for r in spec.relations.values():
        cls = classify_relation(spec, r.name)
        dual_cls = classify_relation(spec, r.dual)
        comparable = any(r.dual in pair for pair in spec.order_closure)
        if comparable and cls == "strong" and dual_cls == "strong" and r.dual != r.name:
            issues.append(f"negation is not order-consistent at {r.name}")
    return issues


def _mv(name: str, sort: str = "formula", negated: bool = False) -> Metavar:
    return Metavar(name, negated, sort)


def _unit_axiom(spec: SystemSpec, r: RelationSymbol) -> Optional[RuleInstance]:
    """A unit equation instance A r u = A, possibly via a negated axiom."""
    probe = Variable("w")
    return eq_step_for(spec, Compound(r.name, probe, Constant(r.unitary)), probe)


def _weakening_axiom(spec: SystemSpec, rel: str, side: str) -> Optional[Axiom]:
    for ax in spec.axioms:
        for negated in (False, True):
            lhs = negate(spec, ax.lhs) if negated else ax.lhs
            rhs = negate(spec, ax.rhs) if negated else ax.rhs
            if not isinstance(lhs, Compound) or lhs.rel != rel:
                continue
            if side == "right" and isinstance(lhs.left, Metavar) and lhs.left.sort == "formula":
                kept = lhs.left
                junk = lhs.right
            elif side == "left" and isinstance(lhs.right, Metavar) and lhs.right.sort == "formula":
                kept = lhs.right
                junk = lhs.left
            else:
                continue
            if not (isinstance(junk, Metavar) and junk.sort == "formula"):
                continue
            if isinstance(rhs, Metavar) and rhs.name == kept.name and rhs.negated == kept.negated:
                return ax
    return None


def weakening_axiom_for(spec: SystemSpec, rel: str) -> Optional[tuple]:
    """(axiom, negated, kept_side) realising the weakening equation of rel."""
    r = spec.relation(rel)
    side = "right" if r.right_weakening else "left" if r.left_weakening else None
    if side is None:
        return None
    for negated in (False, True):
        for ax in spec.axioms:
            lhs = negate(spec, ax.lhs) if negated else ax.lhs
            rhs = negate(spec, ax.rhs) if negated else ax.rhs
            if not isinstance(lhs, Compound) or lhs.rel != rel:
                continue
            kept = lhs.left if side == "right" else lhs.right
            junk = lhs.right if side == "right" else lhs.left
            if (
                isinstance(kept, Metavar)
                and isinstance(junk, Metavar)
                and kept.sort == junk.sort == "formula"
                and isinstance(rhs, Metavar)
                and rhs.name == kept.name
                and rhs.negated == kept.negated
            ):
                return ax, negated, side, kept.name, junk.name
    return None


# ---------------------------------------------------------------------------
# Redex enumeration


def enumerate_redexes(
    spec: SystemSpec,
    f: Formula,
    schemes: Optional[Iterable[Scheme]] = None,
    expansion_targets: Sequence[Formula] = (),
) -> list[tuple]:
    """All (context, rule instance) pairs whose premise matches a subterm of
    f (modulo AC, spine regroupings capped).  Equational expansions whose
    bindings the redex side does not determine are only produced against the
    supplied expansion_targets."""
    wanted = set(schemes) if schemes is not None else set(Scheme) - {Scheme.AC}
    out: list[tuple] = []
    for sides in _all_paths(f):
        sub = subformula_at_sides(f, sides)
        ctx = context_at(f, sides)
        if not isinstance(sub, Compound):
            continue
        for scheme in (s for s in wanted if s.is_medial):
            out.extend((ctx, ri) for ri in _medial_redexes(spec, scheme, sub))
        if Scheme.EQ_DOWN in wanted or Scheme.EQ_UP in wanted:
            out.extend((ctx, ri) for ri in _eq_redexes(spec, sub, wanted, expansion_targets))
    # atoms still admit equational redexes (e.g. unit expansion)
    for sides in _all_paths(f):
        sub = subformula_at_sides(f, sides)
        if isinstance(sub, Compound):
            continue
        ctx = context_at(f, sides)
        if Scheme.EQ_DOWN in wanted or Scheme.EQ_UP in wanted:
            out.extend((ctx, ri) for ri in _eq_redexes(spec, sub, wanted, expansion_targets))
    return out


def _all_paths(f: Formula, prefix: tuple = ()) -> Iterator[tuple]:
    yield prefix
    if isinstance(f, Compound):
        yield from _all_paths(f.left, prefix + ("L",))
        yield from _all_paths(f.right, prefix + ("R",))


def _medial_redexes(spec: SystemSpec, scheme: Scheme, sub: Compound) -> list[RuleInstance]:
    out = []
    root = sub.rel
    if scheme is Scheme.SPLIT_DOWN:
        # premise (A b B) root (C b D), side root < b
        for b in spec.relations:
            if not spec.precedes(root, b):
                continue
            if spec.rule_for(scheme, root, b) is None:
                continue
            for A, B in _two_splits(spec, b, sub.left):
                for C, D in _two_splits(spec, b, sub.right):
                    out.append(
                        instantiate_rule(spec, scheme, dict(A=A, B=B, C=C, D=D), root, b)
                    )
    elif scheme is Scheme.CONTRACT_DOWN:
        # premise (A a B) root (C a D), side a < root
        for a in spec.relations:
            if not spec.precedes(a, root):
                continue
            if spec.rule_for(scheme, a, root) is None:
                continue
            for A, B in _two_splits(spec, a, sub.left):
                for C, D in _two_splits(spec, a, sub.right):
                    out.append(
                        instantiate_rule(spec, scheme, dict(A=A, B=B, C=C, D=D), a, root)
                    )
    elif scheme is Scheme.SPLIT_UP:
        # premise (A a C) root (B ~a D), side a > root
        for a in spec.relations:
            if not spec.precedes(root, a):
                continue
            if spec.rule_for(scheme, a, root) is None:
                continue
            na = spec.dual(a)
            for A, C in _two_splits(spec, a, sub.left):
                for B, D in _two_splits(spec, na, sub.right):
                    out.append(
                        instantiate_rule(spec, scheme, dict(A=A, B=B, C=C, D=D), a, root)
                    )
    elif scheme is Scheme.CONTRACT_UP:
        # premise (A b C) root (B b D), side root > b
        for b in spec.relations:
            if not spec.precedes(b, root):
                continue
            if spec.rule_for(scheme, root, b) is None:
                continue
            for A, C in _two_splits(spec, b, sub.left):
                for B, D in _two_splits(spec, b, sub.right):
                    out.append(
                        instantiate_rule(spec, scheme, dict(A=A, B=B, C=C, D=D), root, b)
                    )
    return out


def _two_splits(spec: SystemSpec, rel: str, f: Formula) -> list[tuple]:
    """Ways to read f as (X rel Y), including AC regroupings (capped)."""
    if isinstance(f, Compound) and f.rel == rel and not spec.is_associative(rel):
        return [(f.left, f.right)]
    if not (isinstance(f, Compound) and f.rel == rel):
        return []
    elems = spine(spec, f, rel)
    out = []
    for cut in range(1, len(elems)):
        out.append((join(rel, elems[:cut]), join(rel, elems[cut:])))
        if len(out) >= _MATCH_CAP:
            break
    return out


def _eq_redexes(spec, sub, wanted, expansion_targets):
    out = []
    negated_opts = []
    if Scheme.EQ_DOWN in wanted:
        negated_opts.append(False)
    if Scheme.EQ_UP in wanted:
        negated_opts.append(True)
    for ax in spec.axioms:
        for negated in negated_opts:
            pl = negate(spec, ax.lhs) if negated else ax.lhs
            pr = negate(spec, ax.rhs) if negated else ax.rhs
            mvs = ax.metavars()
            for direction, (pp, pc) in (("fwd", (pl, pr)), ("bwd", (pr, pl))):
                b = match_pattern(spec, pp, sub)
                if b is None:
                    continue
                if set(b) == mvs:
                    out.append(eq_instance(spec, ax.axiom_id, b, negated, direction))
                    continue
                for target in expansion_targets:
                    b2 = match_pattern(spec, pc, target, b)
                    if b2 is not None and set(b2) == mvs:
                        out.append(eq_instance(spec, ax.axiom_id, b2, negated, direction))
    return out


# ---------------------------------------------------------------------------
# Spec file format (line oriented).  Metavariable sorts follow the naming
# convention A..D formula, U..W constant, X..Z literal.

_SORT_BY_NAME = {**{n: "formula" for n in "ABCD"},
                 **{n: "constant" for n in "UVW"},
                 **{n: "literal" for n in "XYZ"}}


def _assign_sorts(pattern: Formula) -> Formula:
    if isinstance(pattern, Metavar):
        sort = _SORT_BY_NAME.get(pattern.name)
        if sort is None:
            raise SystemError(f"metavariable {pattern.name} has no sort convention")
        return Metavar(pattern.name, pattern.negated, sort)
    if isinstance(pattern, Compound):
        return Compound(
            pattern.rel, _assign_sorts(pattern.left), _assign_sorts(pattern.right)
        )
    return pattern


def spec_to_text(spec: SystemSpec) -> str:
    lines = [f"name: {spec.name}"]
    lines.append("constants: " + " ".join(sorted(spec.constants)))
    for c in sorted(spec.constants):
        lines.append(f"negation: {c} = {spec.constant_negation[c]}")
    for rel in spec.relations.values():
        flags = []
        if rel.associative:
            flags.append("assoc")
        if rel.commutative:
            flags.append("comm")
        if rel.unitary is not None:
            flags.append(f"unit={rel.unitary}")
        if rel.right_weakening:
            flags.append("rweak")
        if rel.left_weakening:
            flags.append("lweak")
        lines.append(f"relation: {rel.name} dual={rel.dual} " + " ".join(flags))
    for a, b in sorted(spec.order):
        lines.append(f"order: {a} < {b}")
    for ax in spec.axioms:
        lines.append(
            f"axiom: {ax.axiom_id} kind={ax.kind} "
            f"{print_formula(ax.lhs, spaces=False)} = "
            f"{print_formula(ax.rhs, spaces=False)}"
        )
    for decl in spec.rules:
        lines.append(
            f"rule: {decl.rule_id} {decl.scheme.value} {decl.alpha} {decl.beta}"
        )
    enabled = [k for k, v in spec.scheme_flags.items() if v]
    if enabled:
        lines.append("schemes: " + " ".join(sorted(enabled)))
    return "\n".join(lines) + "\n"


def spec_from_text(text: str) -> SystemSpec:
    name = "unnamed"
    constants: list = []
    negation: dict = {}
    relations: list = []
    order: list = []
    axioms: list = []
    rules: list = []
    flags: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if key == "name":
            name = rest
        elif key == "constants":
            constants.extend(rest.split())
        elif key == "negation":
            lhs, _, rhs = rest.partition("=")
            negation[lhs.strip()] = rhs.strip()
        elif key == "relation":
            parts = rest.split()
            rel_name = parts[0]
            kw = dict(
                associative=False, commutative=False, unitary=None,
                right_weakening=False, left_weakening=False,
            )
            dual = rel_name
            for part in parts[1:]:
                if part.startswith("dual="):
                    dual = part[5:]
                elif part == "assoc":
                    kw["associative"] = True
                elif part == "comm":
                    kw["commutative"] = True
                elif part.startswith("unit="):
                    kw["unitary"] = part[5:]
                elif part == "rweak":
                    kw["right_weakening"] = True
                elif part == "lweak":
                    kw["left_weakening"] = True
                else:
                    raise SystemError(f"line {lineno}: unknown relation flag {part!r}")
            relations.append(RelationSymbol(rel_name, dual, **kw))
        elif key == "order":
            a, _, b = rest.partition("<")
            order.append((a.strip(), b.strip()))
        elif key == "axiom":
            head, eq_text = rest.split(None, 2)[0], rest.split(None, 2)[2]
            kind_text = rest.split(None, 2)[1]
            if not kind_text.startswith("kind="):
                raise SystemError(f"line {lineno}: axiom needs kind=")
            lhs_text, _, rhs_text = eq_text.partition("=")
            axioms.append(
                Axiom(
                    head,
                    int(kind_text[5:]),
                    _assign_sorts(parse_formula(lhs_text.strip(), metavars=True)),
                    _assign_sorts(parse_formula(rhs_text.strip(), metavars=True)),
                )
            )
        elif key == "rule":
            rid, scheme_name, alpha, beta = rest.split()
            rules.append(RuleDecl(rid, Scheme(scheme_name), alpha, beta))
        elif key == "schemes":
            for part in rest.split():
                flags[part] = True
        else:
            raise SystemError(f"line {lineno}: unknown section {key!r}")
    return SystemSpec(
        name=name,
        constants=constants,
        constant_negation=negation,
        relations=relations,
        order=order,
        axioms=axioms,
        rules=rules,
        scheme_flags=flags,
    )
