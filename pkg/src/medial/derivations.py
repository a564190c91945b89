"""Derivations: checkable step sequences from a premise to a conclusion.

Each step re-anchors itself with a full plugging context (path with
siblings), so its before/after formulas are computable from the step
alone.  The checker threads the derivation and treats AC equality
silently at every joint; all other equalities must appear as explicit
equational steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .systems import (
    RuleInstance,
    Scheme,
    SystemError,
    SystemSpec,
    ac_instance,
    check_rule_instance,
    classify_relation,
    eq_instance,
    eq_step_for,
    instantiate_rule,
)
from .terms import (
    Compound,
    Constant,
    ContextPath,
    Formula,
    Metavar,
    PathStep,
    Variable,
    context_at,
    equal_mod_ac,
    negate,
    parse_formula,
    plug,
    print_formula,
    replace_at,
    subformula_at_sides,
    subterms,
)


class DerivationError(SystemError):
    pass


class JointMismatch(DerivationError):
    pass


class NoSplittableFragment(DerivationError):
    pass


class NonEquationalStep(DerivationError):
    pass


@dataclass(frozen=True)
class Step:
    context: ContextPath
    rule: RuleInstance

    @property
    def before(self) -> Formula:
        return plug(self.context, self.rule.premise)

    @property
    def after(self) -> Formula:
        return plug(self.context, self.rule.conclusion)

    @property
    def sides(self) -> tuple:
        return tuple(p.hole_side for p in self.context)


@dataclass(frozen=True)
class Derivation:
    premise: Formula
    steps: tuple
    conclusion: Formula

    def __len__(self) -> int:
        return len(self.steps)


def identity(f: Formula) -> Derivation:
    return Derivation(f, (), f)


@dataclass(frozen=True)
class CheckFailure:
    step_index: int
    reason: str

    def __str__(self) -> str:
        return f"step {self.step_index}: {self.reason}"


def check(spec: SystemSpec, d: Derivation) -> Optional[CheckFailure]:
    """None when d is valid for spec; otherwise the first failure."""
    for t in subterms(d.premise):
        if isinstance(t, Metavar):
            return CheckFailure(-1, "metavariable in premise")
        if isinstance(t, Constant) and t.name not in spec.constants:
            return CheckFailure(-1, f"undeclared constant {t.name}")
        if isinstance(t, Compound) and t.rel not in spec.relations:
            return CheckFailure(-1, f"undeclared relation {t.rel}")
    cur = d.premise
    for i, step in enumerate(d.steps):
        if not equal_mod_ac(spec, step.before, cur):
            return CheckFailure(i, "ThreadBroken: step premise does not match")
        reason = check_rule_instance(spec, step.rule)
        if reason is not None:
            return CheckFailure(i, reason)
        cur = step.after
    if not equal_mod_ac(spec, cur, d.conclusion):
        return CheckFailure(len(d.steps), "ThreadBroken: conclusion mismatch")
    return None


def assert_checks(spec: SystemSpec, d: Derivation, what: str = "derivation") -> Derivation:
    failure = check(spec, d)
    if failure is not None:
        raise DerivationError(f"{what} fails to check: {failure}")
    return d


# ---------------------------------------------------------------------------
# Length measure


def weak_units(spec: SystemSpec) -> list[tuple]:
    """(beta, unit, co-unit) for every weak relation carrying a unit."""
    out = []
    for name, rel in spec.relations.items():
        if classify_relation(spec, name) == "weak" and rel.unitary is not None:
            out.append((name, rel.unitary, spec.negate_constant(rel.unitary)))
    return out


def _is_weak_axiom_step(spec: SystemSpec, pairs, prem: Formula, conc: Formula) -> bool:
    """Does the local rewrite instantiate one of the free axioms (assoc,
    comm, unit, constant- or variable-annihilation) of a weak relation?"""
    if equal_mod_ac(spec, prem, conc):  # assoc/comm bookkeeping
        return True
    for beta, unit, co_unit in pairs:
        u = Constant(unit)
        nu = Constant(co_unit)
        for big, small in ((prem, conc), (conc, prem)):
            if equal_mod_ac(spec, big, Compound(beta, small, u)):
                return True
            if (
                small == nu
                and isinstance(big, Compound)
                and big.rel == beta
                and isinstance(big.left, (Constant, Variable))
                and negate(spec, big.left) == big.right
            ):
                return True
    return False


def step_cost(spec: SystemSpec, pairs, step: Step) -> int:
    rule = step.rule
    if rule.scheme is Scheme.AC:
        return 0
    if rule.scheme.is_medial:
        return 1
    return 0 if _is_weak_axiom_step(spec, pairs, rule.premise, rule.conclusion) else 1


def length(spec: SystemSpec, d: Derivation) -> int:
    """Counts the steps that grow a derivation: medial steps, plus every
    equational step not instantiating a weak relation's free axioms."""
    pairs = weak_units(spec)
    if not pairs:
        raise NoSplittableFragment(f"system {spec.name} has no weak relation with a unit")
    return sum(step_cost(spec, pairs, s) for s in d.steps)


# ---------------------------------------------------------------------------
# Composition


def nest(ctx: ContextPath, d: Derivation) -> Derivation:
    """Run d inside the hole of ctx (deep applicability)."""
    ctx = tuple(ctx)
    if not ctx:
        return d
    steps = tuple(Step(ctx + s.context, s.rule) for s in d.steps)
    return Derivation(plug(ctx, d.premise), steps, plug(ctx, d.conclusion))


def concat(spec: SystemSpec, d1: Derivation, d2: Derivation) -> Derivation:
    steps = list(d1.steps)
    if d1.conclusion != d2.premise:
        if not equal_mod_ac(spec, d1.conclusion, d2.premise):
            raise JointMismatch(
                f"cannot join {print_formula(d1.conclusion)} with {print_formula(d2.premise)}"
            )
        steps.append(Step((), ac_instance(spec, d1.conclusion, d2.premise)))
    steps.extend(d2.steps)
    return Derivation(d1.premise, tuple(steps), d2.conclusion)


def exactify(spec: SystemSpec, d: Derivation) -> Derivation:
    """Insert AC rearrangement steps so consecutive formulas agree exactly,
    as the line-oriented file format requires."""
    steps: list[Step] = []
    cur = d.premise
    for step in d.steps:
        if step.before != cur:
            if not equal_mod_ac(spec, step.before, cur):
                raise JointMismatch("derivation thread broken beyond AC")
            steps.append(Step((), ac_instance(spec, cur, step.before)))
        steps.append(step)
        cur = step.after
    if cur != d.conclusion:
        if not equal_mod_ac(spec, cur, d.conclusion):
            raise JointMismatch("conclusion differs beyond AC")
        steps.append(Step((), ac_instance(spec, cur, d.conclusion)))
    return Derivation(d.premise, tuple(steps), d.conclusion)


def reverse_equational(spec: SystemSpec, d: Derivation) -> Derivation:
    """Run an equational derivation backwards (the congruence is symmetric)."""
    steps = []
    for step in reversed(d.steps):
        rule = step.rule
        if rule.scheme is Scheme.AC:
            new_rule = ac_instance(spec, rule.conclusion, rule.premise)
        elif rule.scheme in (Scheme.EQ_DOWN, Scheme.EQ_UP):
            new_rule = eq_instance(
                spec,
                rule.axiom_id,
                dict(rule.bindings),
                negated=rule.negated,
                direction="bwd" if rule.direction == "fwd" else "fwd",
            )
        else:
            raise NonEquationalStep(f"cannot reverse {rule.rule_id}")
        steps.append(Step(step.context, new_rule))
    return Derivation(d.conclusion, tuple(steps), d.premise)


def dualize(spec: SystemSpec, d: Derivation) -> Derivation:
    """Negate every formula and flip the derivation upside down.  Defined
    for purely equational derivations."""
    steps = []
    for step in reversed(d.steps):
        ctx = tuple(
            PathStep(spec.dual(p.rel), p.hole_side, negate(spec, p.sibling))
            for p in step.context
        )
        rule = step.rule
        if rule.scheme is Scheme.AC:
            new_rule = ac_instance(
                spec, negate(spec, rule.conclusion), negate(spec, rule.premise)
            )
        elif rule.scheme in (Scheme.EQ_DOWN, Scheme.EQ_UP):
            new_rule = eq_instance(
                spec,
                rule.axiom_id,
                dict(rule.bindings),
                negated=not rule.negated,
                direction="bwd" if rule.direction == "fwd" else "fwd",
            )
        else:
            raise NonEquationalStep(f"cannot dualize {rule.rule_id}")
        steps.append(Step(ctx, new_rule))
    return Derivation(
        negate(spec, d.conclusion), tuple(steps), negate(spec, d.premise)
    )


# ---------------------------------------------------------------------------
# Builder: exact-threaded construction with automatic AC bridging


class Builder:
    def __init__(self, spec: SystemSpec, start: Formula):
        self.spec = spec
        self.start = start
        self.current = start
        self.steps: list[Step] = []

    def _bridge(self, sides: Sequence[str], target: Formula) -> None:
        sub = subformula_at_sides(self.current, sides)
        if sub == target:
            return
        ctx = context_at(self.current, sides)
        self.steps.append(Step(ctx, ac_instance(self.spec, sub, target)))
        self.current = replace_at(self.current, sides, target)

    def acr(self, sides: Sequence[str], target: Formula) -> None:
        self._bridge(sides, target)

    def apply(self, sides: Sequence[str], rule: RuleInstance) -> None:
        self._bridge(sides, rule.premise)
        ctx = context_at(self.current, sides)
        self.steps.append(Step(ctx, rule))
        self.current = replace_at(self.current, sides, rule.conclusion)

    def apply_eq(self, sides, axiom_id, bindings, negated=False, direction="fwd"):
        self.apply(sides, eq_instance(self.spec, axiom_id, bindings, negated, direction))

    def apply_scheme(self, sides, scheme: Scheme, bindings, alpha: str, beta: str):
        self.apply(sides, instantiate_rule(self.spec, scheme, bindings, alpha, beta))

    def rewrite(self, sides: Sequence[str], target: Formula) -> None:
        """One equational step from the subterm at sides to target, found
        among the declared axioms (AC bridged on both ends)."""
        sub = subformula_at_sides(self.current, sides)
        inst = eq_step_for(self.spec, sub, target)
        if inst is None:
            raise DerivationError(
                f"no one-step equation {print_formula(sub)} -> {print_formula(target)}"
            )
        self.apply(sides, inst)
        self._bridge(sides, target)

    def splice(self, sides: Sequence[str], d: Derivation) -> None:
        """Run a whole derivation inside the subterm at sides."""
        self._bridge(sides, d.premise)
        ctx = context_at(self.current, sides)
        for s in d.steps:
            self.steps.append(Step(ctx + s.context, s.rule))
        self.current = replace_at(self.current, sides, d.conclusion)

    def derivation(self, conclusion: Optional[Formula] = None) -> Derivation:
        if conclusion is not None:
            self._bridge((), conclusion)
        return Derivation(self.start, tuple(self.steps), self.current)


# ---------------------------------------------------------------------------
# Serialization (line-oriented, tree-exact round trip)


def to_text(spec: SystemSpec, d: Derivation) -> str:
    d = exactify(spec, d)
    lines = [f"system: {spec.name}", f"premise: {print_formula(d.premise)}"]
    for step in d.steps:
        rule = step.rule
        parts = [f"rule={rule.rule_id}"]
        if rule.scheme in (Scheme.EQ_DOWN, Scheme.EQ_UP):
            parts.append(f"dir={rule.direction}")
        path = "".join(step.sides)
        parts.append(f"path={path or '-'}")
        for name, value in rule.bindings:
            parts.append(f"{name}={print_formula(value, spaces=False)}")
        if rule.relations is not None:
            parts.append(f"rel={rule.relations[0]},{rule.relations[1]}")
        lines.append("step: " + " ".join(parts))
    lines.append(f"conclusion: {print_formula(d.conclusion)}")
    return "\n".join(lines) + "\n"


def _parse_fields(raw: str) -> dict:
    """key=value pairs; values are formulas and may contain spaces."""
    import re

    hits = list(re.finditer(r"(?:(?<=\s)|^)([A-Za-z_]\w*)=", raw))
    fields = {}
    for i, hit in enumerate(hits):
        end = hits[i + 1].start() if i + 1 < len(hits) else len(raw)
        fields[hit.group(1)] = raw[hit.end() : end].strip()
    return fields


def from_text(text: str, resolve_system: Callable[[str], SystemSpec]):
    """Parse a derivation file; returns (spec, derivation)."""
    spec: Optional[SystemSpec] = None
    premise: Optional[Formula] = None
    conclusion: Optional[Formula] = None
    raw_steps: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "system":
            spec = resolve_system(rest)
        elif key == "premise":
            premise = parse_formula(rest)
        elif key == "conclusion":
            conclusion = parse_formula(rest)
        elif key == "step":
            raw_steps.append(rest)
        else:
            raise DerivationError(f"line {lineno}: unknown section {key!r}")
    if spec is None or premise is None or conclusion is None:
        raise DerivationError("derivation file needs system, premise and conclusion")
    cur = premise
    steps = []
    for raw in raw_steps:
        fields = _parse_fields(raw)
        rule_id = fields.pop("rule")
        path = fields.pop("path")
        sides = () if path == "-" else tuple(path)
        direction = fields.pop("dir", "fwd")
        rel = fields.pop("rel", None)
        bindings = {k: parse_formula(v) for k, v in fields.items()}
        if rule_id == "acr":
            rule = ac_instance(spec, bindings["A"], bindings["B"])
        elif rule_id.startswith("eq:"):
            axiom_id = rule_id[3:]
            negated = axiom_id.endswith(":n")
            if negated:
                axiom_id = axiom_id[:-2]
            rule = eq_instance(spec, axiom_id, bindings, negated, direction)
        else:
            decl = spec.rules_by_id.get(rule_id)
            if decl is None:
                raise DerivationError(f"unknown rule id {rule_id!r}")
            if rel is not None and tuple(rel.split(",")) != (decl.alpha, decl.beta):
                raise DerivationError(f"rule {rule_id} disagrees with rel={rel}")
            rule = instantiate_rule(
                spec, decl.scheme, bindings, decl.alpha, decl.beta, rule_id=decl.rule_id
            )
        sub = subformula_at_sides(cur, sides)
        if sub != rule.premise:
            raise DerivationError(
                f"file not exactly threaded at rule {rule_id}: "
                f"{print_formula(sub)} vs {print_formula(rule.premise)}"
            )
        steps.append(Step(context_at(cur, sides), rule))
        cur = replace_at(cur, sides, rule.conclusion)
    if cur != conclusion:
        raise DerivationError("conclusion line does not match the threaded result")
    return spec, Derivation(premise, tuple(steps), conclusion)
