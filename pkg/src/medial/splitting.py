"""Splittable fragments, shallow splitting, context reduction and the
elimination of splitting up-rules.

Shallow splitting decomposes a proof of (A0 a A1) b B into component
proofs by induction on the derivation, analysing the step adjacent to
the conclusion.  Unhandled step shapes raise IrreducibleCase instead of
guessing; the acceptance corpus must exercise none."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .derivations import (
    Builder,
    Derivation,
    DerivationError,
    Step,
    identity,
    step_cost,
    weak_units,
)
from .generators import atomic_deduction
from .systems import (
    Metavar,
    RuleInstance,
    Scheme,
    SystemSpec,
    ac_instance,
    eq_instance,
    eq_step_for,
)
from .terms import (
    Compound,
    Constant,
    Formula,
    Variable,
    equal_mod_ac,
    is_atom,
    join,
    negate,
    print_formula,
    replace_at,
    spine,
    subformula_at_sides,
)


class SplittingError(DerivationError):
    pass


class NotDownFragment(SplittingError):
    pass


class IrreducibleCase(SplittingError):
    pass


class FragmentError(SplittingError):
    pass


# ---------------------------------------------------------------------------
# Fragments


@dataclass(frozen=True)
class SplittableFragment:
    spec: SystemSpec
    weak: tuple  # ((beta, unit, co_unit), ...)
    down_rules: tuple  # splitting down-rule ids
    up_rules: tuple  # the corresponding splitting up-rule ids

    def units_for(self, beta: str) -> tuple:
        for b, u, nu in self.weak:
            if b == beta:
                return u, nu
        raise FragmentError(f"{beta} is not a weak relation of the fragment")


def make_fragment(spec: SystemSpec) -> SplittableFragment:
    """Validate the splittable down-fragment conditions and collect the
    down/up splitting rule lists."""
    issues = []
    pairs = weak_units(spec)
    if not pairs:
        issues.append("no weak relation with a unit")
    probe_a = Variable("w1")
    for beta, unit, co_unit in pairs:
        u, nu = Constant(unit), Constant(co_unit)
        if not (spec.is_associative(beta) and spec.is_commutative(beta)):
            issues.append(f"{beta} lacks associativity/commutativity")
        if eq_step_for(spec, Compound(beta, probe_a, u), probe_a) is None:
            issues.append(f"{beta} lacks its unit axiom")
        for const in sorted(spec.constants):
            lhs = Compound(beta, Constant(const), Constant(spec.negate_constant(const)))
            if eq_step_for(spec, lhs, nu) is None:
                issues.append(f"{beta} lacks constant annihilation at {const}")
        if eq_step_for(spec, Compound(beta, probe_a, Variable("w1", True)), nu) is None:
            issues.append(f"{beta} lacks variable annihilation")
        for rel in spec.relations:
            if spec.precedes(rel, beta):
                if eq_step_for(spec, Compound(rel, nu, nu), nu) is None:
                    issues.append(f"missing co-unit merge at {rel}")
    down = tuple(r.rule_id for r in spec.rules if r.scheme is Scheme.SPLIT_DOWN)
    if not down:
        issues.append("no splitting down-rules declared")
    up = []
    for r in spec.rules:
        if r.scheme is not Scheme.SPLIT_DOWN:
            continue
        mate = spec.rule_for(Scheme.SPLIT_UP, spec.dual(r.alpha), spec.dual(r.beta))
        if mate is not None:
            up.append(mate.rule_id)
    if issues:
        raise FragmentError("; ".join(issues))
    return SplittableFragment(spec, tuple(pairs), down, tuple(up))


def in_down_fragment(step: Step) -> bool:
    return step.rule.scheme in (Scheme.SPLIT_DOWN, Scheme.EQ_DOWN, Scheme.EQ_UP, Scheme.AC)


def first_up_index(frag: SplittableFragment, d: Derivation) -> Optional[int]:
    for i, step in enumerate(d.steps):
        if not in_down_fragment(step):
            return i
    return None


# ---------------------------------------------------------------------------
# Shallow splitting


@dataclass
class SplitRecord:
    alpha: str
    kind: str
    len_p: int
    len_q0: Optional[int]
    len_q1: Optional[int]

    @property
    def bound_holds(self) -> bool:
        if self.kind == "unitary":
            return (self.len_q0 or 0) + (self.len_q1 or 0) <= self.len_p
        if self.kind == "right_weakening":
            return (self.len_q0 or 0) <= self.len_p
        return (self.len_q1 or 0) <= self.len_p


@dataclass(frozen=True)
class SplitResult:
    kind: str
    alpha: str
    k0: Formula
    k1: Formula
    d: Derivation  # from (k0 ~alpha k1) to B
    q0: Optional[Derivation]  # from ~u_beta to (A0 beta k0)
    q1: Optional[Derivation]  # from ~u_beta to (A1 beta k1)


def _alpha_kind(spec: SystemSpec, alpha: str) -> str:
    rel = spec.relation(alpha)
    if rel.unitary is not None:
        return "unitary"
    if rel.right_weakening:
        return "right_weakening"
    if rel.left_weakening:
        return "left_weakening"
    raise IrreducibleCase(f"{alpha} is neither unitary nor a weakening")


def _delete(tree: Formula, occ: tuple) -> Formula:
    parent = occ[:-1]
    node = subformula_at_sides(tree, parent)
    sibling = node.right if occ[-1] == "L" else node.left
    return replace_at(tree, parent, sibling)


def _shallow(spec: SystemSpec, beta: str, tree: Formula, occ: tuple) -> bool:
    cur = tree
    for side in occ:
        if not isinstance(cur, Compound) or cur.rel != beta:
            return False
        cur = cur.left if side == "L" else cur.right
    return True


def _find_shallow_occ(spec: SystemSpec, beta: str, tree: Formula, node: Formula):
    """Some beta-shallow occurrence of an AC-equal copy of node."""

    def walk(f: Formula, prefix: tuple):
        if equal_mod_ac(spec, f, node):
            return prefix
        if isinstance(f, Compound) and f.rel == beta:
            for side, child in (("L", f.left), ("R", f.right)):
                got = walk(child, prefix + (side,))
                if got is not None:
                    return got
        return None

    return walk(tree, ())


def _find_aligned_occ(spec: SystemSpec, beta: str, tree: Formula, node: Formula):
    """A beta-shallow occurrence of node with the same top bipartition;
    returns (path, swapped) or None."""

    def walk(f: Formula, prefix: tuple):
        if isinstance(f, Compound) and f.rel == node.rel and equal_mod_ac(spec, f, node):
            if equal_mod_ac(spec, f.left, node.left):
                return prefix, False
            if spec.is_commutative(node.rel) and equal_mod_ac(spec, f.left, node.right):
                return prefix, True
        if isinstance(f, Compound) and f.rel == beta:
            for side, child in (("L", f.left), ("R", f.right)):
                got = walk(child, prefix + (side,))
                if got is not None:
                    return got
        return None

    return walk(tree, ())


def _is_prefix(a: tuple, b: tuple) -> bool:
    return b[: len(a)] == a


class _Splitter:
    def __init__(self, frag: SplittableFragment, beta: str, recorder: Optional[list]):
        self.frag = frag
        self.spec = frag.spec
        self.beta = beta
        unit, co_unit = frag.units_for(beta)
        self.u = Constant(unit)
        self.nu = Constant(co_unit)
        self.recorder = recorder
        self.calls = 0

    # -- helpers ----------------------------------------------------------
    def _validate_down(self, P: Derivation) -> None:
        for i, step in enumerate(P.steps):
            if not in_down_fragment(step):
                raise NotDownFragment(f"step {i} ({step.rule.rule_id}) is not a down rule")

    def _drop_last(self, P: Derivation) -> Derivation:
        last = P.steps[-1]
        return Derivation(P.premise, P.steps[:-1], last.before)

    def _reconcile(self, b: Builder, target: Formula, what: str) -> None:
        _steer_units(self.spec, self.beta, self.u, b, target, what)

    def _normalize(self, P: Derivation, occ: tuple, kind: str,
                   k0, k1, d, q0, q1) -> SplitResult:
        """Pin the result endpoints to this call's exact trees."""
        spec, beta = self.spec, self.beta
        C = P.conclusion
        node = subformula_at_sides(C, occ)
        alpha = node.rel
        btree = _delete(C, occ)

        def fix_q(q, a_part, k):
            if q is None:
                return None
            want = Compound(beta, a_part, k)
            if q.conclusion == want:
                return q
            b = Builder(spec, q.premise)
            b.splice((), q)
            return b.derivation(want)

        q0 = fix_q(q0, node.left, k0)
        q1 = fix_q(q1, node.right, k1)
        want_prem = Compound(spec.dual(alpha), k0, k1)
        steps = list(d.steps)
        if d.premise != want_prem:
            steps.insert(0, Step((), ac_instance(spec, want_prem, d.premise)))
        dd = Derivation(want_prem, tuple(steps), d.conclusion)
        if dd.conclusion != btree:
            b = Builder(spec, dd.premise)
            b.splice((), dd)
            self._reconcile(b, btree, "split remainder")
            dd = b.derivation(btree)
        if self.recorder is not None:
            pairs = weak_units(spec)
            rec = SplitRecord(
                alpha,
                kind,
                sum(step_cost(spec, pairs, s) for s in P.steps),
                sum(step_cost(spec, pairs, s) for s in q0.steps) if q0 else None,
                sum(step_cost(spec, pairs, s) for s in q1.steps) if q1 else None,
            )
            self.recorder.append(rec)
            if not rec.bound_holds:
                raise SplittingError(f"length bound violated: {rec}")
        return SplitResult(kind, alpha, k0, k1, dd, q0, q1)

    def _eq_rewrite(self, b: Builder, sides, target, what: str) -> None:
        try:
            b.rewrite(sides, target)
        except DerivationError as e:
            raise IrreducibleCase(f"{what}: {e}") from None

    # -- main recursion ----------------------------------------------------
    def split(self, P: Derivation, occ: tuple) -> SplitResult:
        self.calls += 1
        if self.calls > 200000:
            raise IrreducibleCase("splitting recursion exceeded its budget")
        spec, beta = self.spec, self.beta
        if occ == ():
            # pad: read the conclusion as (node beta u); the pad is applied
            # above the bottom step so the analysis sees a real step
            if not P.steps:
                raise IrreducibleCase("bare atomic premise cannot hold the split node")
            last = P.steps[-1]
            prev = last.before
            pad_rule = eq_step_for(spec, prev, Compound(beta, prev, self.u))
            if pad_rule is None:
                raise IrreducibleCase("no unit axiom to pad a bare conclusion")
            b = Builder(spec, P.premise)
            b.splice((), self._drop_last(P))
            b.apply((), pad_rule)
            b.acr((), Compound(beta, prev, self.u))
            b.apply(("L",) + tuple(last.sides), last.rule)
            return self.split(b.derivation(), ("L",))
        C = P.conclusion
        node = subformula_at_sides(C, occ)
        if not isinstance(node, Compound):
            raise IrreducibleCase(f"split position holds an atom: {node}")
        if not _shallow(spec, beta, C, occ):
            raise IrreducibleCase("split position is not shallow")
        alpha = node.rel
        if not spec.precedes(alpha, beta):
            raise IrreducibleCase(f"{alpha} is not strictly below {beta}")
        kind = _alpha_kind(spec, alpha)
        if not P.steps:
            raise IrreducibleCase("the co-unit premise contains no split node")
        sigma = P.steps[-1]
        P1 = self._drop_last(P)
        p = tuple(sigma.sides)
        rule = sigma.rule

        if rule.scheme is Scheme.AC:
            if P1.steps and P1.steps[-1].rule.scheme is Scheme.AC:
                # merge adjacent rearrangements so the node stays verbatim
                prev = P1.steps[-1]
                merged = Step((), ac_instance(spec, prev.before, P.conclusion))
                return self.split(
                    Derivation(
                        P.premise, P1.steps[:-1] + (merged,), P.conclusion
                    ),
                    occ,
                )
            found = _find_aligned_occ(spec, beta, P1.conclusion, node)
            if found is not None:
                occ2, swapped = found
                res = self.split(P1, occ2)
                if swapped:
                    k0, k1, q0, q1 = res.k1, res.k0, res.q1, res.q0
                else:
                    k0, k1, q0, q1 = res.k0, res.k1, res.q0, res.q1
                return self._normalize(P, occ, kind, k0, k1, res.d, q0, q1)
            return self._regrouped(P, P1, occ, node, kind)

        occ_l = occ + ("L",)
        occ_r = occ + ("R",)
        if _is_prefix(occ_l, p):
            return self._inside_component(P, P1, occ, sigma, kind, side="L")
        if _is_prefix(occ_r, p):
            return self._inside_component(P, P1, occ, sigma, kind, side="R")
        if p == occ:
            if rule.scheme in (Scheme.EQ_DOWN, Scheme.EQ_UP):
                return self._at_node_eq(P, P1, occ, sigma, kind)
            raise IrreducibleCase(f"{rule.rule_id} rewrites the split node directly")
        if _is_prefix(p, occ):
            if rule.scheme is Scheme.SPLIT_DOWN:
                return self._under_split_down(P, P1, occ, sigma, kind)
            if rule.scheme in (Scheme.EQ_DOWN, Scheme.EQ_UP):
                return self._under_eq(P, P1, occ, sigma, kind)
            raise IrreducibleCase(f"{rule.rule_id} above the split node")
        return self._disjoint(P, P1, occ, sigma, kind)

    def _regrouped(self, P, P1, occ, node, kind) -> SplitResult:
        """A rearrangement step regrouped the node's spine: atomize a
        class-equal occurrence into per-element proofs and rejoin them
        following the designated reading's grouping."""
        spec, beta = self.spec, self.beta
        alpha = node.rel
        na = spec.dual(alpha)
        if not spec.is_associative(alpha) or kind != "unitary":
            # one-sided (weakening) splits cannot be re-elementised
            raise IrreducibleCase("AC step scrambles the split components")
        occ2 = _find_shallow_occ(spec, beta, P1.conclusion, node)
        if occ2 is None:
            raise IrreducibleCase("AC step hides the split node")
        t = subformula_at_sides(P1.conclusion, occ2)
        qb = Builder(spec, P1.premise)
        qb.splice((), P1)
        base = qb.derivation(Compound(beta, t, _delete(P1.conclusion, occ2)))
        by_class: dict = {}  # element class -> [(id, q, K)], leftmost first
        chain: list = []  # (left_id, right_id, parent_id, remainder), bottom-up
        counter = [0]

        def fresh() -> int:
            counter[0] += 1
            return counter[0]

        def atomize(q: Derivation, tree: Formula):
            if not (isinstance(tree, Compound) and tree.rel == alpha):
                k = subformula_at_sides(q.conclusion, ("R",))
                bid = fresh()
                by_class.setdefault(_ac_key(spec, tree), []).append((bid, q, k))
                return k, bid
            r = self.split(q, ("L",))
            _, lid = atomize(r.q0, tree.left)
            _, rid = atomize(r.q1, tree.right)
            pid = fresh()
            chain.append((lid, rid, pid, r.d))
            return r.d.conclusion, pid

        atomize(base, t)
        used: list = []  # (id, K) in reading order

        def rejoin(tree: Formula):
            """Proof of (tree beta K) following the reading's grouping."""
            if not (isinstance(tree, Compound) and tree.rel == alpha):
                entries = by_class.get(_ac_key(spec, tree))
                if not entries:
                    raise IrreducibleCase("regrouped spine lost an element")
                bid, q, k = entries.pop(0)
                used.append((bid, k))
                return q, k
            ql, kl = rejoin(tree.left)
            qr, kr = rejoin(tree.right)
            b = Builder(spec, self.nu)
            self._eq_rewrite(b, (), Compound(alpha, self.nu, self.nu),
                             "co-unit merge for regrouping")
            b.splice(("L",), ql)
            b.splice(("R",), qr)
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN,
                dict(A=tree.left, B=kl, C=tree.right, D=kr), alpha, beta,
            )
            k = Compound(na, kl, kr)
            return b.derivation(Compound(beta, tree, k)), k

        q0, k0 = rejoin(node.left)
        q1, k1 = rejoin(node.right)
        # close the remainder: merge element remainders back along the
        # original grouping, then hand over to the base split's remainder
        blocks = list(used)  # (id, K); reading order equals spine order
        d = Builder(spec, Compound(na, k0, k1))
        for lid, rid, pid, rem in chain:
            li = next(i for i, (bid, _) in enumerate(blocks) if bid == lid)
            ri = next(i for i, (bid, _) in enumerate(blocks) if bid == rid)
            if ri != li + 1:
                raise IrreducibleCase("regrouped spine remainder out of order")
            pair = Compound(na, blocks[li][1], blocks[ri][1])
            arranged = (
                join(na, [k for _, k in blocks[:li]] + [pair]
                     + [k for _, k in blocks[ri + 1 :]])
            )
            d.acr((), arranged)
            pos = ("R",) * li + (("L",) if ri < len(blocks) - 1 else ())
            d.splice(pos, rem)
            blocks[li : ri + 1] = [(pid, rem.conclusion)]
        return self._normalize(P, occ, kind, k0, k1, d.derivation(), q0, q1)

    # -- cases -------------------------------------------------------------
    def _inside_component(self, P, P1, occ, sigma, kind, side) -> SplitResult:
        spec, beta = self.spec, self.beta
        res = self.split(P1, occ)
        rel_path = tuple(sigma.sides)[len(occ) + 1 :]
        q0, q1 = res.q0, res.q1
        if side == "L" and q0 is not None:
            b = Builder(spec, q0.premise)
            b.splice((), q0)
            b.apply(("L",) + rel_path, sigma.rule)
            q0 = b.derivation()
        if side == "R" and q1 is not None:
            b = Builder(spec, q1.premise)
            b.splice((), q1)
            b.apply(("L",) + rel_path, sigma.rule)
            q1 = b.derivation()
        return self._normalize(P, occ, kind, res.k0, res.k1, res.d, q0, q1)

    def _make_pair_proof(self, atom: Formula) -> Derivation:
        """~u_beta -> (atom beta ~atom) for an atomic literal or constant."""
        spec, beta = self.spec, self.beta
        b = Builder(spec, self.nu)
        self._eq_rewrite(b, (), Compound(beta, atom, negate(spec, atom)),
                         "annihilation axiom for the split component")
        return b.derivation()

    def _at_node_eq(self, P, P1, occ, sigma, kind) -> SplitResult:
        spec, beta = self.spec, self.beta
        node = sigma.rule.conclusion
        a0, a1 = node.left, node.right
        alpha = node.rel
        na = spec.dual(alpha)
        s_pre = sigma.rule.premise
        btree = _delete(P.conclusion, occ)

        if is_atom(s_pre) and s_pre not in (a0, a1):
            if not (is_atom(a0) and is_atom(a1)):
                raise IrreducibleCase("atomic creation with compound components")
            k0, k1 = negate(spec, a0), negate(spec, a1)
            q0 = self._make_pair_proof(a0)
            q1 = self._make_pair_proof(a1)
            d = Builder(spec, Compound(na, k0, k1))
            flipped = eq_instance(
                spec,
                sigma.rule.axiom_id,
                dict(sigma.rule.bindings),
                negated=not sigma.rule.negated,
                direction="bwd" if sigma.rule.direction == "fwd" else "fwd",
            )
            d.apply((), flipped)  # ~node -> ~s_pre
            pad = Builder(spec, P1.premise)
            pad.splice((), P1)
            padded = pad.derivation(Compound(beta, s_pre, btree))
            d.splice((), atomic_deduction(spec, beta, s_pre, btree, padded))
            return self._normalize(P, occ, kind, k0, k1, d.derivation(), q0, q1)

        if s_pre == a0 or s_pre == a1:
            # unit or weakening expansion at the node; the kept side is read
            # off the axiom patterns (the components may be equal formulas)
            ax = spec.axioms_by_id[sigma.rule.axiom_id]
            pl, pr = ax.lhs, ax.rhs
            if sigma.rule.negated:
                pl, pr = negate(spec, pl), negate(spec, pr)
            pp, pc = (pl, pr) if sigma.rule.direction == "fwd" else (pr, pl)
            if isinstance(pc, Compound) and pc.left == pp:
                held = "L"
            elif isinstance(pc, Compound) and pc.right == pp:
                held = "R"
            else:
                held = "L" if s_pre == a0 else "R"
            kept, other = (a0, a1) if held == "L" else (a1, a0)
            qb = Builder(spec, P1.premise)
            qb.splice((), P1)
            q_kept = qb.derivation(Compound(beta, kept, btree))
            if kind == "unitary":
                if other != Constant(spec.relation(alpha).unitary) or other != self.nu:
                    raise IrreducibleCase("unit expansion with a non-co-unit unit")
                if na != beta:
                    raise IrreducibleCase("unitary split needs the dual weak relation")
                k_other = self.u
                ob = Builder(spec, self.nu)
                self._eq_rewrite(ob, (), Compound(beta, other, self.u), "unit padding")
                q_other = ob.derivation()
                d = Builder(
                    spec,
                    Compound(na, btree, k_other)
                    if held == "L"
                    else Compound(na, k_other, btree),
                )
                d.acr((), Compound(beta, btree, self.u))
                self._eq_rewrite(d, (), btree, "unit removal")
            elif (kind == "right_weakening" and held == "L") or (
                kind == "left_weakening" and held == "R"
            ):
                k_other = other
                q_other = None
                d = Builder(
                    spec,
                    Compound(na, btree, other)
                    if held == "L"
                    else Compound(na, other, btree),
                )
                self._eq_rewrite(d, (), btree, "weakening erasure")
            else:
                raise IrreducibleCase("expansion on the erased side of a weakening")
            if held == "L":
                return self._normalize(
                    P, occ, kind, btree, k_other, d.derivation(), q_kept, q_other
                )
            return self._normalize(
                P, occ, kind, k_other, btree, d.derivation(), q_other, q_kept
            )
        # wrapping equations (a bare metavariable conclusion pattern) are
        # handled by the generic relocation
        return self._under_eq(P, P1, occ, sigma, kind)

    def _under_split_down(self, P, P1, occ, sigma, kind) -> SplitResult:
        spec, beta = self.spec, self.beta
        rule = sigma.rule
        a2, b2 = rule.relations
        if b2 != beta:
            raise IrreducibleCase("splitting step over a foreign weak relation")
        p = tuple(sigma.sides)
        rel = occ[len(p) :]
        X = rule.binding("A")
        Y = rule.binding("B")
        Z = rule.binding("C")
        W = rule.binding("D")
        node = subformula_at_sides(P.conclusion, occ)
        alpha = node.rel
        na = spec.dual(alpha)
        if rel == ("L",):
            if a2 != alpha:
                raise IrreducibleCase("inner relation of the split step differs")
            res = self.split(P1, p)
            k0 = Compound(beta, Y, res.k0)
            k1 = Compound(beta, W, res.k1)
            d = Builder(spec, Compound(na, k0, k1))
            if na == beta:
                d.acr(
                    (),
                    Compound(
                        beta, Compound(na, Y, W), Compound(beta, res.k0, res.k1)
                    ),
                )
                d.splice(("R",), res.d)
            elif na == alpha and spec.precedes(na, beta):
                d.apply_scheme(
                    (), Scheme.SPLIT_DOWN,
                    dict(A=Y, B=res.k0, C=W, D=res.k1), na, beta,
                )
                d.splice(("R",), res.d)
            else:
                raise IrreducibleCase("dual relation unusable under the split node")
            return self._normalize(P, occ, kind, k0, k1, d.derivation(), res.q0, res.q1)
        if rel == ("R",):
            if spec.dual(a2) != alpha:
                raise IrreducibleCase("inner relation of the split step differs")
            res = self.split(P1, p)
            k0 = Compound(beta, X, res.k0)
            k1 = Compound(beta, Z, res.k1)
            # the recursion split at a2 whose kind decides which proof exists
            q0 = res.q0
            q1 = res.q1
            d = Builder(spec, Compound(na, k0, k1))
            if not spec.precedes(na, beta):
                raise IrreducibleCase("dual relation unusable under the split node")
            d.apply_scheme(
                (), Scheme.SPLIT_DOWN, dict(A=X, B=res.k0, C=Z, D=res.k1), na, beta
            )
            d.splice(("R",), res.d)
            nq0 = None
            nq1 = None
            if q0 is not None:
                nb = Builder(spec, q0.premise)
                nb.splice((), q0)
                nq0 = nb.derivation(Compound(beta, Y, k0))
            if q1 is not None:
                nb = Builder(spec, q1.premise)
                nb.splice((), q1)
                nq1 = nb.derivation(Compound(beta, W, k1))
            return self._normalize(P, occ, kind, k0, k1, d.derivation(), nq0, nq1)
        if rel[0] == "R" and spec.dual(a2) == beta:
            return self._spine_split(P, P1, occ, sigma, kind, rel)
        raise IrreducibleCase("split node buried by a splitting step")

    def _spine_split(self, P, P1, occ, sigma, kind, rel) -> SplitResult:
        """The bottom step merges (X b Y) ~b (Z b W) into the spine and the
        split node sits inside Y or W."""
        spec, beta = self.spec, self.beta
        rule = sigma.rule
        p = tuple(sigma.sides)
        nb = rule.relations[0]  # == dual(beta)
        X = rule.binding("A")
        Y = rule.binding("B")
        Z = rule.binding("C")
        W = rule.binding("D")
        res1 = self.split(P1, p)
        in_y = rel[1] == "L"
        host = res1.q0 if in_y else res1.q1
        other = res1.q1 if in_y else res1.q0
        k_host = res1.k0 if in_y else res1.k1
        k_other = res1.k1 if in_y else res1.k0
        if host is None or other is None:
            raise IrreducibleCase("spine split lost a component proof")
        occ2 = ("L", "R") + rel[2:]
        res2 = self.split(host, occ2)
        keep, away = (X, (Z, W)) if in_y else (Z, (X, Y))
        d = Builder(spec, res2.d.premise)
        d.splice((), res2.d)
        # conclusion: (keep b partdel) b k_host, or (keep b k_host) if the
        # whole component was the split node
        cur = d.current
        if isinstance(cur, Compound) and cur.rel == beta and cur.left == keep:
            kpath = ("L",)
        elif (
            isinstance(cur, Compound)
            and cur.rel == beta
            and isinstance(cur.left, Compound)
            and cur.left.left == keep
        ):
            kpath = ("L", "L")
        else:
            kpath = _find_shallow_occ(spec, beta, cur, keep)
            if kpath is None:
                raise IrreducibleCase("lost the kept component in a spine split")
        self._eq_rewrite(d, kpath, Compound(nb, keep, self.nu), "co-unit padding")
        d.splice(kpath + ("R",), other)
        za, zb = away
        d.acr(kpath + ("R",), Compound(beta, za, Compound(beta, zb, k_other)))
        self._eq_rewrite(d, kpath + ("L",), Compound(beta, keep, self.u), "unit padding")
        d.apply_scheme(
            kpath, Scheme.SPLIT_DOWN,
            dict(A=keep, B=self.u, C=za, D=Compound(beta, zb, k_other)), nb, beta,
        )
        # drop the unit introduced above, regroup, close with the outer proof
        rest = list(spine(spec, d.current, beta))
        rest.remove(self.u)
        self._eq_rewrite_drop_unit(d, rest)
        d.acr((), self._arrange_with_pair(d.current, res1.k0, res1.k1))
        d.splice(("R",), res1.d)
        return self._normalize(
            P, occ, kind, res2.k0, res2.k1, d.derivation(), res2.q0, res2.q1
        )

    def _eq_rewrite_drop_unit(self, d: Builder, rest: list) -> None:
        spec, beta = self.spec, self.beta
        keep = join(beta, rest)
        d.acr((), Compound(beta, keep, self.u))
        self._eq_rewrite(d, (), keep, "unit removal")

    def _arrange_with_pair(self, cur: Formula, k0: Formula, k1: Formula) -> Formula:
        """Arrange cur as (rest b (k0 b k1)) so an outer proof can continue."""
        spec, beta = self.spec, self.beta
        elems = list(spine(spec, cur, beta))
        for k in (k0, k1):
            for part in spine(spec, k, beta):
                for i, e in enumerate(elems):
                    if equal_mod_ac(spec, e, part):
                        del elems[i]
                        break
                else:
                    raise IrreducibleCase("missing component remainder in spine split")
        if not elems:
            raise IrreducibleCase("spine split left no remainder")
        return Compound(beta, join(beta, elems), Compound(beta, k0, k1))

    def _under_eq(self, P, P1, occ, sigma, kind) -> SplitResult:
        spec, beta = self.spec, self.beta
        rule = sigma.rule
        p = tuple(sigma.sides)
        rel = occ[len(p) :]
        ax = spec.axioms_by_id[rule.axiom_id]
        pl, pr = ax.lhs, ax.rhs
        if rule.negated:
            pl, pr = negate(spec, pl), negate(spec, pr)
        pp, pc = (pl, pr) if rule.direction == "fwd" else (pr, pl)
        bindings = dict(rule.bindings)
        # descend the conclusion pattern along rel to the carrying metavar
        pat = pc
        depth = 0
        while depth < len(rel) and isinstance(pat, Compound):
            pat = pat.left if rel[depth] == "L" else pat.right
            depth += 1
        if not isinstance(pat, Metavar) or pat.negated or pat.sort != "formula":
            # the node may be the kept side of an erasing weakening
            return self._triad(P, P1, occ, sigma, kind)
        m_name = pat.name
        r_m = rel[depth:]
        pre_occs = _metavar_paths(pp, m_name)
        con_occs = _metavar_paths(pc, m_name)
        if len(pre_occs) != 1 or len(con_occs) != 1:
            return self._triad(P, P1, occ, sigma, kind)
        occ2 = p + pre_occs[0] + r_m
        if not _shallow(spec, beta, P1.conclusion, occ2):
            return self._triad(P, P1, occ, sigma, kind)
        res = self.split(P1, occ2)
        # patch d from the recursion's remainder to delete(C, occ)
        btree = _delete(P.conclusion, occ)
        bhat = res.d.conclusion
        d = Builder(spec, res.d.premise)
        d.splice((), res.d)
        if r_m == ():
            # the step wrapped or unwrapped the whole node; fix the unit
            extra = _element_diff(spec, beta, btree, bhat)
            if extra == [self.u]:
                self._eq_rewrite(d, (), Compound(beta, d.current, self.u), "unit padding")
            elif extra == []:
                missing = _element_diff(spec, beta, bhat, btree)
                if missing == [self.u]:
                    rest = list(spine(spec, d.current, beta))
                    rest.remove(self.u)
                    self._eq_rewrite_drop_unit(d, rest)
                elif missing:
                    raise IrreducibleCase("node wrapper changes non-unit material")
            else:
                raise IrreducibleCase("node wrapper changes non-unit material")
        else:
            new_binding = dict(bindings)
            new_binding[m_name] = _delete(bindings[m_name], r_m)
            patched = eq_instance(
                spec, rule.axiom_id, new_binding, rule.negated, rule.direction
            )
            p2 = _relocate_after_delete(p, occ2)
            d.apply(p2, patched)
        return self._normalize(P, occ, kind, res.k0, res.k1, d.derivation(), res.q0, res.q1)

    def _triad(self, P, P1, occ, sigma, kind) -> SplitResult:
        """Erasing weakening above the node: split at the erased relation,
        then split the kept component (the paper's weakening case triad)."""
        spec, beta = self.spec, self.beta
        rule = sigma.rule
        p = tuple(sigma.sides)
        s_pre, s_con = rule.premise, rule.conclusion
        if not isinstance(s_pre, Compound):
            raise IrreducibleCase("unrecognised step above the split node")
        gamma = s_pre.rel
        if s_con == s_pre.left:
            kept_side = "L"
        elif s_con == s_pre.right:
            kept_side = "R"
        else:
            raise IrreducibleCase("unrecognised step above the split node")
        if not spec.precedes(gamma, beta):
            raise IrreducibleCase(f"erasing relation {gamma} is not below {beta}")
        res1 = self.split(P1, p)
        host = res1.q0 if kept_side == "L" else res1.q1
        if host is None:
            raise IrreducibleCase("erasure kept the unprovable side")
        rel = occ[len(p) :]
        occ2 = ("L",) + rel
        res2 = self.split(host, occ2)
        # d: from res2 premise through the kept remainder, re-expanding the
        # erased side, to the outer remainder
        k_kept = res1.k0 if kept_side == "L" else res1.k1
        d = Builder(spec, res2.d.premise)
        d.splice((), res2.d)
        kpos = _find_element(spec, beta, d.current, k_kept)
        if kpos is None:
            raise IrreducibleCase("lost the component remainder after erasure")
        ng = spec.dual(gamma)
        if kept_side == "L":
            self._eq_rewrite(d, kpos, Compound(ng, k_kept, res1.k1), "re-expansion")
        else:
            self._eq_rewrite(d, kpos, Compound(ng, res1.k0, k_kept), "re-expansion")
        d.splice(kpos, res1.d)
        return self._normalize(P, occ, kind, res2.k0, res2.k1, d.derivation(), res2.q0, res2.q1)

    def _disjoint(self, P, P1, occ, sigma, kind) -> SplitResult:
        spec = self.spec
        res = self.split(P1, occ)
        p = tuple(sigma.sides)
        p2 = _relocate_after_delete(p, occ)
        d = Builder(spec, res.d.premise)
        d.splice((), res.d)
        d.apply(p2, sigma.rule)
        return self._normalize(P, occ, kind, res.k0, res.k1, d.derivation(), res.q0, res.q1)


def _metavar_paths(pattern: Formula, name: str, prefix: tuple = ()) -> list:
    out = []
    if isinstance(pattern, Metavar) and pattern.name == name and not pattern.negated:
        out.append(prefix)
    elif isinstance(pattern, Compound):
        out.extend(_metavar_paths(pattern.left, name, prefix + ("L",)))
        out.extend(_metavar_paths(pattern.right, name, prefix + ("R",)))
    return out


def _relocate_after_delete(p: tuple, occ: tuple) -> tuple:
    """Adjust a path disjoint from occ after deleting occ's element."""
    anchor = occ[:-1]
    if p[: len(anchor)] == anchor and len(p) > len(anchor):
        sibling_side = "R" if occ[-1] == "L" else "L"
        if p[len(anchor)] == sibling_side:
            return anchor + p[len(anchor) + 1 :]
    return p


def _ac_key(spec: SystemSpec, f: Formula) -> Formula:
    from .terms import ac_canonical

    return ac_canonical(spec, f)


def _steer_units(spec: SystemSpec, beta: str, u: Formula, b: Builder,
                 target: Formula, what: str) -> None:
    """Steer the builder's formula to target, padding or dropping unit
    elements where padded sub-derivations introduced them."""
    for _ in range(64):
        if equal_mod_ac(spec, b.current, target):
            b.acr((), target)
            return
        extra = _element_diff(spec, beta, b.current, target)
        missing = _element_diff(spec, beta, target, b.current)
        if extra and all(e == u for e in extra):
            rest = list(spine(spec, b.current, beta))
            rest.remove(u)
            keep = join(beta, rest)
            b.acr((), Compound(beta, keep, u))
            inst = eq_step_for(spec, Compound(beta, keep, u), keep)
            if inst is None:
                raise IrreducibleCase(f"{what}: no unit axiom")
            b.apply((), inst)
            continue
        if missing and all(e == u for e in missing):
            inst = eq_step_for(spec, b.current, Compound(beta, b.current, u))
            if inst is None:
                raise IrreducibleCase(f"{what}: no unit axiom")
            b.apply((), inst)
            continue
        raise IrreducibleCase(
            f"{what}: cannot reconcile {print_formula(b.current)} "
            f"with {print_formula(target)}"
        )
    raise IrreducibleCase(f"{what}: reconciliation did not converge")


def _element_diff(spec: SystemSpec, beta: str, big: Formula, small: Formula) -> list:
    """Multiset difference of beta-spine elements (AC-canonical keys)."""
    from .terms import ac_canonical

    big_elems = [ac_canonical(spec, e) for e in spine(spec, big, beta)]
    small_elems = [ac_canonical(spec, e) for e in spine(spec, small, beta)]
    for e in small_elems:
        if e in big_elems:
            big_elems.remove(e)
    return big_elems


def _find_element(spec: SystemSpec, beta: str, tree: Formula, wanted: Formula):
    """Exact subtree occurrence of wanted placed under beta nodes only."""

    def walk(f: Formula, prefix: tuple):
        if f == wanted:
            return prefix
        if isinstance(f, Compound) and f.rel == beta:
            for side, child in (("L", f.left), ("R", f.right)):
                got = walk(child, prefix + (side,))
                if got is not None:
                    return got
        return None

    return walk(tree, ())


def shallow_split(
    frag: SplittableFragment,
    P: Derivation,
    occ: Sequence[str],
    recorder: Optional[list] = None,
) -> SplitResult:
    """Split a proof of (A0 a A1) b B (the a-node designated by occ) into
    component proofs and a remainder derivation, per the shallow splitting
    theorem; the length bounds are asserted on every recursive call."""
    from .derivations import exactify

    beta = None
    for b, _, nu in frag.weak:
        if P.premise == Constant(nu):
            beta = b
            break
    if beta is None:
        raise NotDownFragment("shallow splitting expects a proof from a co-unit")
    splitter = _Splitter(frag, beta, recorder)
    splitter._validate_down(P)
    return splitter.split(exactify(frag.spec, P), tuple(occ))


# ---------------------------------------------------------------------------
# Context reduction

HOLE = Variable("_")


def _subst_hole(spec: SystemSpec, f: Formula, x: Formula) -> Formula:
    if isinstance(f, Variable) and f.name == "_":
        return negate(spec, x) if f.negated else x
    if isinstance(f, Compound):
        return Compound(
            f.rel, _subst_hole(spec, f.left, x), _subst_hole(spec, f.right, x)
        )
    return f


def instantiate_hole(spec: SystemSpec, d: Derivation, x: Formula) -> Derivation:
    """Plug a formula into every hole occurrence of a context derivation."""
    from dataclasses import replace as _replace
    from .terms import PathStep

    def fix_rule(rule: RuleInstance) -> RuleInstance:
        return _replace(
            rule,
            premise=_subst_hole(spec, rule.premise, x),
            conclusion=_subst_hole(spec, rule.conclusion, x),
            bindings=tuple(
                (k, _subst_hole(spec, v, x)) for k, v in rule.bindings
            ),
        )

    steps = tuple(
        Step(
            tuple(
                PathStep(p.rel, p.hole_side, _subst_hole(spec, p.sibling, x))
                for p in s.context
            ),
            fix_rule(s.rule),
        )
        for s in d.steps
    )
    return Derivation(
        _subst_hole(spec, d.premise, x), steps, _subst_hole(spec, d.conclusion, x)
    )


@dataclass(frozen=True)
class ContextReduction:
    k: Formula
    hole: Formula  # the distinguished hole symbol (the context H is trivial)
    provable_witness: Derivation  # H{~u_beta} -> ~u_beta
    ctx: Derivation  # from (HOLE beta K) to S{HOLE}
    q: Derivation  # from ~u_beta to (A beta K)


def context_reduce(
    frag: SplittableFragment,
    P: Derivation,
    hole_sides: Sequence[str],
    recorder: Optional[list] = None,
) -> ContextReduction:
    """Reduce a proof of S{A} to a proof of A beta K plus a hole-uniform
    derivation rebuilding S{ } around { } beta K."""
    from .derivations import exactify

    spec = frag.spec
    P = exactify(spec, P)
    hole_sides = tuple(hole_sides)
    beta = None
    for b_, _, nu_ in frag.weak:
        if P.premise == Constant(nu_):
            beta = b_
            break
    if beta is None:
        raise NotDownFragment("context reduction expects a proof from a co-unit")
    unit, co_unit = frag.units_for(beta)
    u, nu = Constant(unit), Constant(co_unit)
    C = P.conclusion
    hole_formula = subformula_at_sides(C, hole_sides)

    depth = None
    cur = C
    for i, side in enumerate(hole_sides):
        if not (isinstance(cur, Compound) and cur.rel == beta):
            depth = i
            break
        cur = cur.left if side == "L" else cur.right

    if depth is None:
        if hole_sides == ():
            qb = Builder(spec, P.premise)
            qb.splice((), P)
            inst = eq_step_for(spec, C, Compound(beta, C, u))
            if inst is None:
                raise IrreducibleCase("no unit axiom to pad the shallow case")
            qb.apply((), inst)
            q = qb.derivation(Compound(beta, C, u))
            cb = Builder(spec, Compound(beta, HOLE, u))
            drop = eq_step_for(spec, Compound(beta, HOLE, u), HOLE)
            if drop is None:
                raise IrreducibleCase("no unit axiom to close the shallow case")
            cb.apply((), drop)
            return ContextReduction(u, HOLE, identity(HOLE), cb.derivation(HOLE), q)
        k = _delete(C, hole_sides)
        qb = Builder(spec, P.premise)
        qb.splice((), P)
        q = qb.derivation(Compound(beta, hole_formula, k))
        cb = Builder(spec, Compound(beta, HOLE, k))
        cb.acr((), replace_at(C, hole_sides, HOLE))
        return ContextReduction(k, HOLE, identity(HOLE), cb.derivation(), q)

    pi0 = hole_sides[:depth]
    enode = subformula_at_sides(C, pi0)
    delta = enode.rel
    side = hole_sides[depth]
    split = shallow_split(frag, P, pi0, recorder)
    if split.kind == "unitary":
        host = split.q0 if side == "L" else split.q1
    elif split.kind == "right_weakening":
        host = split.q0 if side == "L" else None
    else:
        host = split.q1 if side == "R" else None
    if host is None:
        raise IrreducibleCase("hole under the erased side of a weakening")
    rec = context_reduce(frag, host, ("L",) + hole_sides[depth + 1 :], recorder)

    e0, e1 = enode.left, enode.right
    inner = hole_sides[depth + 1 :]
    s_h = replace_at(e0 if side == "L" else e1, inner, HOLE)
    b = Builder(spec, rec.ctx.premise)
    b.splice((), rec.ctx)
    nb = spec.dual(beta)
    if split.kind == "unitary":
        if delta != nb:
            raise IrreducibleCase("unitary context node is not the dual weak relation")
        other = split.q1 if side == "L" else split.q0
        b.rewrite((), Compound(nb, b.current, nu))
        b.splice(("R",), other)
        if side == "L":
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN,
                dict(A=s_h, B=split.k0, C=e1, D=split.k1), nb, beta,
            )
        else:
            b.acr(
                (),
                Compound(
                    nb,
                    Compound(beta, e0, split.k0),
                    Compound(beta, s_h, split.k1),
                ),
            )
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN,
                dict(A=e0, B=split.k0, C=s_h, D=split.k1), nb, beta,
            )
    elif split.kind == "right_weakening":
        b.rewrite(
            (), Compound(delta, b.current, Compound(beta, e1, split.k1))
        )
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN,
            dict(A=s_h, B=split.k0, C=e1, D=split.k1), delta, beta,
        )
    else:
        b.rewrite(
            (), Compound(delta, Compound(beta, e0, split.k0), b.current)
        )
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN,
            dict(A=e0, B=split.k0, C=s_h, D=split.k1), delta, beta,
        )
    b.splice(("R",), split.d)
    _steer_units(spec, beta, u, b, replace_at(C, hole_sides, HOLE), "context rebuild")
    return ContextReduction(rec.k, HOLE, identity(HOLE), b.derivation(), rec.q)


# ---------------------------------------------------------------------------
# Elimination of splitting up-rules


def eliminate_up_step(
    frag: SplittableFragment, P: Derivation, recorder: Optional[list] = None
) -> Derivation:
    """Remove the up-rule step nearest the premise, per the admissibility
    theorem (context reduction, two layers of shallow splitting, and the
    reassembly derivation)."""
    from .derivations import exactify

    spec = frag.spec
    P = exactify(spec, P)
    i = first_up_index(frag, P)
    if i is None:
        return P
    sigma = P.steps[i]
    if sigma.rule.scheme is not Scheme.SPLIT_UP or sigma.rule.rule_id not in frag.up_rules:
        raise NotDownFragment(f"cannot eliminate step {sigma.rule.rule_id}")
    above = Derivation(P.premise, P.steps[:i], sigma.before)
    below = P.steps[i + 1 :]

    # a redex inside weakening junk is rewritten away without splitting
    for j, cstep in enumerate(sigma.context):
        r = spec.relation(cstep.rel)
        erased = (r.right_weakening and cstep.hole_side == "R") or (
            r.left_weakening and cstep.hole_side == "L"
        )
        if erased:
            prefix = tuple(sigma.sides)[:j]
            gpost = subformula_at_sides(sigma.after, prefix)
            b = Builder(spec, P.premise)
            b.splice((), above)
            b.rewrite(prefix, cstep.sibling)
            b.rewrite(prefix, gpost)
            return Derivation(
                P.premise, tuple(b.steps) + tuple(below), P.conclusion
            )

    cr = context_reduce(frag, above, tuple(sigma.sides), recorder)
    gamma, alpha_t = sigma.rule.relations
    beta = None
    for b_, _, nu_ in frag.weak:
        if P.premise == Constant(nu_):
            beta = b_
    unit, co_unit = frag.units_for(beta)
    u, nu = Constant(unit), Constant(co_unit)
    if spec.dual(alpha_t) != beta:
        raise IrreducibleCase("up-rule over a relation without the weak dual")
    t_a = sigma.rule.binding("A")
    t_b = sigma.rule.binding("C")
    t_c = sigma.rule.binding("B")
    t_d = sigma.rule.binding("D")
    r_target = sigma.rule.conclusion

    split1 = shallow_split(frag, cr.q, ("L",), recorder)
    q1, q2, dp = split1.q0, split1.q1, split1.d
    k1f, k2f = split1.k0, split1.k1
    rel = spec.relation(gamma)
    b = Builder(spec, nu)

    if rel.right_weakening or rel.left_weakening:
        split2 = shallow_split(frag, q1, ("L",), recorder)
        split3 = shallow_split(frag, q2, ("L",), recorder)
        ka, kb = split2.k0, split2.k1
        kc, kd = split3.k0, split3.k1
        x1 = Compound(alpha_t, t_a, t_c)
        x2 = Compound(alpha_t, t_b, t_d)
        j1 = Compound(beta, ka, kc)
        j2 = Compound(beta, kb, kd)
        b.rewrite((), Compound(alpha_t, nu, nu))
        if rel.right_weakening:
            b.splice(("L",), split2.q0)
            b.splice(("R",), split3.q0)
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN, dict(A=t_a, B=ka, C=t_c, D=kc), alpha_t, beta
            )
            b.rewrite((), Compound(gamma, b.current, Compound(beta, x2, j2)))
        else:
            b.splice(("L",), split2.q1)
            b.splice(("R",), split3.q1)
            b.apply_scheme(
                (), Scheme.SPLIT_DOWN, dict(A=t_b, B=kb, C=t_d, D=kd), alpha_t, beta
            )
            b.rewrite((), Compound(gamma, Compound(beta, x1, j1), b.current))
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN, dict(A=x1, B=j1, C=x2, D=j2), gamma, beta
        )
        b.apply_scheme(
            ("R",), Scheme.SPLIT_DOWN,
            dict(A=ka, B=kc, C=kb, D=kd), spec.dual(gamma), beta,
        )
        b.splice(("R", "L"), split2.d)
        b.splice(("R", "R"), split3.d)
        b.splice(("R",), dp)
    elif gamma == beta:
        nb = spec.dual(beta)
        split3 = shallow_split(frag, q2, ("L",), recorder)
        kc, kd = split3.k0, split3.k1
        b.rewrite((), Compound(nb, nu, nu))
        b.rewrite(("R",), Compound(nb, nu, nu))
        b.splice(("L",), q1)
        b.acr(("L",), Compound(beta, t_a, Compound(beta, t_b, k1f)))
        b.splice(("R", "L"), split3.q0)
        b.splice(("R", "R"), split3.q1)
        b.acr(
            (),
            Compound(
                nb,
                Compound(
                    nb,
                    Compound(beta, t_a, Compound(beta, t_b, k1f)),
                    Compound(beta, t_c, kc),
                ),
                Compound(beta, t_d, kd),
            ),
        )
        b.apply_scheme(
            ("L",), Scheme.SPLIT_DOWN,
            dict(A=t_a, B=Compound(beta, t_b, k1f), C=t_c, D=kc), nb, beta,
        )
        rest1 = Compound(beta, Compound(nb, t_a, t_c), Compound(beta, k1f, kc))
        b.acr((), Compound(nb, Compound(beta, t_b, rest1), Compound(beta, t_d, kd)))
        b.apply_scheme(
            (), Scheme.SPLIT_DOWN, dict(A=t_b, B=rest1, C=t_d, D=kd), nb, beta
        )
        b.acr(
            (),
            Compound(
                beta, r_target, Compound(beta, k1f, Compound(beta, kc, kd))
            ),
        )
        b.splice(("R", "R"), split3.d)
        b.splice(("R",), dp)
    else:
        raise IrreducibleCase(f"unsupported up-rule relation {gamma}")

    b.acr((), Compound(beta, r_target, cr.k))
    b.splice((), instantiate_hole(spec, cr.ctx, r_target))
    b.acr((), sigma.after)
    return Derivation(P.premise, tuple(b.steps) + tuple(below), P.conclusion)


def eliminate_all_up(
    frag: SplittableFragment, P: Derivation, recorder: Optional[list] = None
) -> Derivation:
    """Repeatedly remove the up-step nearest the premise."""
    while True:
        i = first_up_index(frag, P)
        if i is None:
            return P
        P = eliminate_up_step(frag, P, recorder)
