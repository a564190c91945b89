"""The candidate rule set R23 over the eight implication/projection
relations, its semantics, the soundness audit, and the C2/C3
satisfiability harness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .system_p import all_valuations, evaluate
from .systems import Metavar, RelationSymbol, SystemError, SystemSpec, instantiate
from .terms import Compound, Constant, Formula, Variable, variables

# 2x2 tables, rows ordered (F,F), (F,T), (T,F), (T,T)
R23_TABLES = {
    "->": (True, True, False, True),
    "<-": (True, False, True, True),
    "!>": (False, False, True, False),  # A and not B
    "!<": (False, True, False, False),  # not A and B
    "p0": (False, False, True, True),
    "p1": (False, True, False, True),
    "np0": (True, True, False, False),
    "np1": (True, False, True, False),
}

# involutive negation coherent with negating compounds argumentwise:
# table(~r)(a,b) = not table(r)(not a, not b)
R23_NEGATION = {
    "->": "!<",
    "!<": "->",
    "<-": "!>",
    "!>": "<-",
    "p0": "p0",
    "p1": "p1",
    "np0": "np0",
    "np1": "np1",
}


class ConnectiveOutsideClone(SystemError):
    pass


class VarCap(SystemError):
    pass


_R23_SPEC: Optional[SystemSpec] = None


def make_r23_spec() -> SystemSpec:
    """Relations and negation only: the rule set ships without an
    equational theory, so derivation checking stays out of scope."""
    global _R23_SPEC
    if _R23_SPEC is None:
        _R23_SPEC = SystemSpec(
            name="R23",
            constants=("T", "F"),
            constant_negation={"T": "F", "F": "T"},
            relations=tuple(
                RelationSymbol(name, R23_NEGATION[name]) for name in R23_TABLES
            ),
        )
    return _R23_SPEC


@dataclass(frozen=True)
class R23Rule:
    rule_id: str
    premise: Formula  # pattern over metavariables A, B, C, D
    conclusion: Formula


def _family(prefix: str, f: str, fp: str, glb: str, lub: str,
            meet: str, joint: str) -> list:
    A, B, C, D = (Metavar(n) for n in "ABCD")

    def c(rel, left, right):
        return Compound(rel, left, right)

    rules = [
        R23Rule(f"{prefix}.ai0d", c(f, c(glb, A, B), c(glb, C, D)),
                c(glb, c(f, A, C), c(f, B, D))),
        R23Rule(f"{prefix}.ai0u", c(meet, c(f, A, C), c(f, B, D)),
                c(f, c(meet, A, B), c(meet, C, D))),
        R23Rule(f"{prefix}.ai1d", c(fp, c(glb, A, B), c(glb, C, D)),
                c(glb, c(fp, A, C), c(fp, B, D))),
        R23Rule(f"{prefix}.ai1u", c(meet, c(fp, A, C), c(fp, B, D)),
                c(fp, c(meet, A, B), c(meet, C, D))),
        R23Rule(f"{prefix}.sd", c(lub, c(glb, A, B), c(glb, C, D)),
                c(glb, c(lub, A, C), c(joint, B, D))),
        R23Rule(f"{prefix}.su", c(meet, c(joint, A, C), c(lub, B, D)),
                c(joint, c(meet, A, B), c(meet, C, D))),
        R23Rule(f"{prefix}.c0d", c(glb, c(f, A, B), c(f, C, D)),
                c(f, c(glb, A, C), c(glb, B, D))),
        R23Rule(f"{prefix}.c0u", c(f, c(meet, A, C), c(meet, B, D)),
                c(meet, c(f, A, B), c(f, C, D))),
        R23Rule(f"{prefix}.c1d", c(glb, c(fp, A, B), c(fp, C, D)),
                c(fp, c(glb, A, C), c(glb, B, D))),
        R23Rule(f"{prefix}.c1u", c(fp, c(meet, A, C), c(meet, B, D)),
                c(meet, c(fp, A, B), c(fp, C, D))),
    ]
    return rules


def make_r23_rules() -> list:
    """The twenty medial shapes: the left family over implication and the
    right family over reverse implication."""
    left = _family("L", f="np0", fp="p1", glb="->", lub="!<", meet="!>", joint="<-")
    right = _family("R", f="p0", fp="np1", glb="<-", lub="!>", meet="!>", joint="->")
    return left + right


def audit_r23(rules: Optional[Sequence[R23Rule]] = None) -> list:
    """Per rule, does truth of the premise force truth of the conclusion
    over all sixteen assignments?  Failures are reported, not hidden."""
    if rules is None:
        rules = make_r23_rules()
    spec = make_r23_spec()
    fresh = dict(A=Variable("a"), B=Variable("b"), C=Variable("c"), D=Variable("d"))
    out = []
    for rule in rules:
        prem = instantiate(spec, rule.premise, fresh)
        conc = instantiate(spec, rule.conclusion, fresh)
        ok = all(
            (not evaluate(prem, v)) or evaluate(conc, v)
            for v in all_valuations(("a", "b", "c", "d"))
        )
        out.append((rule.rule_id, ok))
    return out


def audit_report_csv(report: Optional[Sequence[tuple]] = None) -> str:
    if report is None:
        report = audit_r23()
    lines = ["rule,sound"]
    lines.extend(f"{rid},{'pass' if ok else 'fail'}" for rid, ok in report)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Satisfiability

C2_CONNECTIVES = frozenset({"&", "->", "<-", "|"})
C3_CONNECTIVES = frozenset({"&", "!<", "!>", "|"})


def _connectives(f: Formula) -> set:
    if isinstance(f, Compound):
        return {f.rel} | _connectives(f.left) | _connectives(f.right)
    return set()


def _constants(f: Formula) -> set:
    if isinstance(f, Constant):
        return {f.name}
    if isinstance(f, Compound):
        return _constants(f.left) | _constants(f.right)
    return set()


def sat_c2(f: Formula) -> dict:
    """Formulas over the 1-preserving connectives are satisfied by the
    all-true valuation."""
    bad = _connectives(f) - C2_CONNECTIVES
    if bad:
        raise ConnectiveOutsideClone(f"connectives outside C2: {sorted(bad)}")
    if "F" in _constants(f):
        raise ConnectiveOutsideClone("constant F is outside C2")
    valuation = {name: True for name in variables(f)}
    if not evaluate(f, valuation):
        raise SystemError("all-true valuation failed on a C2 formula")
    return valuation


def sat_brute(f: Formula, var_cap: int = 24):
    """First satisfying valuation in enumeration order, or None."""
    names = sorted(variables(f))
    if len(names) > var_cap:
        raise VarCap(f"{len(names)} variables exceed the cap {var_cap}")
    for valuation in all_valuations(names):
        if evaluate(f, valuation):
            return valuation
    return None


def random_clone_formula(rng: random.Random, clone: str, n_vars: int,
                         depth_p: float = 0.4, max_depth: int = 12) -> Formula:
    """Uniform connectives from the clone's set, geometric depth, uniform
    variables."""
    if clone == "C2":
        rels, const = sorted(C2_CONNECTIVES), "T"
    elif clone == "C3":
        rels, const = sorted(C3_CONNECTIVES), "F"
    else:
        raise SystemError(f"unknown clone {clone!r}")

    def go(depth: int) -> Formula:
        if depth >= max_depth or rng.random() >= depth_p:
            if rng.random() < 0.05:
                return Constant(const)
            return Variable(f"v{rng.randrange(n_vars)}")
        rel = rels[rng.randrange(len(rels))]
        return Compound(rel, go(depth + 1), go(depth + 1))

    root = rels[rng.randrange(len(rels))]
    return Compound(root, go(1), go(1))


def bench_sat(clone: str, var_counts: Sequence[int], sizes: Sequence[int],
              seed: int, samples: int) -> str:
    """CSV rows {clone, n_vars, size, seed, sat, micros}; deterministic for
    a fixed seed."""
    from .terms import size as term_size

    lines = ["clone,n_vars,size,seed,sat,micros"]
    rng = random.Random(seed)
    for n_vars in var_counts:
        for target in sizes:
            for _ in range(samples):
                sample_seed = rng.randrange(2 ** 32)
                srng = random.Random(sample_seed)
                f = random_clone_formula(srng, clone, n_vars)
                while term_size(f) < target:
                    f = Compound(
                        "&" if clone == "C3" and srng.random() < 0.5 else "|",
                        f,
                        random_clone_formula(srng, clone, n_vars),
                    )
                start = time.perf_counter()
                if clone == "C2":
                    sat_c2(f)
                    satisfiable = True
                else:
                    satisfiable = sat_brute(f) is not None
                micros = int((time.perf_counter() - start) * 1e6)
                lines.append(
                    f"{clone},{n_vars},{term_size(f)},{sample_seed},"
                    f"{int(satisfiable)},{micros}"
                )
    return "\n".join(lines) + "\n"
