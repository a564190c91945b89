"""Formula terms, contexts, negation, and AC-canonical forms.

Formulas are immutable trees over constants, signed variables and binary
relation symbols.  Only associativity/commutativity of relations declared
by the governing system is ever normalised silently; every other equation
is an explicit derivation step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union


class TermError(Exception):
    pass


class UnknownSymbol(TermError):
    pass


class PathMismatch(TermError):
    pass


class ParseError(TermError):
    pass


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    name: str
    negated: bool = False

    def __str__(self) -> str:
        return "~" + self.name if self.negated else self.name


@dataclass(frozen=True)
class Metavar:
    """Pattern-only placeholder (A, B, ...). Never occurs in real formulas."""

    name: str
    negated: bool = False
    sort: str = "formula"  # formula | constant | literal

    def __str__(self) -> str:
        return "~" + self.name if self.negated else self.name


@dataclass(frozen=True, eq=False)
class Compound:
    rel: str
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.rel, self.left, self.right)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Compound):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.rel == other.rel
            and self.left == other.left
            and self.right == other.right
        )

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[Constant, Variable, Metavar, Compound]


def is_atom(f: Formula) -> bool:
    return not isinstance(f, Compound)


def variables(f: Formula) -> set[str]:
    """Names of the variables occurring in f (ignoring polarity)."""
    if isinstance(f, Variable):
        return {f.name}
    if isinstance(f, Compound):
        return variables(f.left) | variables(f.right)
    return set()


def subterms(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Compound):
        yield from subterms(f.left)
        yield from subterms(f.right)


def size(f: Formula) -> int:
    if isinstance(f, Compound):
        return 1 + size(f.left) + size(f.right)
    return 1


def height(f: Formula) -> int:
    """Height with atoms at height 1."""
    if isinstance(f, Compound):
        return 1 + max(height(f.left), height(f.right))
    return 1


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class PathStep:
    rel: str
    hole_side: str  # "L" | "R"
    sibling: Formula


ContextPath = tuple  # tuple[PathStep, ...], outermost first


def plug(ctx: Sequence[PathStep], f: Formula) -> Formula:
    """Insert f at the hole described by ctx (outermost step first)."""
    out = f
    for step in reversed(tuple(ctx)):
        if step.hole_side == "L":
            out = Compound(step.rel, out, step.sibling)
        else:
            out = Compound(step.rel, step.sibling, out)
    return out


def subformula_at(f: Formula, ctx: Sequence[PathStep]) -> Formula:
    """Read back the subterm at the hole; each step must match f's shape."""
    cur = f
    for step in ctx:
        if not isinstance(cur, Compound) or cur.rel != step.rel:
            raise PathMismatch(f"expected {step.rel!r} node, found {cur}")
        if step.hole_side == "L":
            if cur.right != step.sibling:
                raise PathMismatch(f"sibling mismatch at {cur}")
            cur = cur.left
        else:
            if cur.left != step.sibling:
                raise PathMismatch(f"sibling mismatch at {cur}")
            cur = cur.right
    return cur


def context_at(f: Formula, sides: Sequence[str]) -> ContextPath:
    """Build the full context (with siblings) for a bare L/R path into f."""
    steps = []
    cur = f
    for side in sides:
        if not isinstance(cur, Compound):
            raise PathMismatch(f"path descends below atom {cur}")
        if side == "L":
            steps.append(PathStep(cur.rel, "L", cur.right))
            cur = cur.left
        elif side == "R":
            steps.append(PathStep(cur.rel, "R", cur.left))
            cur = cur.right
        else:
            raise PathMismatch(f"bad path side {side!r}")
    return tuple(steps)


def subformula_at_sides(f: Formula, sides: Sequence[str]) -> Formula:
    cur = f
    for side in sides:
        if not isinstance(cur, Compound):
            raise PathMismatch(f"path descends below atom {cur}")
        cur = cur.left if side == "L" else cur.right
    return cur


def replace_at(f: Formula, sides: Sequence[str], sub: Formula) -> Formula:
    if not sides:
        return sub
    if not isinstance(f, Compound):
        raise PathMismatch(f"path descends below atom {f}")
    if sides[0] == "L":
        return Compound(f.rel, replace_at(f.left, sides[1:], sub), f.right)
    return Compound(f.rel, f.left, replace_at(f.right, sides[1:], sub))


# ---------------------------------------------------------------------------
# Spec-dependent operations.  `spec` is any object exposing
# negate_constant(name), dual(rel), is_associative(rel), is_commutative(rel)
# and an `ac_cache` dict (see systems.SystemSpec).


def negate(spec, f: Formula) -> Formula:
    """Involutive negation: constants via the spec table, variables flip
    their polarity flag, compounds dualise the relation and recurse."""
    if isinstance(f, Constant):
        return Constant(spec.negate_constant(f.name))
    if isinstance(f, Variable):
        return Variable(f.name, not f.negated)
    if isinstance(f, Metavar):
        return Metavar(f.name, not f.negated, f.sort)
    return Compound(spec.dual(f.rel), negate(spec, f.left), negate(spec, f.right))


def spine(spec, f: Formula, rel: str) -> list[Formula]:
    """Maximal same-relation operand list of f for an associative rel (the
    singleton [f] when f is not a rel-compound)."""
    if isinstance(f, Compound) and f.rel == rel and spec.is_associative(rel):
        return spine(spec, f.left, rel) + spine(spec, f.right, rel)
    return [f]


def join(rel: str, operands: Sequence[Formula]) -> Formula:
    """Right-nested rel-join of a nonempty operand list."""
    if not operands:
        raise TermError("empty join")
    out = operands[-1]
    for operand in reversed(operands[:-1]):
        out = Compound(rel, operand, out)
    return out


def _sort_key(f: Formula):
    if isinstance(f, Constant):
        return (0, f.name)
    if isinstance(f, Variable):
        return (1, f.name, f.negated)
    if isinstance(f, Metavar):
        return (2, f.name, f.negated)
    return (3, f.rel, _sort_key(f.left), _sort_key(f.right))


def ac_canonical(spec, f: Formula) -> Formula:
    """Canonical representative modulo the declared AC axioms only: flatten
    associative spines, sort operands of commutative relations under a fixed
    total order, rebuild right-nested."""
    cache = spec.ac_cache
    hit = cache.get(f)
    if hit is not None:
        return hit
    if not isinstance(f, Compound):
        cache[f] = f
        return f
    if spec.is_associative(f.rel):
        elems = [ac_canonical(spec, e) for e in spine(spec, f, f.rel)]
        if spec.is_commutative(f.rel):
            elems.sort(key=_sort_key)
        out = join(f.rel, elems)
    else:
        left = ac_canonical(spec, f.left)
        right = ac_canonical(spec, f.right)
        if spec.is_commutative(f.rel) and _sort_key(right) < _sort_key(left):
            left, right = right, left
        out = Compound(f.rel, left, right)
    cache[f] = out
    return out


def equal_mod_ac(spec, f: Formula, g: Formula) -> bool:
    return f == g or ac_canonical(spec, f) == ac_canonical(spec, g)


# ---------------------------------------------------------------------------
# Parsing / printing
#
# formula := atom | "(" formula (REL formula)+ ")"
# atom    := CONST | VAR | "~" VAR        (constants start uppercase)
# Chains "(x | y | z)" are right-nested.  The printer collapses right-nested
# spines back into chains, so print/parse round-trips are tree-exact.

_SYMBOL_RELS = ("->", "<-", "!>", "!<", "&", "|")


def _tokenize(text: str) -> list[str]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()~":
            toks.append(c)
            i += 1
            continue
        two = text[i : i + 2]
        if two in ("->", "<-", "!>", "!<"):
            toks.append(two)
            i += 2
            continue
        if c in "&|":
            toks.append(c)
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(text[i:j])
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isalnum():
                j += 1
            toks.append(text[i:j])
            i = j
            continue
        raise ParseError(f"unexpected character {c!r} at offset {i}")
    return toks


def _is_rel_token(tok: str) -> bool:
    if tok in _SYMBOL_RELS:
        return True
    # identifier-shaped relation names (p0, p1, np0, np1, ...)
    return tok[0].isalpha() and tok not in ("(", ")", "~")


class _Parser:
    def __init__(self, toks: list[str], metavars: bool):
        self.toks = toks
        self.pos = 0
        self.metavars = metavars

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        if self.pos >= len(self.toks):
            raise ParseError("unexpected end of input")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def formula(self) -> Formula:
        tok = self.take()
        if tok == "(":
            first = self.formula()
            rel = self.take()
            if not _is_rel_token(rel):
                raise ParseError(f"expected relation, found {rel!r}")
            operands = [first, self.formula()]
            while self.peek() != ")":
                nxt = self.take()
                if nxt != rel:
                    raise ParseError(
                        f"mixed relations {rel!r}/{nxt!r} need explicit parentheses"
                    )
                operands.append(self.formula())
            self.take()  # ")"
            out = operands[-1]
            for operand in reversed(operands[:-1]):
                out = Compound(rel, operand, out)
            return out
        if tok == "~":
            name = self.take()
            return self.atom(name, negated=True)
        return self.atom(tok, negated=False)

    def atom(self, name: str, negated: bool) -> Formula:
        if not (name[0].isalpha() or name[0] == "_"):
            raise ParseError(f"bad atom {name!r}")
        if name[0].isupper():
            if self.metavars and name not in ("T", "F"):
                return Metavar(name, negated)
            if negated:
                raise ParseError(f"constants take no ~: {name}")
            return Constant(name)
        return Variable(name, negated)


def parse_formula(text: str, metavars: bool = False) -> Formula:
    """Parse the textual grammar; with metavars=True uppercase names (other
    than T/F) parse as pattern metavariables."""
    parser = _Parser(_tokenize(text), metavars)
    f = parser.formula()
    if parser.peek() is not None:
        raise ParseError(f"trailing input at token {parser.peek()!r}")
    return f


def print_formula(f: Formula, spaces: bool = True) -> str:
    def go(g: Formula) -> str:
        if isinstance(g, (Constant, Variable, Metavar)):
            return str(g)
        operands = [g.left]
        cur = g.right
        while isinstance(cur, Compound) and cur.rel == g.rel:
            operands.append(cur.left)
            cur = cur.right
        operands.append(cur)
        # identifier-shaped relations always need separating whitespace
        sep = " " if (spaces or g.rel[0].isalnum()) else ""
        joined = (sep + g.rel + sep).join(go(o) for o in operands)
        return "(" + joined + ")"

    return go(f)
