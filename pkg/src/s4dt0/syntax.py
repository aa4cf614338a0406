"""Bimodal formulas: AST, concrete syntax, substitution, and the named axioms.

The language has the interior modality (``[]`` / ``<>``), the difference
modality (``[d]`` / ``<d>``) and the universal modality ``[A]``.  Sugared
connectives are first-class AST nodes so that printing preserves the input
shape; every evaluator must treat them as equivalent to their primitive
expansions (``<>A = ~[]~A``, ``<d>A = ~[d]~A``, ``[A]A = [d]A & A``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Iterator


class FormulaSyntaxError(ValueError):
    """Malformed formula text; ``position`` is the byte offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownTokenError(FormulaSyntaxError):
    """A character that starts no token of the language."""


class Formula:
    """Base class of all formula nodes.  Instances are immutable and hashable."""

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    sub: Formula


@dataclass(frozen=True)
class DiffBox(Formula):
    sub: Formula


@dataclass(frozen=True)
class DiffDiamond(Formula):
    sub: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    sub: Formula


_UNARY_SYMBOL = {
    Not: "~",
    Box: "[]",
    Diamond: "<>",
    DiffBox: "[d]",
    DiffDiamond: "<d>",
    ForAll: "[A]",
}

BINARY_TYPES = (And, Or, Implies, Iff)
UNARY_TYPES = (Not, Box, Diamond, DiffBox, DiffDiamond, ForAll)
MODAL_TYPES = (Box, Diamond, DiffBox, DiffDiamond, ForAll)


# ---------------------------------------------------------------------------
# Tokenizer / parser.  Grammar (operators loosest to tightest):
#   formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" imp)? ;
#   or := and ("|" and)* ; and := unary ("&" unary)* ;
#   unary := ("~" | "[]" | "<>" | "[d]" | "<d>" | "[A]") unary | atom ;
#   atom := "true" | "false" | ident | "(" formula ")"
# "->" is right-associative; "<->", "|", "&" associate to the left.

_TOKEN_RE = re.compile(
    r"\s+"
    r"|[a-zA-Z][a-zA-Z0-9_]*"
    r"|<->|->|\[d\]|<d>|\[A\]|\[\]|<>"
    r"|[~&|()]"
)

_UNARY_TOKEN = {
    "~": Not,
    "[]": Box,
    "<>": Diamond,
    "[d]": DiffBox,
    "<d>": DiffDiamond,
    "[A]": ForAll,
}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise UnknownTokenError(f"unknown token {text[pos]!r}", pos)
        if not m.group().isspace():
            tokens.append((m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def advance(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.imp()
        while self.peek() == "<->":
            self.advance()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.advance()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "|":
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in _UNARY_TOKEN:
            self.advance()
            return _UNARY_TOKEN[tok](self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("expected a formula, found end of input", self.pos())
        if tok == "true":
            self.advance()
            return Top()
        if tok == "false":
            self.advance()
            return Bottom()
        if tok == "(":
            self.advance()
            inner = self.formula()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.pos())
            self.advance()
            return inner
        if tok[0].isalpha():
            self.advance()
            return Var(tok)
        raise FormulaSyntaxError(f"expected a formula, found {tok!r}", self.pos())


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula; raises FormulaSyntaxError with the offset."""
    p = _Parser(text)
    result = p.formula()
    if p.peek() is not None:
        raise FormulaSyntaxError(f"unexpected {p.peek()!r} after formula", p.pos())
    return result


# Precedence levels for printing, loosest to tightest.
_IFF, _IMP, _OR, _AND, _UNARY, _ATOM = 1, 2, 3, 4, 5, 6


def _pretty(phi: Formula, level: int) -> str:
    t = type(phi)
    if t is Var:
        return phi.name
    if t is Bottom:
        return "false"
    if t is Top:
        return "true"
    if t in _UNARY_SYMBOL:
        return _UNARY_SYMBOL[t] + _pretty(phi.sub, _UNARY)
    if t is Iff:
        own = _IFF
        text = f"{_pretty(phi.left, _IFF)} <-> {_pretty(phi.right, _IMP)}"
    elif t is Implies:
        own = _IMP
        text = f"{_pretty(phi.left, _OR)} -> {_pretty(phi.right, _IMP)}"
    elif t is Or:
        own = _OR
        text = f"{_pretty(phi.left, _OR)} | {_pretty(phi.right, _AND)}"
    else:
        own = _AND
        text = f"{_pretty(phi.left, _AND)} & {_pretty(phi.right, _UNARY)}"
    return f"({text})" if own < level else text


def pretty(phi: Formula) -> str:
    """Concrete syntax with minimal parentheses; parse(pretty(phi)) == phi."""
    return _pretty(phi, _IFF)


def substitute(phi: Formula, name: str, repl: Formula) -> Formula:
    """Replace every occurrence of the variable ``name`` in ``phi`` by ``repl``."""
    t = type(phi)
    if t is Var:
        return repl if phi.name == name else phi
    if t in (Bottom, Top):
        return phi
    if t in _UNARY_SYMBOL:
        return t(substitute(phi.sub, name, repl))
    return t(substitute(phi.left, name, repl), substitute(phi.right, name, repl))


def variables(phi: Formula) -> frozenset[str]:
    """The propositional variables occurring in ``phi``."""
    out: set[str] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        t = type(f)
        if t is Var:
            out.add(f.name)
        elif t in _UNARY_SYMBOL:
            stack.append(f.sub)
        elif t in (And, Or, Implies, Iff):
            stack.append(f.left)
            stack.append(f.right)
    return frozenset(out)


def modal_depth(phi: Formula) -> int:
    """Maximum nesting of modal operators."""
    t = type(phi)
    if t in (Var, Bottom, Top):
        return 0
    if t in MODAL_TYPES:
        return 1 + modal_depth(phi.sub)
    if t is Not:
        return modal_depth(phi.sub)
    return max(modal_depth(phi.left), modal_depth(phi.right))


def formula_size(phi: Formula) -> int:
    """Number of AST nodes."""
    t = type(phi)
    if t in (Var, Bottom, Top):
        return 1
    if t in _UNARY_SYMBOL:
        return 1 + formula_size(phi.sub)
    return 1 + formula_size(phi.left) + formula_size(phi.right)


class AxiomName(Enum):
    T_BOX = "T_box"
    FOUR_BOX = "4_box"
    D_BOX = "D_box"
    B_D = "B_D"
    FOUR_D = "4_D"
    AT0 = "AT0"


_P = Var("p")
_Q = Var("q")

_AXIOMS = {
    AxiomName.T_BOX: Implies(Box(_P), _P),
    AxiomName.FOUR_BOX: Implies(Box(_P), Box(Box(_P))),
    AxiomName.D_BOX: Implies(ForAll(_P), Box(_P)),
    AxiomName.B_D: Implies(_P, DiffBox(DiffDiamond(_P))),
    AxiomName.FOUR_D: Implies(ForAll(_P), DiffBox(DiffBox(_P))),
    AxiomName.AT0: Implies(
        And(And(_P, DiffBox(Not(_P))), DiffDiamond(And(_Q, DiffBox(Not(_Q))))),
        Or(Box(Not(_Q)), DiffDiamond(And(_Q, Box(Not(_P))))),
    ),
}


def axiom(name: AxiomName) -> Formula:
    """The named axiom as a formula over the variables p (and q for AT0)."""
    return _AXIOMS[name]


_LEAF_WEIGHT = 3


def random_formula(rng: Random, max_depth: int, names: tuple[str, ...] = ("p", "q")) -> Formula:
    """A random formula of modal/boolean depth at most ``max_depth``."""
    if max_depth <= 0 or rng.randrange(max_depth + _LEAF_WEIGHT) >= max_depth:
        leaf = rng.randrange(len(names) + 2)
        if leaf < len(names):
            return Var(names[leaf])
        return Top() if leaf == len(names) else Bottom()
    ctor = rng.choice(
        (Not, And, Or, Implies, Iff, Box, Diamond, DiffBox, DiffDiamond, ForAll)
    )
    if ctor in BINARY_TYPES:
        return ctor(
            random_formula(rng, max_depth - 1, names),
            random_formula(rng, max_depth - 1, names),
        )
    return ctor(random_formula(rng, max_depth - 1, names))


def all_formulas(max_depth: int, names: tuple[str, ...]) -> Iterator[Formula]:
    """Every formula up to the given constructor depth (small depths only)."""
    leaves = [Var(n) for n in names] + [Top(), Bottom()]
    if max_depth <= 0:
        yield from leaves
        return
    smaller = list(all_formulas(max_depth - 1, names))
    yield from smaller
    for f in smaller:
        for u in UNARY_TYPES:
            yield u(f)
    for f in smaller:
        for g in smaller:
            for b in BINARY_TYPES:
                yield b(f, g)
