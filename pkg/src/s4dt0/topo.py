"""Finite topological spaces as explicit open families, and model checking on them.

Opens are bitmasks over the points 0..n-1.  A SelectedSpace carries the set of
points at which the difference modality quantifies strictly over the other
points; with all points selected this is the plain difference semantics, and
an Alexandroff space with selected points is the topological view of an
S4D-cone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import BudgetExceededError, NotPreorderError, NotS4DConeError
from .kripke import (
    DEFAULT_VALUATION_BITS,
    KripkeFrame,
    bits,
    frame_class,
    reflexivity_violation,
    transitivity_violation,
)
from .syntax import (
    And,
    Bottom,
    Box,
    Diamond,
    DiffBox,
    DiffDiamond,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    Var,
    variables,
)


def topology_violation(n: int, opens: Iterable[int]) -> str | None:
    """Why the family is not a topology on n points, or None if it is one.

    For finite families closure under pairwise union and intersection suffices.
    """
    family = frozenset(opens)
    full = (1 << n) - 1
    if any(o & ~full for o in family):
        return "an open mentions points out of range"
    if 0 not in family:
        return "the empty set is missing"
    if full not in family:
        return "the full set is missing"
    members = sorted(family)
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if a | b not in family:
                return f"union of {a:#x} and {b:#x} is missing"
            if a & b not in family:
                return f"intersection of {a:#x} and {b:#x} is missing"
    return None


def is_topology(n: int, opens: Iterable[int]) -> bool:
    return topology_violation(n, opens) is None


@dataclass(frozen=True)
class FiniteSpace:
    n: int
    opens: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative point count")
        if self.opens != tuple(sorted(set(self.opens))):
            raise ValueError("opens must be sorted and deduplicated")
        reason = topology_violation(self.n, self.opens)
        if reason is not None:
            raise ValueError(f"not a topology: {reason}")

    @classmethod
    def from_sets(cls, n: int, families: Iterable[Iterable[int]]) -> "FiniteSpace":
        masks = {sum(1 << p for p in set(f)) for f in families}
        return cls(n, tuple(sorted(masks)))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def open_sets(self) -> list[frozenset[int]]:
        return [frozenset(bits(o)) for o in self.opens]


@lru_cache(maxsize=None)
def _interior_mask(space: FiniteSpace, z: int) -> int:
    out = 0
    for o in space.opens:
        if o & ~z == 0:
            out |= o
    return out


@lru_cache(maxsize=None)
def _closure_mask(space: FiniteSpace, z: int) -> int:
    # x is outside the closure iff some open around x misses z entirely.
    outside = 0
    for o in space.opens:
        if o & z == 0:
            outside |= o
    return space.full_mask & ~outside


def interior(space: FiniteSpace, points: Iterable[int]) -> frozenset[int]:
    """Union of all opens contained in the given set."""
    return frozenset(bits(_interior_mask(space, sum(1 << p for p in set(points)))))


def closure(space: FiniteSpace, points: Iterable[int]) -> frozenset[int]:
    return frozenset(bits(_closure_mask(space, sum(1 << p for p in set(points)))))


def t0_violation(space: FiniteSpace) -> tuple[int, int] | None:
    """A pair of distinct points no open separates, or None for a T0 space."""
    signature: dict[tuple[bool, ...], int] = {}
    for x in range(space.n):
        sig = tuple(bool(o >> x & 1) for o in space.opens)
        if sig in signature:
            return (signature[sig], x)
        signature[sig] = x
    return None


def is_t0(space: FiniteSpace) -> bool:
    return t0_violation(space) is None


@dataclass(frozen=True)
class SelectedSpace:
    space: FiniteSpace
    selected: int = 0

    def __post_init__(self):
        if self.selected & ~self.space.full_mask:
            raise ValueError("selected points out of range")

    @classmethod
    def from_sets(
        cls, n: int, families: Iterable[Iterable[int]], selected: Iterable[int] = ()
    ) -> "SelectedSpace":
        return cls(FiniteSpace.from_sets(n, families), sum(1 << p for p in set(selected)))

    @property
    def n(self) -> int:
        return self.space.n

    def selected_points(self) -> frozenset[int]:
        return frozenset(bits(self.selected))


@dataclass(frozen=True)
class TopoModel:
    space: SelectedSpace
    valuation: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        full = self.space.space.full_mask
        for name, mask in self.valuation.items():
            if mask & ~full:
                raise ValueError(f"valuation of {name} mentions points >= {self.space.n}")

    @classmethod
    def from_sets(
        cls, space: SelectedSpace, valuation: Mapping[str, Iterable[int]]
    ) -> "TopoModel":
        return cls(space, {v: sum(1 << p for p in set(ps)) for v, ps in valuation.items()})


def _eval_topo_mask(sspace: SelectedSpace, valuation: Mapping[str, int], phi: Formula) -> int:
    space = sspace.space
    full = space.full_mask
    t = type(phi)
    if t is Var:
        return valuation.get(phi.name, 0)
    if t is Bottom:
        return 0
    if t is Top:
        return full
    if t is Not:
        return full & ~_eval_topo_mask(sspace, valuation, phi.sub)
    if t is And:
        return _eval_topo_mask(sspace, valuation, phi.left) & _eval_topo_mask(
            sspace, valuation, phi.right
        )
    if t is Or:
        return _eval_topo_mask(sspace, valuation, phi.left) | _eval_topo_mask(
            sspace, valuation, phi.right
        )
    if t is Implies:
        return full & (
            ~_eval_topo_mask(sspace, valuation, phi.left)
            | _eval_topo_mask(sspace, valuation, phi.right)
        )
    if t is Iff:
        return full & ~(
            _eval_topo_mask(sspace, valuation, phi.left)
            ^ _eval_topo_mask(sspace, valuation, phi.right)
        )
    if t is Box:
        return _interior_mask(space, _eval_topo_mask(sspace, valuation, phi.sub))
    if t is Diamond:
        return _closure_mask(space, _eval_topo_mask(sspace, valuation, phi.sub))
    if t is DiffBox:
        # Holds at x iff phi holds everywhere else, and also at x itself when
        # x is not selected.
        s = _eval_topo_mask(sspace, valuation, phi.sub)
        missing = full & ~s
        if missing == 0:
            return full
        if missing & (missing - 1):
            return 0
        return missing & sspace.selected
    if t is DiffDiamond:
        # Holds at x iff phi holds somewhere else, or at x itself when x is
        # not selected.
        s = _eval_topo_mask(sspace, valuation, phi.sub)
        if s == 0:
            return 0
        if s & (s - 1):
            return full
        return full & ~(s & sspace.selected)
    if t is ForAll:
        # [d]A & A collapses to "A everywhere" regardless of selected points.
        s = _eval_topo_mask(sspace, valuation, phi.sub)
        return full if s == full else 0
    raise TypeError(f"not a formula node: {phi!r}")


def eval_topo(model: TopoModel, phi: Formula) -> frozenset[int]:
    """The set of points of the model where ``phi`` is true."""
    return frozenset(bits(_eval_topo_mask(model.space, model.valuation, phi)))


def valid_on_space(
    sspace: SelectedSpace, phi: Formula, max_bits: int = DEFAULT_VALUATION_BITS
) -> bool:
    """True iff ``phi`` holds everywhere under every valuation of its variables."""
    names = sorted(variables(phi))
    n = sspace.n
    if n * len(names) > max_bits:
        raise BudgetExceededError(
            f"{n} points x {len(names)} variables needs {n * len(names)} bits > cap {max_bits}"
        )
    full = sspace.space.full_mask
    val: dict[str, int] = {}
    for code in range(1 << (n * len(names))):
        for j, name in enumerate(names):
            val[name] = (code >> (j * n)) & full
        if _eval_topo_mask(sspace, val, phi) != full:
            return False
    return True


def alexandroff(frame: KripkeFrame) -> FiniteSpace:
    """The up-set topology of the preorder R; R(x) is the least neighbourhood of x."""
    if reflexivity_violation(frame.r) or transitivity_violation(frame.r):
        raise NotPreorderError("R is not reflexive and transitive")
    opens = []
    for mask in range(1 << frame.n):
        if all(frame.r[x] & ~mask == 0 for x in bits(mask)):
            opens.append(mask)
    return FiniteSpace(frame.n, tuple(opens))


def top_d(frame: KripkeFrame) -> SelectedSpace:
    """Alexandroff view of an S4D-cone, with the RD-irreflexive worlds selected."""
    if not frame_class(frame).is_s4d_cone:
        raise NotS4DConeError("frame is not an S4D-cone")
    selected = 0
    for x in range(frame.n):
        if not frame.rd[x] >> x & 1:
            selected |= 1 << x
    return SelectedSpace(alexandroff(frame), selected)


def specialization(space: FiniteSpace) -> tuple[int, ...]:
    """The specialization preorder as bit rows: row x is the least open around x."""
    rows = []
    for x in range(space.n):
        row = space.full_mask
        for o in space.opens:
            if o >> x & 1:
                row &= o
        rows.append(row)
    return tuple(rows)
