"""Countable tail spaces, one component per cluster, with an exact set algebra.

A component of period m has points x_1, x_2, ... whose nonempty opens are the
tails U_n = {x_i | i >= n}.  A component built for a cluster that carries a
selected point has one extra point +inf belonging to every nonempty open; a
singleton selected cluster becomes an infinity-only component whose sole
nonempty open is {+inf}.  A composite space glues components along a partial
order on component ids: its opens are unions, over an up-set of components, of
one nonempty component open each.

Definable point sets are stored per component as a finite explicit prefix
(indices 1..k), a periodic membership pattern for indices > k (by index mod
m), and an +inf flag.  The representation is kept canonical (minimal k) and is
closed under Boolean operations, interior and closure, which is everything the
evaluator needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import SpaceMismatchError
from .kripke import bits
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
)


class OmegaPoint(NamedTuple):
    """A point of a composite space: finite index i >= 1, or None for +inf."""

    component: int
    index: int | None

    def __str__(self) -> str:
        return f"c{self.component}:" + ("+inf" if self.index is None else f"x{self.index}")


@dataclass(frozen=True)
class ClusterComponent:
    period: int
    has_infinity: bool = False
    infinity_only: bool = False

    def __post_init__(self):
        if self.infinity_only:
            if not self.has_infinity or self.period != 0:
                raise ValueError("an infinity-only component has period 0 and +inf")
        elif self.period < 1:
            raise ValueError("a component with finite points needs period >= 1")


@dataclass(frozen=True)
class ComponentSet:
    """Membership within one component: explicit prefix, periodic tail, +inf flag.

    Canonical form: the prefix is the shortest one such that membership of
    every index beyond it is tail[index mod period].
    """

    prefix: tuple[bool, ...]
    tail: tuple[bool, ...]
    infinity_in: bool = False

    def __post_init__(self):
        if not self.tail:
            if self.prefix:
                raise ValueError("a component without finite points has no prefix")
            return
        k = len(self.prefix)
        if k and self.prefix[-1] == self.tail[k % len(self.tail)]:
            raise ValueError("prefix not minimal; use ComponentSet.make")

    @staticmethod
    def make(
        prefix: Iterable[bool], tail: Iterable[bool], infinity_in: bool = False
    ) -> "ComponentSet":
        prefix = list(prefix)
        tail = tuple(bool(b) for b in tail)
        if not tail and prefix:
            raise ValueError("a component without finite points has no prefix")
        while prefix and prefix[-1] == tail[len(prefix) % len(tail)]:
            prefix.pop()
        return ComponentSet(tuple(bool(b) for b in prefix), tail, bool(infinity_in))

    def member(self, i: int) -> bool:
        """Membership of the finite point x_i (i >= 1)."""
        if i < 1:
            raise ValueError("finite indices start at 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if not self.tail:
            return False
        return self.tail[i % len(self.tail)]

    def is_empty(self) -> bool:
        return not self.infinity_in and not any(self.prefix) and not any(self.tail)

    def finite_count_or_none(self) -> int | None:
        """Number of finite members, or None when the tail makes it infinite."""
        if any(self.tail):
            return None
        return sum(self.prefix)


def _combine(a: ComponentSet, b: ComponentSet, op: Callable[[bool, bool], bool]) -> ComponentSet:
    k = max(len(a.prefix), len(b.prefix))
    prefix = (op(a.member(i), b.member(i)) for i in range(1, k + 1))
    tail = (op(x, y) for x, y in zip(a.tail, b.tail))
    return ComponentSet.make(prefix, tail, op(a.infinity_in, b.infinity_in))


@dataclass(frozen=True)
class CompositeSpace:
    components: tuple[ClusterComponent, ...]
    order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.components)
        if len(self.order) != n:
            raise ValueError("order must have one row per component")
        full = (1 << n) - 1
        for a, row in enumerate(self.order):
            if row & ~full:
                raise ValueError("order mentions unknown components")
            if not row >> a & 1:
                raise ValueError("order must be reflexive")
        for a in range(n):
            for b in bits(self.order[a]):
                if self.order[b] & ~self.order[a]:
                    raise ValueError("order must be transitive")
                if a != b and self.order[b] >> a & 1:
                    raise ValueError("order must be antisymmetric")

    @property
    def count(self) -> int:
        return len(self.components)

    def up(self, a: int) -> int:
        """Mask of components above a, inclusive."""
        return self.order[a]


@dataclass(frozen=True)
class CompositeSet:
    space: CompositeSpace
    parts: tuple[ComponentSet, ...]

    def __post_init__(self):
        if len(self.parts) != self.space.count:
            raise ValueError("one part per component required")
        for comp, part in zip(self.space.components, self.parts):
            if len(part.tail) != comp.period:
                raise ValueError("tail pattern length must equal the component period")
            if part.infinity_in and not comp.has_infinity:
                raise ValueError("+inf flagged on a component without +inf")

    @classmethod
    def empty(cls, space: CompositeSpace) -> "CompositeSet":
        return cls(
            space,
            tuple(ComponentSet((), (False,) * c.period, False) for c in space.components),
        )

    @classmethod
    def full(cls, space: CompositeSpace) -> "CompositeSet":
        return cls(
            space,
            tuple(
                ComponentSet((), (True,) * c.period, c.has_infinity)
                for c in space.components
            ),
        )

    @classmethod
    def from_points(cls, space: CompositeSpace, points: Iterable[OmegaPoint]) -> "CompositeSet":
        finite: dict[int, set[int]] = {}
        inf: set[int] = set()
        for p in points:
            comp = space.components[p.component]
            if p.index is None:
                if not comp.has_infinity:
                    raise ValueError(f"component {p.component} has no +inf point")
                inf.add(p.component)
            else:
                if comp.infinity_only:
                    raise ValueError(f"component {p.component} has no finite points")
                finite.setdefault(p.component, set()).add(p.index)
        parts = []
        for a, comp in enumerate(space.components):
            idxs = finite.get(a, set())
            k = max(idxs) if idxs else 0
            parts.append(
                ComponentSet.make(
                    (i in idxs for i in range(1, k + 1)),
                    (False,) * comp.period,
                    a in inf,
                )
            )
        return cls(space, tuple(parts))

    def _check_space(self, other: "CompositeSet") -> None:
        if self.space != other.space:
            raise SpaceMismatchError("operands live in different composite spaces")

    def union(self, other: "CompositeSet") -> "CompositeSet":
        self._check_space(other)
        return CompositeSet(
            self.space,
            tuple(_combine(a, b, lambda x, y: x or y) for a, b in zip(self.parts, other.parts)),
        )

    def intersection(self, other: "CompositeSet") -> "CompositeSet":
        self._check_space(other)
        return CompositeSet(
            self.space,
            tuple(_combine(a, b, lambda x, y: x and y) for a, b in zip(self.parts, other.parts)),
        )

    def complement(self) -> "CompositeSet":
        parts = []
        for comp, part in zip(self.space.components, self.parts):
            parts.append(
                ComponentSet.make(
                    (not b for b in part.prefix),
                    (not b for b in part.tail),
                    comp.has_infinity and not part.infinity_in,
                )
            )
        return CompositeSet(self.space, tuple(parts))

    def __or__(self, other: "CompositeSet") -> "CompositeSet":
        return self.union(other)

    def __and__(self, other: "CompositeSet") -> "CompositeSet":
        return self.intersection(other)

    def __invert__(self) -> "CompositeSet":
        return self.complement()

    def contains(self, point: OmegaPoint) -> bool:
        part = self.parts[point.component]
        if point.index is None:
            return part.infinity_in
        return part.member(point.index)

    def is_empty(self) -> bool:
        return all(p.is_empty() for p in self.parts)

    def is_full(self) -> bool:
        return self == CompositeSet.full(self.space)

    def is_singleton(self) -> OmegaPoint | None:
        """The unique point of the set, or None when empty or larger."""
        found: OmegaPoint | None = None
        for a, part in enumerate(self.parts):
            count = part.finite_count_or_none()
            if count is None:
                return None
            count += 1 if part.infinity_in else 0
            if count == 0:
                continue
            if count > 1 or found is not None:
                return None
            if part.infinity_in:
                found = OmegaPoint(a, None)
            else:
                found = OmegaPoint(a, 1 + list(part.prefix).index(True))
        return found

    def _open_inside(self, a: int) -> bool:
        """Whether some nonempty open of component a sits inside the set."""
        comp = self.space.components[a]
        part = self.parts[a]
        if comp.infinity_only:
            return part.infinity_in
        if not all(part.tail):
            return False
        return part.infinity_in if comp.has_infinity else True

    def _meets_every_open(self, a: int) -> bool:
        """Whether every nonempty open of component a meets the set."""
        comp = self.space.components[a]
        part = self.parts[a]
        if comp.infinity_only:
            return part.infinity_in
        if comp.has_infinity and part.infinity_in:
            return True
        return any(part.tail)

    def interior(self) -> "CompositeSet":
        """Largest open inside the set.

        A point of component a is interior iff every component b > a
        contributes a whole nonempty open to the set, and within a the point's
        least open (the tail starting at it, +inf included when present) is
        contained in the part.
        """
        space = self.space
        open_inside = [self._open_inside(a) for a in range(space.count)]
        parts = []
        for a, (comp, part) in enumerate(zip(space.components, self.parts)):
            above_ok = all(
                open_inside[b] for b in bits(space.up(a)) if b != a
            )
            if not above_ok:
                parts.append(ComponentSet((), (False,) * comp.period, False))
            elif comp.infinity_only:
                parts.append(ComponentSet((), (), part.infinity_in))
            elif not all(part.tail) or (comp.has_infinity and not part.infinity_in):
                parts.append(ComponentSet((), (False,) * comp.period, False))
            else:
                j = len(part.prefix) + 1
                while j > 1 and part.prefix[j - 2]:
                    j -= 1
                parts.append(
                    ComponentSet.make(
                        (False,) * (j - 1), (True,) * comp.period, comp.has_infinity
                    )
                )
        return CompositeSet(space, tuple(parts))

    def closure(self) -> "CompositeSet":
        """Least closed superset, computed directly from the open family.

        A point of component a lies in the closure iff every open around it
        meets the set; since component opens are chosen independently over the
        up-set of a, that happens iff some component b > a meets the set in
        every nonempty open, or the point's own least open meets the part.
        """
        space = self.space
        meets_every = [self._meets_every_open(a) for a in range(space.count)]
        parts = []
        for a, (comp, part) in enumerate(zip(space.components, self.parts)):
            escape = any(meets_every[b] for b in bits(space.up(a)) if b != a)
            if comp.infinity_only:
                parts.append(ComponentSet((), (), escape or part.infinity_in))
                continue
            if escape:
                parts.append(ComponentSet((), (True,) * comp.period, comp.has_infinity))
                continue
            if any(part.tail) or (comp.has_infinity and part.infinity_in):
                finite = ComponentSet((), (True,) * comp.period, False)
            else:
                last = 0
                for i, b in enumerate(part.prefix, start=1):
                    if b:
                        last = i
                finite = ComponentSet.make(
                    (True,) * last, (False,) * comp.period, False
                )
            inf_in = comp.has_infinity and meets_every[a]
            parts.append(
                ComponentSet.make(finite.prefix, finite.tail, inf_in)
            )
        return CompositeSet(space, tuple(parts))


def saturated_open(space: CompositeSpace, a: int, n: int) -> CompositeSet:
    """The generator open: tail U_n in component a, whole components above a.

    Every component in the up-set of a contributes a nonempty open, the
    convention that makes the glued family a topology.
    """
    if n < 1:
        raise ValueError("tails start at U_1")
    parts = []
    for b, comp in enumerate(space.components):
        if b == a:
            if comp.infinity_only:
                parts.append(ComponentSet((), (), True))
            else:
                parts.append(
                    ComponentSet.make(
                        (False,) * (n - 1), (True,) * comp.period, comp.has_infinity
                    )
                )
        elif space.up(a) >> b & 1:
            parts.append(ComponentSet((), (True,) * comp.period, comp.has_infinity))
        else:
            parts.append(ComponentSet((), (False,) * comp.period, False))
    return CompositeSet(space, tuple(parts))


def eval_composite(
    space: CompositeSpace, valuation: Mapping[str, CompositeSet], phi: Formula
) -> CompositeSet:
    """Truth set of ``phi`` over the composite space, pure difference semantics."""
    t = type(phi)
    if t is Var:
        out = valuation.get(phi.name)
        if out is None:
            return CompositeSet.empty(space)
        if out.space != space:
            raise SpaceMismatchError(f"valuation of {phi.name} lives in another space")
        return out
    if t is Bottom:
        return CompositeSet.empty(space)
    if t is Top:
        return CompositeSet.full(space)
    if t is Not:
        return eval_composite(space, valuation, phi.sub).complement()
    if t is And:
        return eval_composite(space, valuation, phi.left) & eval_composite(
            space, valuation, phi.right
        )
    if t is Or:
        return eval_composite(space, valuation, phi.left) | eval_composite(
            space, valuation, phi.right
        )
    if t is Implies:
        return eval_composite(space, valuation, phi.left).complement() | eval_composite(
            space, valuation, phi.right
        )
    if t is Iff:
        a = eval_composite(space, valuation, phi.left)
        b = eval_composite(space, valuation, phi.right)
        return (a & b) | (a.complement() & b.complement())
    if t is Box:
        return eval_composite(space, valuation, phi.sub).interior()
    if t is Diamond:
        return eval_composite(space, valuation, phi.sub).closure()
    if t is DiffBox:
        missing = eval_composite(space, valuation, phi.sub).complement()
        if missing.is_empty():
            return CompositeSet.full(space)
        point = missing.is_singleton()
        if point is not None:
            return CompositeSet.from_points(space, (point,))
        return CompositeSet.empty(space)
    if t is DiffDiamond:
        s = eval_composite(space, valuation, phi.sub)
        if s.is_empty():
            return CompositeSet.empty(space)
        point = s.is_singleton()
        if point is not None:
            return CompositeSet.from_points(space, (point,)).complement()
        return CompositeSet.full(space)
    if t is ForAll:
        s = eval_composite(space, valuation, phi.sub)
        return CompositeSet.full(space) if s.is_full() else CompositeSet.empty(space)
    raise TypeError(f"not a formula node: {phi!r}")


@dataclass(frozen=True)
class T0CheckReport:
    ok: bool
    pairs_checked: int
    separations: tuple[tuple[OmegaPoint, OmegaPoint, str], ...]
    failures: tuple[str, ...]


def t0_check(space: CompositeSpace, index_bound: int) -> T0CheckReport:
    """Verify pairwise T0 separation: across components via antisymmetry of the
    order, within components exhaustively for finite indices up to the bound.

    Every claimed separating open is materialized and checked to be an open
    (a fixed point of interior) containing exactly one point of the pair.
    """
    max_period = max((c.period for c in space.components), default=0)
    if index_bound < 2 * max_period + 2:
        raise ValueError(f"index bound must be at least {2 * max_period + 2}")
    separations = []
    failures = []
    pairs = 0

    def check(o: CompositeSet, inside: OmegaPoint, outside: OmegaPoint, what: str) -> None:
        nonlocal pairs
        pairs += 1
        ok = o.contains(inside) and not o.contains(outside) and o.interior() == o
        if ok:
            separations.append((inside, outside, what))
        else:
            failures.append(f"{what} does not separate {inside} from {outside}")

    for a in range(space.count):
        for b in range(a + 1, space.count):
            # Antisymmetry gives a component the other's up-set misses.
            if not space.up(a) >> b & 1:
                o, lo, hi = saturated_open(space, a, 1), a, b
            elif not space.up(b) >> a & 1:
                o, lo, hi = saturated_open(space, b, 1), b, a
            else:
                failures.append(f"components {a}, {b} mutually comparable")
                continue
            pa = _some_point(space, lo)
            pb = _some_point(space, hi)
            if not o.parts[hi].is_empty():
                failures.append(f"saturated open over up({lo}) meets component {hi}")
                continue
            check(o, pa, pb, f"saturated open over up({lo})")
    for a, comp in enumerate(space.components):
        if comp.infinity_only:
            continue
        for j in range(2, index_bound + 1):
            o = saturated_open(space, a, j)
            for i in range(1, j):
                check(o, OmegaPoint(a, j), OmegaPoint(a, i), f"U_{j} in component {a}")
        if comp.has_infinity:
            for i in range(1, index_bound + 1):
                o = saturated_open(space, a, i + 1)
                check(o, OmegaPoint(a, None), OmegaPoint(a, i), f"U_{i + 1} in component {a}")
    return T0CheckReport(not failures, pairs, tuple(separations), tuple(failures))


def _some_point(space: CompositeSpace, a: int) -> OmegaPoint:
    comp = space.components[a]
    return OmegaPoint(a, None) if comp.infinity_only else OmegaPoint(a, 1)
