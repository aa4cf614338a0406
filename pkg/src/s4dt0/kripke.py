"""Finite two-relation Kripke frames and models.

Worlds are the integers 0..n-1.  A relation is stored row-wise as n bitmasks,
row i holding the successor set of world i; truth sets are bitmasks too.  R
interprets the interior modality, RD the difference modality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import BudgetExceededError, NotPreorderError
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

DEFAULT_VALUATION_BITS = 24


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def rows_from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    rows = [0] * n
    for x, y in pairs:
        if not (0 <= x < n and 0 <= y < n):
            raise ValueError(f"pair ({x},{y}) out of range for {n} worlds")
        rows[x] |= 1 << y
    return tuple(rows)


def pairs_from_rows(rows: tuple[int, ...]) -> list[tuple[int, int]]:
    return [(x, y) for x in range(len(rows)) for y in bits(rows[x])]


def identity_rows(n: int) -> tuple[int, ...]:
    return tuple(1 << x for x in range(n))


def universal_rows(n: int) -> tuple[int, ...]:
    return ((1 << n) - 1,) * n


def closure_rows(rows: tuple[int, ...]) -> tuple[int, ...]:
    """Reflexive-transitive closure, Warshall on bit rows."""
    n = len(rows)
    out = [rows[x] | (1 << x) for x in range(n)]
    for k in range(n):
        rk = out[k]
        kbit = 1 << k
        for x in range(n):
            if out[x] & kbit:
                out[x] |= rk
    return tuple(out)


def inverse_rows(rows: tuple[int, ...]) -> tuple[int, ...]:
    n = len(rows)
    out = [0] * n
    for x in range(n):
        row = rows[x]
        for y in bits(row):
            out[y] |= 1 << x
    return tuple(out)


@dataclass(frozen=True)
class KripkeFrame:
    n: int
    r: tuple[int, ...]
    rd: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a frame needs at least one world")
        full = (1 << self.n) - 1
        for name, rows in (("R", self.r), ("RD", self.rd)):
            if len(rows) != self.n:
                raise ValueError(f"{name} must have {self.n} rows")
            if any(row & ~full for row in rows):
                raise ValueError(f"{name} mentions worlds >= {self.n}")

    @classmethod
    def from_pairs(
        cls,
        n: int,
        r_pairs: Iterable[tuple[int, int]],
        rd_pairs: Iterable[tuple[int, int]],
    ) -> "KripkeFrame":
        return cls(n, rows_from_pairs(n, r_pairs), rows_from_pairs(n, rd_pairs))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def r_pairs(self) -> list[tuple[int, int]]:
        return pairs_from_rows(self.r)

    def rd_pairs(self) -> list[tuple[int, int]]:
        return pairs_from_rows(self.rd)


@dataclass(frozen=True)
class KripkeModel:
    frame: KripkeFrame
    valuation: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        full = self.frame.full_mask
        for name, mask in self.valuation.items():
            if mask & ~full:
                raise ValueError(f"valuation of {name} mentions worlds >= {self.frame.n}")

    @classmethod
    def from_sets(
        cls, frame: KripkeFrame, valuation: Mapping[str, Iterable[int]]
    ) -> "KripkeModel":
        return cls(frame, {v: sum(1 << w for w in set(ws)) for v, ws in valuation.items()})

    def truth_set(self, name: str) -> frozenset[int]:
        return frozenset(bits(self.valuation.get(name, 0)))


def eval_mask(frame: KripkeFrame, valuation: Mapping[str, int], phi: Formula) -> int:
    """Truth set of ``phi`` as a bitmask; variables absent from the valuation are empty."""
    full = frame.full_mask
    t = type(phi)
    if t is Var:
        return valuation.get(phi.name, 0)
    if t is Bottom:
        return 0
    if t is Top:
        return full
    if t is Not:
        return full & ~eval_mask(frame, valuation, phi.sub)
    if t is And:
        return eval_mask(frame, valuation, phi.left) & eval_mask(frame, valuation, phi.right)
    if t is Or:
        return eval_mask(frame, valuation, phi.left) | eval_mask(frame, valuation, phi.right)
    if t is Implies:
        return full & (
            ~eval_mask(frame, valuation, phi.left) | eval_mask(frame, valuation, phi.right)
        )
    if t is Iff:
        return full & ~(
            eval_mask(frame, valuation, phi.left) ^ eval_mask(frame, valuation, phi.right)
        )
    if t is Box:
        s = eval_mask(frame, valuation, phi.sub)
        out = 0
        for x, row in enumerate(frame.r):
            if row & s == row:
                out |= 1 << x
        return out
    if t is Diamond:
        s = eval_mask(frame, valuation, phi.sub)
        out = 0
        for x, row in enumerate(frame.r):
            if row & s:
                out |= 1 << x
        return out
    if t is DiffBox:
        s = eval_mask(frame, valuation, phi.sub)
        out = 0
        for x, row in enumerate(frame.rd):
            if row & s == row:
                out |= 1 << x
        return out
    if t is DiffDiamond:
        s = eval_mask(frame, valuation, phi.sub)
        out = 0
        for x, row in enumerate(frame.rd):
            if row & s:
                out |= 1 << x
        return out
    if t is ForAll:
        # [A]A = [d]A & A by definition.
        s = eval_mask(frame, valuation, phi.sub)
        out = 0
        for x, row in enumerate(frame.rd):
            if row & s == row:
                out |= 1 << x
        return out & s
    raise TypeError(f"not a formula node: {phi!r}")


def eval_kripke(model: KripkeModel, phi: Formula) -> frozenset[int]:
    """The set of worlds of the model where ``phi`` is true."""
    return frozenset(bits(eval_mask(model.frame, model.valuation, phi)))


def _valuation_masks(
    names: list[str], code: int, n: int, full: int
) -> dict[str, int]:
    return {name: (code >> (j * n)) & full for j, name in enumerate(names)}


def satisfying_valuation(
    frame: KripkeFrame, phi: Formula, max_bits: int = DEFAULT_VALUATION_BITS
) -> tuple[dict[str, int], int] | None:
    """First (valuation, world) making ``phi`` true, scanning valuation codes ascending.

    The valuation code packs one n-bit block per variable, variables sorted by
    name; the world is the least world of the truth set.  Returns None when no
    valuation satisfies ``phi`` anywhere.
    """
    names = sorted(variables(phi))
    n = frame.n
    if n * len(names) > max_bits:
        raise BudgetExceededError(
            f"{n} worlds x {len(names)} variables needs {n * len(names)} bits > cap {max_bits}"
        )
    full = frame.full_mask
    for code in range(1 << (n * len(names))):
        val = _valuation_masks(names, code, n, full)
        mask = eval_mask(frame, val, phi)
        if mask:
            return val, (mask & -mask).bit_length() - 1
    return None


def valid_on_frame(
    frame: KripkeFrame, phi: Formula, max_bits: int = DEFAULT_VALUATION_BITS
) -> bool:
    """True iff ``phi`` holds at every world under every valuation of its variables."""
    names = sorted(variables(phi))
    n = frame.n
    if n * len(names) > max_bits:
        raise BudgetExceededError(
            f"{n} worlds x {len(names)} variables needs {n * len(names)} bits > cap {max_bits}"
        )
    full = frame.full_mask
    val: dict[str, int] = {}
    for code in range(1 << (n * len(names))):
        for j, name in enumerate(names):
            val[name] = (code >> (j * n)) & full
        if eval_mask(frame, val, phi) != full:
            return False
    return True


def cone(frame: KripkeFrame, x: int) -> tuple[KripkeFrame, tuple[int, ...]]:
    """Subframe generated from ``x`` by (R ∪ RD)*, plus the old-world numbering.

    The second component lists the kept worlds ascending; new world i is old
    world ``worlds[i]``.
    """
    if not 0 <= x < frame.n:
        raise ValueError(f"world {x} out of range")
    union = tuple(frame.r[i] | frame.rd[i] for i in range(frame.n))
    reach = 1 << x
    frontier = reach
    while frontier:
        step = 0
        for y in bits(frontier):
            step |= union[y]
        frontier = step & ~reach
        reach |= step
    worlds = tuple(bits(reach))
    index = {w: i for i, w in enumerate(worlds)}
    def restrict(rows: tuple[int, ...]) -> tuple[int, ...]:
        out = []
        for w in worlds:
            row = 0
            for y in bits(rows[w] & reach):
                row |= 1 << index[y]
            out.append(row)
        return tuple(out)
    return KripkeFrame(len(worlds), restrict(frame.r), restrict(frame.rd)), worlds


def reflexivity_violation(rows: tuple[int, ...]) -> tuple[int] | None:
    for x in range(len(rows)):
        if not rows[x] >> x & 1:
            return (x,)
    return None


def transitivity_violation(rows: tuple[int, ...]) -> tuple[int, int, int] | None:
    for x in range(len(rows)):
        row = rows[x]
        for y in bits(row):
            extra = rows[y] & ~row
            if extra:
                return (x, y, (extra & -extra).bit_length() - 1)
    return None


def d_inclusion_violation(frame: KripkeFrame) -> tuple[int, int] | None:
    """First (x,y) with xRy but neither xRDy nor x=y."""
    for x in range(frame.n):
        extra = frame.r[x] & ~(frame.rd[x] | (1 << x))
        if extra:
            return (x, (extra & -extra).bit_length() - 1)
    return None


def symmetry_violation(rows: tuple[int, ...]) -> tuple[int, int] | None:
    for x in range(len(rows)):
        for y in bits(rows[x]):
            if not rows[y] >> x & 1:
                return (x, y)
    return None


def pseudo_transitivity_violation(rows: tuple[int, ...]) -> tuple[int, int, int] | None:
    """First (x,y,z) with xRDy, yRDz but neither xRDz nor x=z."""
    for x in range(len(rows)):
        allowed = rows[x] | (1 << x)
        for y in bits(rows[x]):
            extra = rows[y] & ~allowed
            if extra:
                return (x, y, (extra & -extra).bit_length() - 1)
    return None


def at0_violation(frame: KripkeFrame) -> tuple[int, int] | None:
    """First pair of distinct mutually R-reachable worlds that are both RD-irreflexive."""
    irrefl = [not frame.rd[x] >> x & 1 for x in range(frame.n)]
    for x in range(frame.n):
        if not irrefl[x]:
            continue
        for y in bits(frame.r[x] & ~((1 << (x + 1)) - 1)):
            if irrefl[y] and frame.r[y] >> x & 1:
                return (x, y)
    return None


def cone_root(frame: KripkeFrame) -> int | None:
    """A world generating the whole frame via (R ∪ RD)*, or None."""
    union = tuple(frame.r[i] | frame.rd[i] for i in range(frame.n))
    closed = closure_rows(union)
    full = frame.full_mask
    for x in range(frame.n):
        if closed[x] == full:
            return x
    return None


@dataclass(frozen=True)
class FrameClassReport:
    reflexive_r: bool
    transitive_r: bool
    d_box: bool
    symmetric_rd: bool
    pseudo_transitive_rd: bool
    at0_cluster: bool
    is_cone: bool
    is_s4d_cone: bool
    is_s4dt0_cone: bool
    witnesses: Mapping[str, tuple[int, ...]]


def frame_class(frame: KripkeFrame) -> FrameClassReport:
    """First-order frame conditions, with a witness for each failed one."""
    witnesses: dict[str, tuple[int, ...]] = {}
    checks = {
        "reflexive_r": reflexivity_violation(frame.r),
        "transitive_r": transitivity_violation(frame.r),
        "d_box": d_inclusion_violation(frame),
        "symmetric_rd": symmetry_violation(frame.rd),
        "pseudo_transitive_rd": pseudo_transitivity_violation(frame.rd),
        "at0_cluster": at0_violation(frame),
    }
    flags = {}
    for name, witness in checks.items():
        flags[name] = witness is None
        if witness is not None:
            witnesses[name] = witness
    root = cone_root(frame)
    is_cone = root is not None
    is_s4d = (
        flags["reflexive_r"]
        and flags["transitive_r"]
        and flags["d_box"]
        and flags["symmetric_rd"]
        and flags["pseudo_transitive_rd"]
        and is_cone
    )
    return FrameClassReport(
        reflexive_r=flags["reflexive_r"],
        transitive_r=flags["transitive_r"],
        d_box=flags["d_box"],
        symmetric_rd=flags["symmetric_rd"],
        pseudo_transitive_rd=flags["pseudo_transitive_rd"],
        at0_cluster=flags["at0_cluster"],
        is_cone=is_cone,
        is_s4d_cone=is_s4d,
        is_s4dt0_cone=is_s4d and flags["at0_cluster"],
        witnesses=witnesses,
    )


def clusters(frame: KripkeFrame) -> tuple[tuple[int, ...], ...]:
    """Equivalence classes of mutual R-reachability, ordered by least world.

    Requires R to be a preorder; with reflexivity and transitivity the cluster
    of x is R(x) ∩ R⁻¹(x) directly.
    """
    if reflexivity_violation(frame.r) or transitivity_violation(frame.r):
        raise NotPreorderError("R is not reflexive and transitive")
    rinv = inverse_rows(frame.r)
    seen = 0
    out = []
    for x in range(frame.n):
        if seen >> x & 1:
            continue
        cluster = frame.r[x] & rinv[x]
        seen |= cluster
        out.append(tuple(bits(cluster)))
    return tuple(out)
