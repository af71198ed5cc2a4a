"""Iterated blow-up of a marked fibre, tracked as a chain of rational curves.

A :class:`ChainState` stores self-intersection magnitudes on either side of
the unique (-1)-curve; ``left = (a_1..a_j)`` and ``right = (b_1..b_r)`` stand
for the chain ``-a_1, ..., -a_j, -1, -b_r, ..., -b_1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .hjfrac import FractionLike, as_fraction, complement, hj_eval, hj_expand
from .toricfan import (
    base_fan,
    blow_down_all,
    render_chain,
    resolution_fan,
    self_intersections,
    stellar_subdivide,
)

__all__ = [
    "ChainState",
    "initial_config",
    "move_a",
    "move_b",
    "mirror",
    "apply_moves",
    "plan_moves",
    "chain_of",
    "blowup_count",
    "render_chain",
]


@dataclass(frozen=True)
class ChainState:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self) -> None:
        left, right = tuple(self.left), tuple(self.right)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        if not left or not right or min(left + right) < 2:
            raise DomainError("both sides need at least one entry, all >= 2")

    @property
    def chain(self) -> tuple[int, ...]:
        return tuple(-a for a in self.left) + (-1,) + tuple(-b for b in reversed(self.right))

    def fractions(self):
        """(left value, right value); they always sum to 1."""
        return hj_eval(self.left), hj_eval(self.right)

    def __str__(self) -> str:
        return render_chain(self.chain)


def initial_config() -> ChainState:
    """Blow up Q, then the intersection point of the two (-1)-curves: -2, -1, -2."""
    return ChainState((2,), (2,))


def move_a(s: ChainState) -> ChainState:
    """Blow up the point A where the last left curve meets the (-1)-curve."""
    return ChainState(s.left[:-1] + (s.left[-1] + 1,), s.right + (2,))


def move_b(s: ChainState) -> ChainState:
    """Blow up the point B where the (-1)-curve meets the last right curve."""
    return ChainState(s.left + (2,), s.right[:-1] + (s.right[-1] + 1,))


def mirror(s: ChainState) -> ChainState:
    return ChainState(s.right, s.left)


def apply_moves(moves: Sequence[str], start: ChainState | None = None) -> ChainState:
    s = initial_config() if start is None else start
    for m in moves:
        if m == "A":
            s = move_a(s)
        elif m == "B":
            s = move_b(s)
        else:
            raise DomainError(f"unknown move {m!r}")
    return s


def plan_moves(f: FractionLike) -> tuple[str, ...]:
    """Moves after :func:`initial_config` that produce the chain of ``f``.

    Obtained by replaying the toric blow-down sequence backwards: each
    re-inserted ray sits next to the current (-1)-ray, on the left (move A)
    or on the right (move B).
    """
    fan = resolution_fan(f)
    inserts = blow_down_all(fan)[::-1]
    cur = base_fan()
    moves = []
    for n, r in enumerate(inserts):
        pos = next(
            i for i in range(len(cur.rays) - 1) if cur.rays[i] + cur.rays[i + 1] == r
        )
        if n >= 2:
            chain = self_intersections(cur)
            minus_one = chain.index(-1) + 1  # ray index of the (-1)-curve
            if pos + 1 == minus_one:
                moves.append("A")
            elif pos == minus_one:
                moves.append("B")
            else:
                raise AssertionError(f"insertion of {tuple(r)} is not next to the (-1)-curve")
        cur = stellar_subdivide(cur, pos)
    return tuple(moves)


def chain_of(f: FractionLike) -> tuple[int, ...]:
    """-e_1, ..., -e_k, -1, -e'_l, ..., -e'_1."""
    f = as_fraction(f)
    e, e2 = hj_expand(f), complement(f)
    return tuple(-c for c in e) + (-1,) + tuple(-c for c in reversed(e2.coefficients))


def blowup_count(f: FractionLike) -> int:
    """Number of blow-ups over the marked point, k + l."""
    f = as_fraction(f)
    return len(hj_expand(f)) + len(complement(f))
