"""Planar lattice fans for the local toric models of a parabolic fibre.

Rays are listed clockwise from (0, 1) to (0, -1) through the right half
plane, so consecutive rays (u, w) satisfy det(w, u) > 0; a cone is smooth
exactly when that determinant is 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import NamedTuple, Sequence

from .errors import ChainError, DomainError, MinimalFan
from .hjfrac import FractionLike, approximants, as_fraction

__all__ = [
    "Ray",
    "LatticeFan",
    "base_fan",
    "orbifold_fan",
    "resolution_fan",
    "self_intersections",
    "stellar_subdivide",
    "blow_down_step",
    "blow_down_all",
    "is_gamma_invariant",
    "render_chain",
]


class Ray(NamedTuple):
    x: int
    y: int

    def __add__(self, other):  # type: ignore[override]
        return Ray(self.x + other.x, self.y + other.y)


def _det(u: Ray, w: Ray) -> int:
    return u.x * w.y - u.y * w.x


def _check_primitive(r: Ray) -> None:
    if r == (0, 0):
        raise DomainError("zero ray")
    if gcd(abs(r.x), abs(r.y)) != 1:
        raise DomainError(f"ray {tuple(r)} is not primitive")


@dataclass(frozen=True)
class LatticeFan:
    rays: tuple[Ray, ...]

    def __post_init__(self) -> None:
        rays = tuple(Ray(int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        if len(rays) < 2:
            raise DomainError("a fan needs at least two rays")
        for r in rays:
            _check_primitive(r)
        for u, w in zip(rays, rays[1:]):
            if _det(w, u) <= 0:
                raise DomainError(f"rays {tuple(u)}, {tuple(w)} are not in strict clockwise order")

    def __len__(self) -> int:
        return len(self.rays)

    def determinants(self) -> list[int]:
        """det(w, u) for each adjacent pair; all equal to 1 for a smooth fan."""
        return [_det(w, u) for u, w in zip(self.rays, self.rays[1:])]

    def is_smooth(self) -> bool:
        return all(d == 1 for d in self.determinants())

    def to_json(self) -> dict:
        return {"rays": [[r.x, r.y] for r in self.rays]}

    @classmethod
    def from_json(cls, obj: dict) -> "LatticeFan":
        return cls(tuple(Ray(*r) for r in obj["rays"]))


def base_fan() -> LatticeFan:
    """Fan of (disc) x CP^1: cones {x>=0, y>=0} and {x>=0, y<=0}."""
    return LatticeFan((Ray(0, 1), Ray(1, 0), Ray(0, -1)))


def orbifold_fan(f: FractionLike) -> LatticeFan:
    f = as_fraction(f)
    return LatticeFan((Ray(0, 1), Ray(f.q, -f.p), Ray(0, -1)))


def resolution_fan(f: FractionLike) -> LatticeFan:
    """Minimal resolution of both cyclic quotient points in the fibre.

    Rays: (0,1), v_1..v_k, (q,-p), v'_l..v'_1, (0,-1) with v_j = (m_j, -n_j)
    from the approximants of p/q and v'_j = (m'_j, n'_j - m'_j) from those of
    (q-p)/q.
    """
    f = as_fraction(f)
    upper = [Ray(m, -n) for m, n in approximants(f)]
    lower = [Ray(m, n - m) for m, n in approximants(f.complement())]
    # both lists end at (q, -p)
    rays = [Ray(0, 1), *upper, *reversed(lower[:-1]), Ray(0, -1)]
    return LatticeFan(tuple(rays))


def self_intersections(fan: LatticeFan) -> tuple[int, ...]:
    """Self-intersection numbers of the curves attached to the interior rays.

    For an interior ray w with neighbours u, v the smooth-chain relation is
    u + v = e * w, and the curve has self-intersection -e.
    """
    rays = fan.rays
    if len(rays) < 3:
        raise DomainError("need at least one interior ray")
    out = []
    for u, w, v in zip(rays, rays[1:], rays[2:]):
        s = u + v
        if _det(s, w) != 0:
            raise ChainError(f"not a chain of smooth rational curves at ray {tuple(w)}")
        num = s.x * w.x + s.y * w.y
        den = w.x * w.x + w.y * w.y
        if num % den:
            raise ChainError(f"not a chain of smooth rational curves at ray {tuple(w)}")
        out.append(-(num // den))
    return tuple(out)


def stellar_subdivide(fan: LatticeFan, i: int) -> LatticeFan:
    """Insert rays[i] + rays[i+1] between positions i and i+1 (a blow-up)."""
    rays = fan.rays
    if not 0 <= i < len(rays) - 1:
        raise DomainError(f"cone index {i} out of range for {len(rays)} rays")
    new = rays[i] + rays[i + 1]
    return LatticeFan(rays[: i + 1] + (new,) + rays[i + 1 :])


def _deletable(fan: LatticeFan) -> list[int]:
    rays = fan.rays
    return [j for j in range(1, len(rays) - 1) if rays[j - 1] + rays[j + 1] == rays[j]]


def blow_down_step(fan: LatticeFan) -> tuple[LatticeFan, Ray]:
    """Contract the (-1)-curve whose ray has the largest x-coordinate.

    The only possible tie is between (1, 0) and (1, -1); the latter is removed
    so that the process ends on :func:`base_fan`.
    """
    idx = _deletable(fan)
    if not idx:
        raise MinimalFan("no (-1)-curve: the fan is minimal")
    j = max(idx, key=lambda j: (fan.rays[j].x, -fan.rays[j].y))
    removed = fan.rays[j]
    return LatticeFan(fan.rays[:j] + fan.rays[j + 1 :]), removed


def blow_down_all(fan: LatticeFan) -> list[Ray]:
    """Repeat :func:`blow_down_step` until the fan is minimal; return removed rays."""
    # same rule as blow_down_step on bare tuples; the removal keeps the fan valid
    rays = [tuple(r) for r in fan.rays]
    removed = []
    while True:
        best = None
        for j in range(1, len(rays) - 1):
            u, w, v = rays[j - 1], rays[j], rays[j + 1]
            if u[0] + v[0] == w[0] and u[1] + v[1] == w[1]:
                if best is None or (w[0], -w[1]) > (rays[best][0], -rays[best][1]):
                    best = j
        if best is None:
            return removed
        removed.append(Ray(*rays.pop(best)))


def is_gamma_invariant(f: FractionLike, a: int, b: int) -> bool:
    """Whether u^a v^b is fixed by diag(w, w^p), w = exp(2 pi i / q)."""
    f = as_fraction(f)
    if a < 0 or b < 0:
        raise DomainError("monomial exponents must be non-negative")
    return (a + f.p * b) % f.q == 0


def render_chain(chain: Sequence[int], ascii: bool = False) -> str:
    """Text diagram ``−2 ─ −1 ─ −2`` of a chain of self-intersections."""
    minus, bar = ("-", "-") if ascii else ("−", "─")
    return f" {bar} ".join(f"{minus}{-c}" if c < 0 else str(c) for c in chain)
