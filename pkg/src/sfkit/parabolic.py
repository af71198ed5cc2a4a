"""Parabolic ruled surfaces: slopes, stability certificates, orbifold Euler numbers.

A section S of a ruled surface with marked flags Q_j of weight alpha_j has
slope

    mu(S) = S.S + sum_{Q_j not on S} alpha_j - sum_{Q_j on S} alpha_j,

and the structure is stable when every holomorphic section has mu(S) > 0.
All arithmetic is exact (``fractions.Fraction``).
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .blowup import blowup_count
from .errors import ConfigError, DomainError
from .hjfrac import FractionLike, ReducedFraction, as_fraction

__all__ = [
    "Mark",
    "ParabolicStructure",
    "SectionClass",
    "WeightPair",
    "normalize_value",
    "slope",
    "section_self_int",
    "orbifold_euler",
    "is_hyperbolic",
    "certify_p1xp1",
    "certify_elliptic_decomposable",
    "certify_txp1",
    "brute_force_min_slope",
    "total_blowups",
    "cp2_blowups",
    "mehta_seshadri_weights",
    "random_p1xp1",
    "load_structure",
    "parse_structure",
    "CatalogueEntry",
    "example_catalogue",
]

INFINITY = "inf"


def normalize_value(v) -> str:
    """Canonical text for a point of the fibre CP^1 (or a symbolic flag name).

    Numbers compare as exact rationals, so ``"0.5"``, ``"1/2"`` and ``0.5``
    coincide; ``"inf"``, ``"∞"`` and ``None`` are the point at infinity.
    """
    if v is None:
        return INFINITY
    if isinstance(v, (int, Fraction)):
        return str(Fraction(v))
    if isinstance(v, float):
        return str(Fraction(v).limit_denominator(10**12))
    s = str(v).strip()
    if s.lower() in ("inf", "infinity", "∞", "oo"):
        return INFINITY
    try:
        return str(Fraction(s))
    except (ValueError, ZeroDivisionError):
        return s


@dataclass(frozen=True)
class Mark:
    point: str
    value: str
    weight: ReducedFraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", normalize_value(self.value))
        object.__setattr__(self, "weight", as_fraction(self.weight))

    @property
    def alpha(self) -> Fraction:
        return self.weight.value


@dataclass(frozen=True)
class ParabolicStructure:
    genus: int
    marks: tuple[Mark, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "marks", tuple(self.marks))
        if self.genus < 0:
            raise DomainError("genus must be >= 0")
        ids = [m.point for m in self.marks]
        if len(set(ids)) != len(ids):
            raise DomainError(f"marked points must be distinct, got {ids}")

    @classmethod
    def from_lists(cls, genus: int, values: Sequence, weights: Sequence[FractionLike]):
        if len(values) != len(weights):
            raise DomainError("values and weights have different lengths")
        marks = tuple(
            Mark(f"P{j + 1}", v, as_fraction(w)) for j, (v, w) in enumerate(zip(values, weights))
        )
        return cls(genus, marks)

    @property
    def weights(self) -> list[Fraction]:
        return [m.alpha for m in self.marks]

    @property
    def orders(self) -> list[int]:
        return [m.weight.q for m in self.marks]

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "marks": [
                {"point": m.point, "value": m.value, "weight": m.weight.to_json()} for m in self.marks
            ],
        }


@dataclass(frozen=True)
class SectionClass:
    """Numerical data of a section: S.S and the indices j with Q_j on S."""

    self_int: int
    incidence: frozenset = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "incidence", frozenset(self.incidence))


@dataclass(frozen=True)
class WeightPair:
    beta: Fraction
    gamma: Fraction


def slope(ps: ParabolicStructure, s: SectionClass) -> Fraction:
    n = len(ps.marks)
    bad = [j for j in s.incidence if not 0 <= j < n]
    if bad:
        raise DomainError(f"incidence indices {sorted(bad)} out of range for {n} marks")
    mu = Fraction(s.self_int)
    for j, a in enumerate(ps.weights):
        mu += -a if j in s.incidence else a
    return mu


def section_self_int(deg_e: int, deg_l: int) -> int:
    """S.S = deg(E) - 2 deg(L) for the section given by a sub-bundle L of E."""
    return deg_e - 2 * deg_l


def orbifold_euler(genus: int, orders: Iterable[int]) -> Fraction:
    orders = list(orders)
    if any(q < 2 for q in orders):
        raise DomainError(f"orbifold orders must be >= 2, got {orders}")
    return Fraction(2 - 2 * genus) - sum((1 - Fraction(1, q) for q in orders), Fraction(0))


def is_hyperbolic(genus: int, orders: Iterable[int]) -> bool:
    return orbifold_euler(genus, orders) < 0


def _value_groups(values: Sequence) -> dict[str, list[int]]:
    groups: dict[str, list[int]] = {}
    for j, v in enumerate(values):
        groups.setdefault(normalize_value(v), []).append(j)
    return groups


def certify_p1xp1(values: Sequence, weights: Sequence[FractionLike]) -> bool:
    """Sufficient stability test for CP^1 x CP^1 ruled over the first factor.

    Sections are graphs of rational maps of degree d with S.S = 2d.  For
    d >= 1, mu(S) >= 2 - sum(alpha) > 0 once the weights sum to less than 2.
    Degree-0 sections are constant and pass through exactly the marks that
    share one fibre value, so each such group G needs 2 * sum_G(alpha) <
    sum(alpha), and a constant section missing every mark needs sum(alpha) > 0.
    With pairwise distinct values this is sum(alpha) > 2 max(alpha).
    """
    if len(values) != len(weights):
        raise DomainError("values and weights have different lengths")
    alphas = [as_fraction(w).value for w in weights]
    total = sum(alphas, Fraction(0))
    if not 0 < total < 2:
        return False
    return all(2 * sum(alphas[j] for j in g) < total for g in _value_groups(values).values())


def certify_elliptic_decomposable(q_on_s1: bool, q_on_s2: bool, bundles_isomorphic: bool) -> bool:
    """P(L1 + L2) over an elliptic curve, one mark of weight 1/2."""
    return not (q_on_s1 or q_on_s2 or bundles_isomorphic)


def certify_txp1(values: Sequence) -> bool:
    """T x CP^1 with three marks of weight 1/2: stable iff no two share a value."""
    if len(values) != 3:
        raise DomainError(f"expected exactly 3 marks, got {len(values)}")
    return len({normalize_value(v) for v in values}) == 3


def brute_force_min_slope(
    ps: ParabolicStructure,
    degree_bound: int,
    generic: bool = False,
    witness: bool = False,
):
    """Minimum slope over candidate sections of CP^1 x CP^1, by enumeration.

    Candidates are pairs (d, T), 0 <= d <= degree_bound, S.S = 2d, T the set
    of marks on the graph.  For d = 0 the graph is a constant section, so T
    is empty or contained in one group of equal fibre values.  For d >= 1:

    * ``generic=False`` (default) allows every T; some position of the base
      points realises each incidence, so this is the worst case over them.
    * ``generic=True`` keeps only |T| <= 2d + 1, the number of conditions a
      rational map of degree d can meet at generic base points.

    Returns the minimum slope, or ``(slope, SectionClass)`` with ``witness``.
    """
    n = len(ps.marks)
    best: Optional[tuple[Fraction, SectionClass]] = None

    def consider(d: int, t) -> None:
        nonlocal best
        s = SectionClass(2 * d, frozenset(t))
        mu = slope(ps, s)
        if best is None or mu < best[0]:
            best = (mu, s)

    consider(0, ())
    for group in _value_groups([m.value for m in ps.marks]).values():
        for r in range(1, len(group) + 1):
            for t in itertools.combinations(group, r):
                consider(0, t)
    for d in range(1, degree_bound + 1):
        rmax = min(n, 2 * d + 1) if generic else n
        for r in range(rmax + 1):
            for t in itertools.combinations(range(n), r):
                consider(d, t)
    assert best is not None
    return best if witness else best[0]


def total_blowups(ps: ParabolicStructure) -> int:
    return sum(blowup_count(m.weight) for m in ps.marks)


def cp2_blowups(ps: ParabolicStructure) -> int:
    """An n-point blow-up of CP^1 x CP^1 (n >= 1) is an (n+1)-point blow-up of CP^2."""
    if ps.genus != 0:
        raise DomainError("the CP^2 count applies to rational (genus 0) bases only")
    n = total_blowups(ps)
    if n < 1:
        raise DomainError("needs at least one blow-up")
    return n + 1


def mehta_seshadri_weights(alpha: FractionLike, beta) -> WeightPair:
    """Flag weights (beta, beta + alpha) with 0 <= beta < gamma < 1."""
    a = as_fraction(alpha).value
    beta = Fraction(beta)
    gamma = beta + a
    if not (0 <= beta < gamma < 1):
        raise DomainError(f"weights ({beta}, {gamma}) leave the window 0 <= beta < gamma < 1")
    return WeightPair(beta, gamma)


def random_p1xp1(
    rng: random.Random,
    weights: Sequence[FractionLike] = ("1/2", "1/2", "1/2", "1/3"),
    pool: Sequence[str] = ("0", "1", "inf", "2", "-1", "1/2"),
) -> ParabolicStructure:
    """A random genus-0 configuration; the small value pool forces collisions."""
    values = [rng.choice(pool) for _ in weights]
    return ParabolicStructure.from_lists(0, values, [as_fraction(w) for w in weights])


def parse_structure(obj: dict) -> ParabolicStructure:
    try:
        genus = int(obj.get("genus", 0))
        marks = []
        for j, m in enumerate(obj["marks"]):
            w = m["weight"]
            weight = ReducedFraction.from_json(w) if isinstance(w, dict) else as_fraction(w)
            marks.append(Mark(str(m.get("point", f"P{j + 1}")), m.get("value"), weight))
        return ParabolicStructure(genus, tuple(marks))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ConfigError(f"malformed parabolic structure: {exc!r}") from exc


def load_structure(path: Union[str, Path]) -> ParabolicStructure:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_structure(obj)


@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    surface: str
    weights: tuple[str, ...]
    blowups: int
    cp2_count: Optional[int]
    stable: bool
    hyperbolic: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "surface": self.surface,
            "weights": list(self.weights),
            "blowups": self.blowups,
            "cp2_count": self.cp2_count,
            "stable": self.stable,
            "hyperbolic": self.hyperbolic,
        }


def _four_point_count() -> int:
    """Blow-ups of T x CP^1 in the two-centre construction, counted through b_2.

    M' blows up two points of T x CP^1 and contracting the two proper
    transforms of the fibres gives another minimal ruled surface M.  The
    final surface is the double blow-up of M' at a third point, and also the
    double blow-up of M followed by two more blow-ups at the contracted
    centres; both routes must give the same second Betti number.
    """
    b2_minimal = 2
    double = blowup_count("1/2")
    via_m_prime = b2_minimal + 2 + double
    via_m = b2_minimal + double + 2
    assert via_m_prime == via_m
    return via_m_prime - b2_minimal


def example_catalogue() -> list[CatalogueEntry]:
    half, third = ReducedFraction(1, 2), ReducedFraction(1, 3)
    out = []

    ps = ParabolicStructure.from_lists(0, ["0", "1", "inf", "2"], [half, half, half, third])
    out.append(
        CatalogueEntry(
            "cp1xcp1-four-marks", "CP1 x CP1", ("1/2", "1/2", "1/2", "1/3"),
            total_blowups(ps), cp2_blowups(ps),
            certify_p1xp1([m.value for m in ps.marks], [m.weight for m in ps.marks]),
            is_hyperbolic(0, ps.orders),
        )
    )
    ps = ParabolicStructure.from_lists(1, ["Q"], [half])
    out.append(
        CatalogueEntry(
            "elliptic-decomposable", "P(L1 + L2) over T", ("1/2",), total_blowups(ps), None,
            certify_elliptic_decomposable(False, False, False), is_hyperbolic(1, ps.orders),
        )
    )
    ps = ParabolicStructure.from_lists(1, ["0", "1", "inf"], [half, half, half])
    out.append(
        CatalogueEntry(
            "torus-three-halves", "T x CP1", ("1/2", "1/2", "1/2"), total_blowups(ps), None,
            certify_txp1([m.value for m in ps.marks]), is_hyperbolic(1, ps.orders),
        )
    )
    out.append(
        CatalogueEntry(
            "torus-four-point", "T x CP1", ("1/2",), _four_point_count(), None,
            certify_elliptic_decomposable(False, False, False), is_hyperbolic(1, [2]),
        )
    )
    return out
