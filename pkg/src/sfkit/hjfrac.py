"""Hirzebruch-Jung (minus-sign) continued fractions of reduced fractions p/q.

Every 0 < p < q with gcd(p, q) = 1 has a unique expansion

    p/q = 1/(e_1 - 1/(e_2 - ... - 1/e_k)),   e_i >= 2.

All arithmetic is on Python integers, so the modular identities used by the
resolution combinatorics hold exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import DomainError

__all__ = [
    "ReducedFraction",
    "HJExpansion",
    "as_fraction",
    "hj_expand",
    "hj_eval",
    "hj_reverse",
    "complement",
    "approximants",
    "coprime_pairs",
]


@dataclass(frozen=True, order=True)
class ReducedFraction:
    """An exact fraction p/q with 0 < p < q and gcd(p, q) = 1."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not isinstance(self.q, int):
            raise DomainError(f"p and q must be integers, got {self.p!r}, {self.q!r}")
        if not 0 < self.p < self.q:
            raise DomainError(f"need 0 < p < q, got {self.p}/{self.q}")
        if gcd(self.p, self.q) != 1:
            raise DomainError(f"{self.p}/{self.q} is not coprime")

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def complement(self) -> "ReducedFraction":
        return ReducedFraction(self.q - self.p, self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, obj: dict) -> "ReducedFraction":
        try:
            return cls(int(obj["p"]), int(obj["q"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"expected {{'p': .., 'q': ..}}, got {obj!r}") from exc


FractionLike = Union[ReducedFraction, Fraction, tuple, str]


def as_fraction(f: FractionLike) -> ReducedFraction:
    """Coerce ``ReducedFraction``, ``Fraction``, ``(p, q)`` or ``"p/q"``.

    Tuples and strings are taken literally, so ``(2, 4)`` is rejected as not
    coprime instead of being silently reduced.
    """
    if isinstance(f, ReducedFraction):
        return f
    if isinstance(f, Fraction):
        return ReducedFraction(f.numerator, f.denominator)
    if isinstance(f, tuple) and len(f) == 2:
        return ReducedFraction(int(f[0]), int(f[1]))
    if isinstance(f, str) and "/" in f:
        p, q = f.split("/", 1)
        return ReducedFraction(int(p), int(q))
    raise DomainError(f"cannot interpret {f!r} as a reduced fraction")


@dataclass(frozen=True)
class HJExpansion:
    """Coefficients e_1, ..., e_k of a Hirzebruch-Jung continued fraction."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if not coeffs:
            raise DomainError("empty continued fraction")
        bad = [c for c in coeffs if c < 2]
        if bad:
            raise DomainError(f"coefficients must be >= 2, got {list(coeffs)}")

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def to_json(self) -> dict:
        return {"coefficients": list(self.coefficients)}

    @classmethod
    def from_json(cls, obj: dict) -> "HJExpansion":
        return cls(tuple(obj["coefficients"]))


def _as_expansion(e: Union[HJExpansion, Iterable[int]]) -> HJExpansion:
    return e if isinstance(e, HJExpansion) else HJExpansion(tuple(e))


def hj_expand(f: FractionLike) -> HJExpansion:
    """Expand p/q; e_1 = ceil(q/p) and recurse on e_1 - q/p = (e_1 p - q)/p."""
    f = as_fraction(f)
    p, q = f.p, f.q
    coeffs = []
    while p:
        e = -(-q // p)
        coeffs.append(e)
        p, q = e * p - q, p
    return HJExpansion(tuple(coeffs))


def hj_eval(e: Union[HJExpansion, Sequence[int]]) -> ReducedFraction:
    e = _as_expansion(e)
    # evaluate from the innermost level outwards: x_k = 1/e_k, x_i = 1/(e_i - x_{i+1})
    value = Fraction(0)
    for c in reversed(e.coefficients):
        value = 1 / (c - value)
    return ReducedFraction(value.numerator, value.denominator)


def hj_reverse(e: Union[HJExpansion, Sequence[int]]) -> HJExpansion:
    """Reverse the coefficient list.

    If ``e`` expands lam/mu then the reversal expands lam'/mu with
    lam * lam' = 1 (mod mu).
    """
    e = _as_expansion(e)
    return HJExpansion(e.coefficients[::-1])


def complement(f: FractionLike) -> HJExpansion:
    """Expansion of (q - p)/q."""
    return hj_expand(as_fraction(f).complement())


def approximants(f: FractionLike) -> list[tuple[int, int]]:
    """Pairs (m_j, n_j), j = 1..k+1, with n_j/m_j the expansion truncated after e_{j-1}.

    Uses m_{j+1} = e_j m_j - m_{j-1} seeded by (m_0, n_0) = (0, -1) and
    (m_1, n_1) = (1, 0); the last pair is (q, p).
    """
    e = hj_expand(f)
    prev, cur = (0, -1), (1, 0)
    out = [cur]
    for c in e:
        prev, cur = cur, (c * cur[0] - prev[0], c * cur[1] - prev[1])
        out.append(cur)
    return out


def coprime_pairs(qmax: int, qmin: int = 2):
    """All reduced fractions p/q with qmin <= q <= qmax."""
    for q in range(qmin, qmax + 1):
        for p in range(1, q):
            if gcd(p, q) == 1:
                yield ReducedFraction(p, q)
