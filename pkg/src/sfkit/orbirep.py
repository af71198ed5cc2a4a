"""Representations of orbifold surface groups into SU(2)/{±1}.

Elements are unit quaternions w + xi + yj + zk modulo sign, matching
SU(2) via

    w + xi + yj + zk  <->  [[w + ix,  y + iz],
                            [-y + iz, w - ix]].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .hjfrac import FractionLike, as_fraction

__all__ = [
    "PSU2Element",
    "OrbPresentation",
    "IDENTITY",
    "compose",
    "inverse",
    "power",
    "commutator",
    "element_order",
    "local_monodromy_model",
    "rotation_matrix",
    "check_relations",
    "is_irreducible",
    "conjugate",
    "load_rep",
]

_NORM_TOL = 1e-12
_SIGN_TOL = 1e-12


def _canonical(q: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
    for c in q:
        if abs(c) > _SIGN_TOL:
            return q if c > 0 else tuple(-v for v in q)  # type: ignore[return-value]
    return q


@dataclass(frozen=True)
class PSU2Element:
    """A unit quaternion stored with its canonical sign."""

    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self) -> None:
        q = tuple(float(c) for c in (self.w, self.x, self.y, self.z))
        n = math.sqrt(sum(c * c for c in q))
        if abs(n - 1.0) > _NORM_TOL:
            raise DomainError(f"quaternion {q} has norm {n}, not 1")
        for name, v in zip("wxyz", _canonical(q)):  # type: ignore[arg-type]
            object.__setattr__(self, name, v)

    @classmethod
    def normalized(cls, w, x=0.0, y=0.0, z=0.0) -> "PSU2Element":
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n == 0:
            raise DomainError("zero quaternion")
        return cls(w / n, x / n, y / n, z / n)

    @property
    def quaternion(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def su2(self) -> np.ndarray:
        w, x, y, z = self.quaternion
        return np.array([[w + 1j * x, y + 1j * z], [-y + 1j * z, w - 1j * x]])

    def close_to(self, other: "PSU2Element", tol: float = 1e-9) -> bool:
        a, b = np.array(self.quaternion), np.array(other.quaternion)
        return min(np.abs(a - b).max(), np.abs(a + b).max()) <= tol

    def __mul__(self, other: "PSU2Element") -> "PSU2Element":
        return compose(self, other)

    def to_json(self) -> dict:
        return {"w": self.w, "x": self.x, "y": self.y, "z": self.z}

    @classmethod
    def from_json(cls, obj: dict) -> "PSU2Element":
        try:
            return cls(*(float(obj.get(k, 0.0)) for k in "wxyz"))
        except (TypeError, AttributeError) as exc:
            raise DomainError(f"bad quaternion {obj!r}") from exc


IDENTITY = PSU2Element(1.0)


def _qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return (
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )


def compose(g: PSU2Element, h: PSU2Element) -> PSU2Element:
    return PSU2Element.normalized(*_qmul(g.quaternion, h.quaternion))


def inverse(g: PSU2Element) -> PSU2Element:
    return PSU2Element(g.w, -g.x, -g.y, -g.z)


def power(g: PSU2Element, n: int) -> PSU2Element:
    if n < 0:
        return power(inverse(g), -n)
    out = IDENTITY
    for _ in range(n):
        out = compose(out, g)
    return out


def commutator(a: PSU2Element, b: PSU2Element) -> PSU2Element:
    return compose(compose(a, b), compose(inverse(a), inverse(b)))


def conjugate(g: PSU2Element, h: PSU2Element) -> PSU2Element:
    """h g h^-1."""
    return compose(compose(h, g), inverse(h))


def element_order(g: PSU2Element, max_order: int, tol: float = 1e-9) -> Optional[int]:
    """Smallest n <= max_order with g^n = ±1, or None if there is none.

    With g = cos(t) + sin(t) u, g^n = ±1 exactly when sin(n t) = 0.
    """
    if max_order < 1:
        raise DomainError("max_order must be >= 1")
    t = math.atan2(math.hypot(g.x, g.y, g.z), abs(g.w))
    for n in range(1, max_order + 1):
        if abs(math.sin(n * t)) <= tol:
            return n
    return None


def local_monodromy_model(alpha: FractionLike) -> PSU2Element:
    """± diag(e^{i pi alpha}, e^{-i pi alpha})."""
    a = as_fraction(alpha)
    t = math.pi * a.p / a.q
    return PSU2Element(math.cos(t), math.sin(t), 0.0, 0.0)


def rotation_matrix(g: PSU2Element) -> np.ndarray:
    """Adjoint action of g on the imaginary quaternions, as an SO(3) matrix."""
    w, x, y, z = g.quaternion
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass(frozen=True)
class OrbPresentation:
    """Generators a_1, b_1, ..., a_g, b_g, l_1, ..., l_k with

    [a_1, b_1] ... [a_g, b_g] l_1 ... l_k = 1 and l_j^{q_j} = 1.
    """

    genus: int
    orders: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(int(q) for q in self.orders))
        if self.genus < 0:
            raise DomainError("genus must be >= 0")
        if any(q < 2 for q in self.orders):
            raise DomainError(f"orders must be >= 2, got {list(self.orders)}")

    @property
    def arity(self) -> int:
        return 2 * self.genus + len(self.orders)

    def to_json(self) -> dict:
        return {"genus": self.genus, "orders": list(self.orders)}

    @classmethod
    def from_json(cls, obj: dict) -> "OrbPresentation":
        return cls(int(obj["genus"]), tuple(obj.get("orders", ())))


def check_relations(pres: OrbPresentation, rep: Sequence[PSU2Element], tol: float = 1e-9) -> bool:
    if len(rep) != pres.arity:
        raise DomainError(f"expected {pres.arity} generators, got {len(rep)}")
    g = pres.genus
    total = IDENTITY
    for i in range(g):
        total = compose(total, commutator(rep[2 * i], rep[2 * i + 1]))
    for l in rep[2 * g :]:
        total = compose(total, l)
    if not total.close_to(IDENTITY, tol):
        return False
    bound = max(pres.orders, default=1)
    return all(element_order(l, bound, tol) == q for l, q in zip(rep[2 * g :], pres.orders))


def is_irreducible(rep: Sequence[PSU2Element], tol: float = 1e-9) -> bool:
    """True when no unit vector of R^3 (a point of CP^1) is fixed by every rotation.

    The stacked matrices R_g - I have a common kernel iff their smallest
    singular value vanishes.
    """
    if not rep:
        raise DomainError("empty representation")
    stacked = np.vstack([rotation_matrix(g) - np.eye(3) for g in rep])
    smallest = np.linalg.svd(stacked, compute_uv=False)[-1]
    return bool(smallest > tol)


def load_rep(path) -> tuple[OrbPresentation, list[PSU2Element]]:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    pres = OrbPresentation.from_json(obj["presentation"])
    return pres, [PSU2Element.from_json(e) for e in obj["elements"]]
