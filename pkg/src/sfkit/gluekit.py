"""Connected-sum scaffolding: cutoffs, weights, the glued metric and error orders.

X_1 (coordinate z near infinity) and X_2 (coordinate u near the orbifold
point) are joined along the annuli a^-1 <= |z| <= 4a^-1 and b <= |u| <= 4b
via u = ab z.  Metrics are real 4x4 matrices in the coordinates
(Re z1, Im z1, Re z2, Im z2), and likewise for u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .alemetric import ALEData, metric_cartesian, sample_directions, scalar_curvature_fd
from .errors import DomainError, RegimeError

__all__ = [
    "GlueParams",
    "OrderTerm",
    "ScalingResult",
    "connected_sum_map",
    "cutoff_theta",
    "cutoff_theta2",
    "beta_gamma",
    "partition",
    "r1",
    "r2",
    "weight_w",
    "eta_fubini_study",
    "glued_metric",
    "curvature_scaling_experiment",
    "budget_terms",
    "error_budget",
    "cutoff_derivative_bounds",
]

Eta = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GlueParams:
    a: float
    b: float
    delta: float = 0.5
    lam: float = 0.1

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"a and b must be positive, got a={self.a}, b={self.b}")
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True, order=True)
class OrderTerm:
    """The monomial a^ea b^eb."""

    ea: Fraction
    eb: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "ea", Fraction(self.ea))
        object.__setattr__(self, "eb", Fraction(self.eb))

    def in_b(self, s: Fraction) -> Fraction:
        """Exponent of b after substituting a = b^s."""
        return self.ea * s + self.eb

    def __str__(self) -> str:
        parts = [f"{v}^{e}" for v, e in (("a", self.ea), ("b", self.eb)) if e != 0]
        return "O(" + (" ".join(parts) or "1") + ")"


# -- cutoffs -------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _bump(s):
    g = (s - 1) * (2 - s)
    return np.exp(-1 / g)


def _bump_integral(lo: float, hi: float) -> float:
    """Integral of exp(-1/((s-1)(2-s))) over [lo, hi] within [1, 2]."""
    half = 0.5 * (hi - lo)
    s = lo + half * (_GL_NODES + 1)
    return float(half * np.dot(_GL_WEIGHTS, _bump(s)))


_TOTAL = _bump_integral(1.0, 2.0)


def cutoff_theta(t: float, deriv: int = 0) -> float:
    """theta_1: 1 for t <= 1, 0 for t >= 2, smooth and decreasing in between.

    ``deriv`` = 1 or 2 returns the corresponding derivative.
    """
    if t <= 1 or t >= 2:
        return (1.0 if t <= 1 else 0.0) if deriv == 0 else 0.0
    if deriv == 0:
        # integrate from the nearer end so neither tail loses digits
        if t <= 1.5:
            return 1.0 - _bump_integral(1.0, t) / _TOTAL
        return _bump_integral(t, 2.0) / _TOTAL
    g = (t - 1) * (2 - t)
    b = math.exp(-1 / g)
    if deriv == 1:
        return -b / _TOTAL
    if deriv == 2:
        return -b * (3 - 2 * t) / (g * g) / _TOTAL
    raise DomainError(f"derivative order {deriv} not supported")


def cutoff_theta2(t: float, deriv: int = 0) -> float:
    return (1.0 if deriv == 0 else 0.0) - cutoff_theta(t, deriv)


def connected_sum_map(params: GlueParams, z: Sequence[complex], tol: float = 1e-12) -> tuple[complex, complex]:
    """u = ab z on the annulus a^-1 <= |z| <= 4a^-1."""
    z1, z2 = (complex(c) for c in z)
    r = math.hypot(abs(z1), abs(z2))
    lo, hi = 1 / params.a, 4 / params.a
    if not (lo * (1 - tol) <= r <= hi * (1 + tol)):
        raise DomainError(f"|z| = {r} is outside the gluing annulus [{lo}, {hi}]")
    s = params.a * params.b
    return s * z1, s * z2


def beta_gamma(params: GlueParams, radius: float, side: int = 1) -> tuple[float, float]:
    """(beta_i, gamma_i) at |z| = radius (side 1) or |u| = radius (side 2)."""
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    lam = params.lam
    if side == 1:
        a = params.a
        return cutoff_theta((a * radius / 4) ** lam), cutoff_theta(a * radius / 2)
    if side == 2:
        t = radius / (2 * params.b)
        return cutoff_theta2(2 * t**lam), cutoff_theta2(t)
    raise DomainError(f"side must be 1 or 2, got {side}")


def partition(params: GlueParams, z_radius: float) -> tuple[float, float]:
    """(gamma_1, gamma_2) at the glued point with |z| = z_radius, |u| = ab z_radius."""
    g1 = beta_gamma(params, z_radius, 1)[1]
    g2 = beta_gamma(params, params.a * params.b * z_radius, 2)[1]
    return g1, g2


# -- weights -------------------------------------------------------------------


def r1(s: float) -> float:
    """1 for s <= 1, s for s >= 2, a smooth blend (>= 1) in between."""
    c = cutoff_theta(s)
    return c + (1 - c) * s


def r2(s: float) -> float:
    """s for s <= 1/2, 1 for s >= 1, a smooth blend (<= 1) in between."""
    c = cutoff_theta(2 * s)
    return c * s + (1 - c)


def weight_w(params: GlueParams, radius: float, chart: int = 1) -> float:
    """Weight on the glued space at |z| = radius (chart 1) or |u| = radius (chart 2)."""
    ab = params.a * params.b
    if chart == 2:
        radius, chart = radius / ab, 1
    if chart != 1:
        raise DomainError(f"chart must be 1 or 2, got {chart}")
    if radius <= 2 / params.a:
        return r1(radius)
    return r2(ab * radius) / ab


# -- metrics -------------------------------------------------------------------

_CPLX_BASIS = np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]])


def _real_form(H: np.ndarray) -> np.ndarray:
    """Real part of a hermitian form, in real coordinates (Re, Im) per factor."""
    return np.real(_CPLX_BASIS @ H @ _CPLX_BASIS.conj().T)


def eta_fubini_study(u: np.ndarray) -> np.ndarray:
    """Fubini-Study minus euclidean in affine coordinates; O(|u|^2) at the origin."""
    u = np.asarray(u, dtype=float)
    w = np.array([u[0] + 1j * u[1], u[2] + 1j * u[3]])
    n = 1 + float(np.vdot(w, w).real)
    H = np.eye(2) / n - np.outer(w.conj(), w) / n**2
    return _real_form(H) - np.eye(4)


def _eta1(d: ALEData, z: np.ndarray) -> np.ndarray:
    return metric_cartesian(d, z) - np.eye(4)


def glued_metric(
    params: GlueParams,
    d: ALEData,
    point,
    chart: int = 1,
    eta1: Optional[Eta] = None,
    eta2: Eta = eta_fubini_study,
) -> np.ndarray:
    """Components of the glued metric at a point given in chart 1 (z) or chart 2 (u).

    Chart 1 covers |z| <= 2a^-1 with delta + theta_1(a|z|) eta_1(z); chart 2
    covers |u| >= 2b with (ab)^-2 (delta + theta_2(|u|/2b) eta_2(u)).  In
    between both cutoffs vanish and the metric is flat.
    """
    X = np.asarray(point, dtype=float)
    r = float(np.linalg.norm(X))
    if chart == 1:
        if r > 2 / params.a * (1 + 1e-12):
            raise DomainError(f"|z| = {r} is outside chart 1 (|z| <= {2 / params.a})")
        c = cutoff_theta(params.a * r)
        if c == 0.0:
            return np.eye(4)
        eta = eta1(X) if eta1 is not None else _eta1(d, X)
        return np.eye(4) + c * eta
    if chart == 2:
        if r < 2 * params.b * (1 - 1e-12):
            raise DomainError(f"|u| = {r} is outside chart 2 (|u| >= {2 * params.b})")
        c = cutoff_theta2(r / (2 * params.b))
        g = np.eye(4) if c == 0.0 else np.eye(4) + c * eta2(X)
        return g / (params.a * params.b) ** 2
    raise DomainError(f"chart must be 1 or 2, got {chart}")


@dataclass(frozen=True)
class ScalingResult:
    exponent: float
    residual: float
    exact: bool
    a_values: tuple[float, ...]
    max_curvature: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "exponent": None if self.exact else self.exponent,
            "residual": self.residual,
            "exact": self.exact,
            "rows": [{"a": a, "max_curvature": m} for a, m in zip(self.a_values, self.max_curvature)],
        }


def curvature_scaling_experiment(
    d: ALEData,
    a_list: Sequence[float],
    n_radii: int = 7,
    n_dirs: int = 5,
    h_factor: float = 0.02,
    eta1: Optional[Eta] = None,
    exact_tol: float = 1e-12,
) -> ScalingResult:
    """Fit max |scalar curvature| of the flattened metric on a^-1 <= |z| <= 2a^-1 against a.

    The curvature is sampled at radii in [1.05/a, 1.95/a] along fixed
    directions, with finite-difference step h_factor / a.
    """
    a_values = tuple(float(a) for a in a_list)
    if len(a_values) < 2:
        raise DomainError("need at least two values of a")
    dirs = sample_directions(n_dirs)
    maxima = []
    for a in a_values:
        params = GlueParams(a, b=a)

        def fn(X, params=params):
            return glued_metric(params, d, X, eta1=eta1)

        worst = 0.0
        for rad in np.linspace(1.05 / a, 1.95 / a, n_radii):
            for u in dirs:
                worst = max(worst, abs(scalar_curvature_fd(fn, rad * u, h_factor / a)))
        maxima.append(worst)
    if max(maxima) <= exact_tol:
        return ScalingResult(math.inf, 0.0, True, a_values, tuple(maxima))
    la, lm = np.log(a_values), np.log(maxima)
    slope, icpt = np.polyfit(la, lm, 1)
    resid = float(np.sqrt(np.mean((lm - (slope * la + icpt)) ** 2)))
    return ScalingResult(float(slope), resid, False, a_values, tuple(maxima))


# -- order calculus ------------------------------------------------------------


def _exact(v: Union[float, Fraction, str]) -> Fraction:
    return Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def budget_terms(delta) -> tuple[OrderTerm, OrderTerm]:
    """a^(1 - delta) and a^(-delta) b^2."""
    dl = _exact(delta)
    if not 0 < dl < 1:
        raise RegimeError(f"delta = {dl} is outside (0, 1)")
    return OrderTerm(1 - dl, 0), OrderTerm(-dl, 2)


def error_budget(params: GlueParams, schedule=2) -> OrderTerm:
    """Dominant error term as a power of b under the schedule a = b^schedule.

    The dominant term is the one with the smallest exponent; b^2 = a with
    delta = 1/2 gives O(b).
    """
    s = _exact(schedule)
    if not s > 0:
        raise DomainError(f"schedule exponent must be positive, got {s}")
    return OrderTerm(0, min(t.in_b(s) for t in budget_terms(params.delta)))


def cutoff_derivative_bounds(
    params: GlueParams, k: int, frame: str = "radial", side: int = 1, samples: int = 4001
) -> float:
    """sup of |r^k d^k beta / dr^k| (radial) or |(r d/dr)^k beta| (log) over the support.

    On the support the argument s of the cutoff runs over [1, 2] and
    r ds/dr = lam s on both sides, so the bound does not depend on a or b.
    """
    if k not in (1, 2):
        raise DomainError(f"k must be 1 or 2, got {k}")
    if frame not in ("radial", "log"):
        raise DomainError(f"unknown frame {frame!r}")
    lam = params.lam
    sign = 1.0 if side == 1 else -1.0
    if side not in (1, 2):
        raise DomainError(f"side must be 1 or 2, got {side}")
    worst = 0.0
    for s in np.linspace(1.0, 2.0, samples)[1:-1]:
        t1 = sign * cutoff_theta(s, 1)
        t2 = sign * cutoff_theta(s, 2)
        first = lam * s * t1  # (r d/dr) beta
        if k == 1:
            val = first
        else:
            log2 = lam * lam * s * (t1 + s * t2)  # (r d/dr)^2 beta
            val = log2 if frame == "log" else log2 - first
        worst = max(worst, abs(val))
    return worst
