"""Explicit ALE scalar-flat Kähler metrics on the minimal resolution of C^2/Z_q.

The metric lives on a half-space chart (x > 0, y) times a torus with flat
angles (t1, t2).  With moments y_0 > ... > y_k > y_{k+1} = 0 and the
approximant pairs (m_j, n_j) of p/q, set (a_j, b_j) = (m_j - m_{j+1},
n_j - n_{j+1}), r_j = sqrt(x^2 + (y - y_j)^2) and

    v1 = (x/2) sum_j (a_j, b_j) / r_j
    v2 = (1/2) sum_j (y - y_j) (a_j, b_j) / r_j

    g = x |<v1, v2>| / (x^2 + y^2)
        * [ (dx^2 + dy^2) / x^2 + (<v1, dt>^2 + <v2, dt>^2) / <v1, v2>^2 ]

where <(a, b), (c, d)> = ad - bc.  Coordinates are always ordered
(x, y, t1, t2); tensors are plain 4x4 numpy arrays.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateMetric, DomainError
from .hjfrac import FractionLike, ReducedFraction, approximants, as_fraction, hj_expand

__all__ = [
    "ALEData",
    "ChartPoint",
    "DecayFit",
    "MetricFn",
    "ale_data",
    "default_moments",
    "symplectic",
    "v_fields",
    "metric_at",
    "metric_array",
    "complex_structure_at",
    "kahler_form_at",
    "scalar_curvature_fd",
    "scalar_curvature_richardson",
    "exterior_derivative_1form",
    "exterior_derivative_2form",
    "kahler_residual",
    "closed_forms_residual",
    "polar_chart",
    "polar_from_chart",
    "polar_jacobian",
    "metric_polar",
    "flat_polar",
    "flat_model_chart",
    "metric_cartesian",
    "decay_deviation",
    "decay_fit",
    "sample_directions",
    "sample_points",
    "check_pairing_sign",
    "write_samples_csv",
    "write_samples_json",
]

MetricFn = Callable[[np.ndarray], np.ndarray]


def default_moments(k: int) -> tuple[float, ...]:
    """y_j = k + 1 - j for j = 0..k."""
    return tuple(float(k + 1 - j) for j in range(k + 1))


@dataclass(frozen=True)
class ALEData:
    fraction: ReducedFraction
    moments: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.moments) - 1

    @property
    def p(self) -> int:
        return self.fraction.p

    @property
    def q(self) -> int:
        return self.fraction.q

    @property
    def diffs(self) -> tuple[tuple[int, int], ...]:
        pr = self.pairs
        return tuple((pr[j][0] - pr[j + 1][0], pr[j][1] - pr[j + 1][1]) for j in range(len(pr) - 1))

    @cached_property
    def _ys(self) -> np.ndarray:
        return np.array(self.moments + (0.0,))

    @cached_property
    def _diffs(self) -> np.ndarray:
        return np.array(self.diffs, dtype=float)

    def to_json(self) -> dict:
        return {
            "fraction": self.fraction.to_json(),
            "moments": list(self.moments),
            "pairs": [list(p) for p in self.pairs],
            "diffs": [list(d) for d in self.diffs],
        }


def ale_data(f: FractionLike, moments: Optional[Sequence[float]] = None) -> ALEData:
    """Build the metric data for p/q; ``moments`` are y_0 > ... > y_k > 0."""
    f = as_fraction(f)
    k = len(hj_expand(f))
    ys = default_moments(k) if moments is None else tuple(float(y) for y in moments)
    if len(ys) != k + 1:
        raise DomainError(f"{f} needs {k + 1} moments (k = {k}), got {len(ys)}")
    if ys[-1] <= 0 or any(a <= b for a, b in zip(ys, ys[1:])):
        raise DomainError(f"moments must be positive and strictly decreasing, got {list(ys)}")
    pairs = ((0, -1), *approximants(f), (0, 1))
    return ALEData(f, ys, tuple(pairs))


@dataclass(frozen=True)
class ChartPoint:
    x: float
    y: float
    t1: float = 0.0
    t2: float = 0.0

    def __post_init__(self) -> None:
        if not self.x > 0:
            raise DomainError(f"chart points need x > 0, got x = {self.x}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t1, self.t2], dtype=float)


PointLike = Union[ChartPoint, Sequence[float], np.ndarray]


def _coords(pt: PointLike) -> np.ndarray:
    X = pt.as_array() if isinstance(pt, ChartPoint) else np.asarray(pt, dtype=float)
    if X.shape != (4,):
        raise DomainError(f"expected 4 coordinates, got shape {X.shape}")
    return X


def symplectic(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def _v(d: ALEData, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    dy = y - d._ys
    r = np.sqrt(x * x + dy * dy)
    w = d._diffs / r[:, None]
    return 0.5 * x * w.sum(axis=0), 0.5 * (dy[:, None] * w).sum(axis=0)


def v_fields(d: ALEData, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    if not x > 0:
        raise DomainError(f"v_fields needs x > 0, got {x}")
    return _v(d, x, y)


def _covector(v: np.ndarray) -> np.ndarray:
    # <v, dt> = v[0] dt2 - v[1] dt1
    return np.array([-v[1], v[0]])


def metric_array(d: ALEData, X: np.ndarray) -> np.ndarray:
    """Metric components at chart coordinates X = (x, y, t1, t2)."""
    x, y = float(X[0]), float(X[1])
    if not x > 0:
        raise DomainError(f"metric needs x > 0, got {x}")
    v1, v2 = _v(d, x, y)
    P = symplectic(v1, v2)
    if abs(P) < 1e-300:
        raise DegenerateMetric(f"metric degenerate at point (x={x}, y={y}): <v1, v2> = 0")
    f = x * abs(P) / (x * x + y * y)
    c1, c2 = _covector(v1), _covector(v2)
    g = np.zeros((4, 4))
    g[0, 0] = g[1, 1] = f / (x * x)
    g[2:, 2:] = f * (np.outer(c1, c1) + np.outer(c2, c2)) / (P * P)
    return g


def metric_at(d: ALEData, pt: PointLike) -> np.ndarray:
    return metric_array(d, _coords(pt))


def _jdt(d: ALEData, x: float, y: float) -> np.ndarray:
    """Rows i = 0, 1 hold the (dx, dy) coefficients of J dt_{i+1}."""
    v1, v2 = _v(d, x, y)
    r = math.hypot(x, y)
    M = np.empty((2, 2))
    M[:, 0] = (x * v1 - y * v2) / (r * x)
    M[:, 1] = (y * v1 + x * v2) / (r * x)
    return M


def complex_structure_at(d: ALEData, pt: PointLike) -> np.ndarray:
    """J as an endomorphism of tangent vectors, (J v)^i = J[i, j] v^j.

    Row i also lists the coefficients of the 1-form dX^i o J.  The t-rows
    are the forms J dt above; the (x, y) rows follow from J^2 = -I.
    """
    X = _coords(pt)
    x, y = X[0], X[1]
    if not x > 0:
        raise DomainError(f"complex structure needs x > 0, got {x}")
    M = _jdt(d, x, y)
    if abs(np.linalg.det(M)) < 1e-14 * max(1.0, np.abs(M).max() ** 2):
        raise DegenerateMetric(f"J dt1 and J dt2 are dependent at (x={x}, y={y})")
    J = np.zeros((4, 4))
    J[2:, :2] = M
    J[:2, 2:] = -np.linalg.inv(M)
    return J


def kahler_form_at(d: ALEData, pt: PointLike) -> np.ndarray:
    """omega(X, Y) = g(JX, Y) as an antisymmetric matrix."""
    J = complex_structure_at(d, pt)
    return J.T @ metric_at(d, pt)


# -- finite-difference geometry --------------------------------------------


def _checked(metric_fn: MetricFn, X: np.ndarray) -> np.ndarray:
    g = np.asarray(metric_fn(X), dtype=float)
    if not np.all(np.isfinite(g)) or abs(np.linalg.det(g)) < 1e-300:
        raise DegenerateMetric(f"singular metric in the stencil at {X.tolist()}")
    return g


def _christoffel(metric_fn: MetricFn, X: np.ndarray, h: float) -> np.ndarray:
    n = len(X)
    dg = np.empty((n, n, n))  # dg[k, i, j] = d_k g_ij
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dg[k] = (_checked(metric_fn, X + e) - _checked(metric_fn, X - e)) / (2 * h)
    ginv = np.linalg.inv(_checked(metric_fn, X))
    # S[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    S = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    return 0.5 * np.einsum("ad,dbc->abc", ginv, S)


def scalar_curvature_fd(metric_fn: MetricFn, pt: PointLike, h: float = 1e-3) -> float:
    """Scalar curvature by nested central differences; truncation error O(h^2)."""
    if not h > 0:
        raise DomainError("step h must be positive")
    X = _coords(pt)
    n = len(X)
    G = _christoffel(metric_fn, X, h)
    dG = np.empty((n, n, n, n))  # dG[k, a, b, c] = d_k Gamma^a_bc
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        dG[k] = (_christoffel(metric_fn, X + e, h) - _christoffel(metric_fn, X - e, h)) / (2 * h)
    ric = (
        np.einsum("aabc->bc", dG)
        - np.einsum("caba->bc", dG)
        + np.einsum("aad,dbc->bc", G, G)
        - np.einsum("acd,dba->bc", G, G)
    )
    ginv = np.linalg.inv(_checked(metric_fn, X))
    return float(np.einsum("bc,bc", ginv, ric))


def scalar_curvature_richardson(metric_fn: MetricFn, pt: PointLike, h: float = 1e-3):
    """(extrapolated, s(h), s(h/2)); the extrapolation cancels the h^2 term."""
    s1 = scalar_curvature_fd(metric_fn, pt, h)
    s2 = scalar_curvature_fd(metric_fn, pt, h / 2)
    return (4 * s2 - s1) / 3, s1, s2


def exterior_derivative_1form(form_fn: Callable[[np.ndarray], np.ndarray], X, h: float = 1e-3) -> np.ndarray:
    """(d alpha)_{ab} = d_a alpha_b - d_b alpha_a by central differences."""
    X = np.asarray(X, dtype=float)
    n = len(X)
    D = np.empty((n, n))  # D[a, b] = d_a alpha_b
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        D[a] = (np.asarray(form_fn(X + e)) - np.asarray(form_fn(X - e))) / (2 * h)
    return D - D.T


def exterior_derivative_2form(form_fn: Callable[[np.ndarray], np.ndarray], X, h: float = 1e-3) -> np.ndarray:
    """(d w)_{abc} = d_a w_bc + d_b w_ca + d_c w_ab by central differences."""
    X = np.asarray(X, dtype=float)
    n = len(X)
    D = np.empty((n, n, n))
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        D[a] = (np.asarray(form_fn(X + e)) - np.asarray(form_fn(X - e))) / (2 * h)
    return D + np.einsum("bca->abc", D) + np.einsum("cab->abc", D)


def _extrapolated(op: Callable[[float], np.ndarray], h: float, extrapolate: bool) -> np.ndarray:
    if not extrapolate:
        return op(h)
    return (4 * op(h / 2) - op(h)) / 3


def kahler_residual(d: ALEData, pt: PointLike, h: float = 1e-3, extrapolate: bool = False) -> float:
    """max |d omega| by finite differences, optionally Richardson-extrapolated from h and h/2."""
    X = _coords(pt)
    dw = _extrapolated(
        lambda s: exterior_derivative_2form(lambda Y: kahler_form_at(d, Y), X, s), h, extrapolate
    )
    return float(np.abs(dw).max())


def closed_forms_residual(d: ALEData, pt: PointLike, h: float = 1e-3, extrapolate: bool = False) -> float:
    """max |d(J dt_i)|; dt_i are closed, so this measures d(dt + i J dt)."""
    X = _coords(pt)
    return max(
        float(
            np.abs(
                _extrapolated(
                    lambda s: exterior_derivative_1form(lambda Y: complex_structure_at(d, Y)[2 + i], X, s),
                    h,
                    extrapolate,
                )
            ).max()
        )
        for i in range(2)
    )


# -- far field ---------------------------------------------------------------


def polar_chart(f: FractionLike, R: float, theta: float, phi: float = 0.0, psi: float = 0.0) -> ChartPoint:
    """x + i y = R^-2 e^{i(pi/2 - 2 theta)}, t1 = q psi, t2 = p psi - phi."""
    f = as_fraction(f)
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    if not 0 < theta < math.pi / 2:
        raise DomainError(f"theta = {theta} is on the boundary of (0, pi/2)")
    return ChartPoint(math.sin(2 * theta) / R**2, math.cos(2 * theta) / R**2, f.q * psi, f.p * psi - phi)


def polar_from_chart(f: FractionLike, pt: PointLike) -> tuple[float, float, float, float]:
    f = as_fraction(f)
    x, y, t1, t2 = _coords(pt)
    R = (x * x + y * y) ** -0.25
    theta = 0.5 * math.atan2(x, y)
    psi = t1 / f.q
    return R, theta, f.p * psi - t2, psi


def polar_jacobian(f: FractionLike, R: float, theta: float) -> np.ndarray:
    """d(x, y, t1, t2) / d(R, theta, phi, psi)."""
    f = as_fraction(f)
    s, c = math.sin(2 * theta), math.cos(2 * theta)
    J = np.zeros((4, 4))
    J[0, 0], J[0, 1] = -2 * s / R**3, 2 * c / R**2
    J[1, 0], J[1, 1] = -2 * c / R**3, -2 * s / R**2
    J[2, 3] = f.q
    J[3, 2], J[3, 3] = -1, f.p
    return J


def flat_polar(q: int, R: float, theta: float) -> np.ndarray:
    """2q (dR^2 + R^2 dtheta^2 + R^2 cos^2 theta dphi^2 + R^2 sin^2 theta dpsi^2)."""
    return 2 * q * np.diag([1.0, R * R, (R * math.cos(theta)) ** 2, (R * math.sin(theta)) ** 2])


def metric_polar(d: ALEData, R: float, theta: float, metric_fn: Optional[MetricFn] = None) -> np.ndarray:
    fn = metric_fn or (lambda X: metric_array(d, X))
    J = polar_jacobian(d.fraction, R, theta)
    return J.T @ fn(polar_chart(d.fraction, R, theta).as_array()) @ J


def flat_model_chart(d: ALEData) -> MetricFn:
    """The flat cone metric written in chart coordinates (x, y, t1, t2)."""

    def fn(X: np.ndarray) -> np.ndarray:
        R, theta, _, _ = polar_from_chart(d.fraction, X)
        Jinv = np.linalg.inv(polar_jacobian(d.fraction, R, theta))
        return Jinv.T @ flat_polar(d.q, R, theta) @ Jinv

    return fn


def _cartesian_jacobian(Zt: np.ndarray):
    """Polar data of z~ = (Zt0 + i Zt1, Zt2 + i Zt3) and d(R, theta, phi, psi)/d(Zt)."""
    r1, r2 = math.hypot(Zt[0], Zt[1]), math.hypot(Zt[2], Zt[3])
    if r1 == 0 or r2 == 0:
        raise DomainError("the cartesian chart needs both z~1 and z~2 nonzero")
    R = math.hypot(r1, r2)
    dr1 = np.array([Zt[0], Zt[1], 0.0, 0.0]) / r1
    dr2 = np.array([0.0, 0.0, Zt[2], Zt[3]]) / r2
    A = np.empty((4, 4))
    A[0] = Zt / R
    A[1] = (r1 * dr2 - r2 * dr1) / R**2
    A[2] = np.array([-Zt[1], Zt[0], 0.0, 0.0]) / r1**2
    A[3] = np.array([0.0, 0.0, -Zt[3], Zt[2]]) / r2**2
    polar = (R, math.atan2(r2, r1), math.atan2(Zt[1], Zt[0]), math.atan2(Zt[3], Zt[2]))
    return polar, A


def metric_cartesian(
    d: ALEData, Z, scaled: bool = True, metric_fn: Optional[MetricFn] = None
) -> np.ndarray:
    """Metric in the real coordinates of z~1 = R e^{i phi} cos theta, z~2 = R e^{i psi} sin theta.

    With ``scaled`` the coordinates are z = sqrt(2q) z~, so the far-field
    model is the identity matrix.
    """
    Z = np.asarray(Z, dtype=float)
    c = math.sqrt(2 * d.q) if scaled else 1.0
    (R, theta, phi, psi), A = _cartesian_jacobian(Z / c)
    fn = metric_fn or (lambda X: metric_array(d, X))
    J = polar_jacobian(d.fraction, R, theta) @ A / c
    return J.T @ fn(polar_chart(d.fraction, R, theta, phi, psi).as_array()) @ J


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    residual: float
    exact: bool
    radii: tuple[float, ...]
    deviations: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "exponent": None if self.exact else self.exponent,
            "residual": self.residual,
            "exact": self.exact,
            "samples": [{"R": r, "deviation": v} for r, v in zip(self.radii, self.deviations)],
        }


_THETAS = tuple(np.linspace(0.15, math.pi / 2 - 0.15, 7))


def sample_directions(n: int = 6) -> list[np.ndarray]:
    """Unit vectors of R^4 with theta spread over [0.25, pi/2 - 0.25], away from both axes."""
    out = []
    for theta in np.linspace(0.25, math.pi / 2 - 0.25, n):
        a, b = 0.3 + theta, 1.1 - 0.5 * theta
        out.append(
            np.array([math.cos(theta) * math.cos(a), math.cos(theta) * math.sin(a),
                      math.sin(theta) * math.cos(b), math.sin(theta) * math.sin(b)])
        )
    return out


def decay_deviation(d: ALEData, R: float, frame: str = "polar", metric_fn: Optional[MetricFn] = None) -> float:
    """Largest component of g - model in an orthonormal frame of the model, at radius R.

    ``polar`` compares with the flat cone in (R, theta, phi, psi); ``cartesian``
    uses z = sqrt(2q) z~ coordinates at |z~| = R, where the model is the identity.
    """
    if frame == "polar":
        worst = 0.0
        for th in _THETAS:
            G = flat_polar(d.q, R, th)
            s = 1 / np.sqrt(np.diag(G))
            D = (metric_polar(d, R, th, metric_fn) - G) * np.outer(s, s)
            worst = max(worst, float(np.abs(D).max()))
        return worst
    if frame == "cartesian":
        c = math.sqrt(2 * d.q)
        return max(
            float(np.abs(metric_cartesian(d, c * R * u, metric_fn=metric_fn) - np.eye(4)).max())
            for u in sample_directions()
        )
    raise DomainError(f"unknown frame {frame!r}")


def decay_fit(
    d: ALEData,
    R_range: Sequence[float],
    frame: str = "polar",
    metric_fn: Optional[MetricFn] = None,
    exact_tol: float = 1e-12,
) -> DecayFit:
    """Least-squares slope of log(deviation) against log R; residual is the RMS misfit."""
    radii = tuple(float(r) for r in R_range)
    if len(radii) < 3:
        raise DomainError("need at least 3 radii for a decay fit")
    if any(a >= b for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
        raise DomainError("radii must be positive and increasing")
    devs = tuple(decay_deviation(d, R, frame, metric_fn) for R in radii)
    if max(devs) <= exact_tol:
        return DecayFit(-math.inf, 0.0, True, radii, devs)
    lr, ld = np.log(radii), np.log(np.maximum(devs, 1e-300))
    slope, icpt = np.polyfit(lr, ld, 1)
    resid = float(np.sqrt(np.mean((ld - (slope * lr + icpt)) ** 2)))
    return DecayFit(float(slope), resid, False, radii, devs)


# -- sampling and dumps ------------------------------------------------------


def sample_points(
    d: ALEData,
    xs: Iterable[float] = (0.5, 1.0, 2.0, 3.0),
    ys: Iterable[float] = (-1.5, -0.4, 0.5, 1.3, 2.6),
    t: tuple[float, float] = (0.0, 0.0),
) -> list[ChartPoint]:
    """Grid of interior points; y values sitting on a moment are nudged off it."""
    out = []
    moments = set(d.moments) | {0.0}
    for x in xs:
        for y in ys:
            if y in moments:
                y += 0.05
            out.append(ChartPoint(float(x), float(y), *t))
    return out


def check_pairing_sign(d: ALEData, points: Iterable[PointLike]) -> int:
    """Sign of <v1, v2> over the points; warns when it changes."""
    signs = {int(np.sign(symplectic(*_v(d, *_coords(pt)[:2])))) for pt in points}
    if len(signs) > 1:
        warnings.warn(f"<v1, v2> changes sign across the sample set: {sorted(signs)}", RuntimeWarning)
        return 0
    return signs.pop() if signs else 0


def _metric_rows(d: ALEData, points: Iterable[PointLike]):
    for pt in points:
        X = _coords(pt)
        g = metric_array(d, X)
        for i in range(4):
            for j in range(i, 4):
                yield {"x": X[0], "y": X[1], "i": i, "j": j, "value": g[i, j]}


def write_samples_csv(d: ALEData, points: Iterable[PointLike], path: Union[str, Path]) -> int:
    rows = list(_metric_rows(d, points))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=["x", "y", "i", "j", "value"])
        w.writeheader()
        w.writerows(rows)
    return len(rows)


def write_samples_json(d: ALEData, points: Iterable[PointLike], path: Union[str, Path]) -> int:
    rows = list(_metric_rows(d, points))
    Path(path).write_text(
        json.dumps({"schema": 1, "data": d.to_json(), "samples": rows}, indent=2), encoding="utf-8"
    )
    return len(rows)
