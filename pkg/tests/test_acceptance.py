"""Acceptance criteria, one test each.

Run with ``pytest tests/test_acceptance.py``; the terminal summary prints a
PASS/FAIL line per criterion.  Each test also enforces its runtime budget.
"""
import math
import random
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from sfkit import alemetric, blowup, gluekit, hjfrac, orbirep, parabolic, toricfan

FRACTIONS = [(1, 2), (1, 3), (2, 3), (2, 5)]


@contextmanager
def within(budget):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"


def report(msg):
    print(msg, file=sys.stderr)


@pytest.mark.criterion("HJ algebra", 5)
def test_hj_algebra():
    with within(5):
        n = 0
        for f in hjfrac.coprime_pairs(200):
            p, q = f.p, f.q
            e = hjfrac.hj_expand(f)
            assert hjfrac.hj_eval(e) == f
            rev = hjfrac.hj_eval(hjfrac.hj_reverse(e))
            assert rev.q == q and 0 < rev.p < q and (p * rev.p) % q == 1
            assert hjfrac.hj_eval(hjfrac.complement(f)).value + f.value == 1
            n += 1
        report(f"HJ algebra: {n} fractions")


def replay(removed):
    fan = toricfan.base_fan()
    for r in reversed(removed):
        i = next(i for i in range(len(fan.rays) - 1) if fan.rays[i] + fan.rays[i + 1] == r)
        fan = toricfan.stellar_subdivide(fan, i)
    return fan


@pytest.mark.criterion("Toric resolution", 30)
def test_toric_resolution():
    with within(30):
        for f in hjfrac.coprime_pairs(200):
            fan = toricfan.resolution_fan(f)
            assert all(d == 1 for d in fan.determinants())
            e, c = hjfrac.hj_expand(f), hjfrac.complement(f)
            expected = tuple(-x for x in e) + (-1,) + tuple(-x for x in reversed(list(c)))
            assert toricfan.self_intersections(fan) == expected
            removed = toricfan.blow_down_all(fan)
            assert len(removed) == len(e) + len(c)
            assert replay(removed) == fan


@pytest.mark.criterion("Blow-up counts", 1)
def test_counts():
    with within(1):
        assert blowup.blowup_count("1/2") == 2
        assert blowup.chain_of("1/2") == (-2, -1, -2)
        assert blowup.blowup_count("1/3") == 3
        cat = {e.name: e for e in parabolic.example_catalogue()}
        four = cat["cp1xcp1-four-marks"]
        assert (four.blowups, four.cp2_count) == (9, 10)
        assert cat["torus-three-halves"].blowups == 6
        assert cat["elliptic-decomposable"].blowups == 2
        assert cat["torus-four-point"].blowups == 4
        assert all(e.stable and e.hyperbolic for e in cat.values())


@pytest.mark.criterion("Euler characteristics", 1)
def test_euler_characteristics():
    with within(1):
        for genus, orders, chi in [(0, (2, 2, 2, 3), Fraction(-1, 6)), (1, (2,), Fraction(-1, 2)),
                                   (1, (2, 2, 2), Fraction(-3, 2))]:
            got = parabolic.orbifold_euler(genus, orders)
            assert got == chi and got < 0


@pytest.mark.criterion("Stability cross-check", 10)
def test_stability_cross_check():
    with within(10):
        rng = random.Random(0)
        agree = stable = 0
        for _ in range(1000):
            ps = parabolic.random_p1xp1(rng, ("1/2", "1/2", "1/2", "1/3"))
            cert = parabolic.certify_p1xp1([m.value for m in ps.marks], [m.weight for m in ps.marks])
            oracle = parabolic.brute_force_min_slope(ps, 3) > 0
            agree += cert == oracle
            stable += oracle
        report(f"stability: {agree}/1000 agree, {stable} stable")
        assert agree == 1000


@pytest.mark.criterion("Representations", 5)
def test_representations():
    with within(5):
        for f in hjfrac.coprime_pairs(50):
            assert orbirep.element_order(orbirep.local_monodromy_model(f), f.q) == f.q
        i, j, k = (orbirep.PSU2Element(0, *v) for v in np.eye(3))
        assert orbirep.check_relations(orbirep.OrbPresentation(0, (2, 2, 2)), [i, j, k])
        assert orbirep.is_irreducible([i, j, k])
        diag = [orbirep.local_monodromy_model(a) for a in ("1/2", "1/3", "2/5")]
        assert not orbirep.is_irreducible(diag)


@pytest.mark.criterion("ALE metric", 120)
def test_ale_metric():
    with within(120):
        for pq in FRACTIONS:
            d = alemetric.ale_data(pq)
            fn = lambda X, d=d: alemetric.metric_array(d, X)  # noqa: E731
            pts = alemetric.sample_points(d)
            assert len(pts) >= 20
            worst = {"s": 0.0, "s_raw": 0.0, "J2": 0.0, "gJ": 0.0, "dw": 0.0, "dw_raw": 0.0, "dJdt": 0.0}
            for pt in pts:
                s, raw, half = alemetric.scalar_curvature_richardson(fn, pt, 1e-3)
                J = alemetric.complex_structure_at(d, pt)
                g = alemetric.metric_at(d, pt)
                worst["s"] = max(worst["s"], abs(s))
                worst["s_raw"] = max(worst["s_raw"], abs(raw), abs(half))
                worst["J2"] = max(worst["J2"], np.abs(J @ J + np.eye(4)).max())
                worst["gJ"] = max(worst["gJ"], np.abs(J.T @ g @ J - g).max())
                worst["dw"] = max(worst["dw"], alemetric.kahler_residual(d, pt, 1e-3, extrapolate=True))
                worst["dw_raw"] = max(worst["dw_raw"], alemetric.kahler_residual(d, pt, 1e-3))
                worst["dJdt"] = max(worst["dJdt"], alemetric.closed_forms_residual(d, pt, 1e-3, extrapolate=True))
            report(f"ALE {pq}: " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()))
            assert worst["s"] <= 1e-3 and worst["s_raw"] <= 1e-3
            assert worst["J2"] <= 1e-12 and worst["gJ"] <= 1e-10
            assert worst["dw"] <= 1e-5 and worst["dJdt"] <= 1e-5


@pytest.mark.criterion("Asymptotics", 60)
def test_asymptotics():
    with within(60):
        radii = np.geomspace(10, 100, 8)
        for pq in FRACTIONS:
            d = alemetric.ale_data(pq)
            polar = alemetric.decay_fit(d, radii, frame="polar")
            cart = alemetric.decay_fit(d, radii, frame="cartesian")
            report(f"decay {pq}: polar {polar.exponent:.3f} ({polar.residual:.1e}), "
                   f"cartesian {cart.exponent:.3f} ({cart.residual:.1e})")
            assert polar.exponent <= -1.5 and polar.residual < 0.1
            assert cart.exponent <= -1.0 and cart.residual < 0.1


@pytest.mark.criterion("Gluing scaffolding", 120)
def test_gluing():
    with within(120):
        params = gluekit.GlueParams(a=0.01, b=0.1)
        ab = params.a * params.b
        for rz in np.geomspace(0.1, 100 / ab, 1000):
            g1, g2 = gluekit.partition(params, rz)
            assert abs(g1 + g2 - 1) <= 1e-14
            for side, r in ((1, rz), (2, ab * rz)):
                beta, gamma = gluekit.beta_gamma(params, r, side)
                assert abs(beta * gamma - gamma) <= 1e-14
            w = gluekit.weight_w(params, rz)
            assert 1 <= w <= (1 / ab) * (1 + 1e-12)
        assert gluekit.error_budget(gluekit.GlueParams(0.01, 0.1, delta=Fraction(1, 2)), schedule=2) \
            == gluekit.OrderTerm(0, 1)
        res = gluekit.curvature_scaling_experiment(alemetric.ale_data((1, 2)), [1 / 20, 1 / 40, 1 / 80])
        report(f"gluing: curvature exponent {res.exponent:.3f}, residual {res.residual:.1e}, "
               f"maxima {[f'{m:.2e}' for m in res.max_curvature]}")
        assert not res.exact
        assert 2.5 <= res.exponent <= 3.5, f"curvature exponent {res.exponent:.3f} outside [2.5, 3.5]"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-rN"]))
