"""Command-line front end: ``sfkit <command> [options]``.

Every command builds a report dict plus an optional table of rows, then
renders it as json, text or csv.  The exit status is 0 exactly when every
verification the command performs passes; input errors exit with 2.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import alemetric, blowup, gluekit, hjfrac, orbirep, parabolic, toricfan
from .errors import DomainError

SCHEMA = 1


class Report:
    def __init__(self, command: str, ok: bool = True, table: Optional[list[dict]] = None, **fields):
        self.command = command
        self.ok = ok
        self.table = table
        self.fields = fields
        self.warnings: list[str] = []

    def as_dict(self) -> dict:
        out = {"schema": SCHEMA, "command": self.command, "ok": self.ok, **self.fields}
        if self.warnings:
            out["warnings"] = self.warnings
        if self.table is not None:
            out["rows"] = self.table
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def render(rep: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rep.as_dict(), indent=2, default=_jsonable) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        rows = rep.table
        if rows is None:
            rows = [{"key": k, "value": json.dumps(v, default=_jsonable)} for k, v in rep.as_dict().items()]
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]))
            w.writeheader()
            for r in rows:
                w.writerow({k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.items()})
        return buf.getvalue()
    lines = [f"{rep.command}: {'ok' if rep.ok else 'FAILED'}"]
    for k, v in rep.fields.items():
        if isinstance(v, (list, dict)):
            v = json.dumps(v, default=_jsonable)
        lines.append(f"  {k}: {v}")
    for w in rep.warnings:
        lines.append(f"  warning: {w}")
    if rep.table:
        keys = list(rep.table[0])
        lines.append("  " + "\t".join(keys))
        lines.extend("  " + "\t".join(str(r[k]) for k in keys) for r in rep.table)
    return "\n".join(lines) + "\n"


def _fraction(args) -> hjfrac.ReducedFraction:
    return hjfrac.ReducedFraction(args.p, args.q)


# -- combinatorics ---------------------------------------------------------------


def cmd_resolve(args) -> Report:
    f = _fraction(args)
    fan = toricfan.resolution_fan(f)
    chain = blowup.chain_of(f)
    removed = toricfan.blow_down_all(fan)
    ends = toricfan.LatticeFan(_remove(fan.rays, removed)) == toricfan.base_fan()
    count = blowup.blowup_count(f)
    return Report(
        "resolve",
        ok=fan.is_smooth() and ends and len(removed) == count and toricfan.self_intersections(fan) == chain,
        fraction=str(f),
        expansion=list(hjfrac.hj_expand(f)),
        complement_expansion=list(hjfrac.complement(f)),
        chain=list(chain),
        diagram=toricfan.render_chain(chain, ascii=args.ascii),
        rays=[list(r) for r in fan.rays],
        blow_down=[list(r) for r in removed],
        moves=list(blowup.plan_moves(f)),
        blowups=count,
    )


def _remove(rays, removed):
    gone = set(removed)
    return tuple(r for r in rays if r not in gone)


def cmd_chain(args) -> Report:
    f = _fraction(args)
    chain = blowup.chain_of(f)
    replay = blowup.apply_moves(blowup.plan_moves(f)).chain
    return Report(
        "chain",
        ok=replay == chain,
        fraction=str(f),
        chain=list(chain),
        diagram=toricfan.render_chain(chain, ascii=args.ascii),
        moves=list(blowup.plan_moves(f)),
    )


def cmd_fan(args) -> Report:
    f = _fraction(args)
    fan = toricfan.orbifold_fan(f) if args.orbifold else toricfan.resolution_fan(f)
    dets = fan.determinants() + [None]
    rows = [{"index": i, "x": r.x, "y": r.y, "det_next": d} for i, (r, d) in enumerate(zip(fan.rays, dets))]
    ok = fan.is_smooth() if not args.orbifold else True
    return Report("fan", ok=ok, table=rows, fraction=str(f), smooth=fan.is_smooth())


def cmd_blowdown(args) -> Report:
    f = _fraction(args)
    fan = toricfan.resolution_fan(f)
    rows = []
    for step in range(len(fan.rays)):
        try:
            fan, ray = toricfan.blow_down_step(fan)
        except toricfan.MinimalFan:
            break
        rows.append({"step": step + 1, "x": ray.x, "y": ray.y, "remaining": len(fan.rays)})
    expected = blowup.blowup_count(f)
    return Report(
        "blowdown",
        ok=fan == toricfan.base_fan() and len(rows) == expected,
        table=rows,
        fraction=str(f),
        steps=len(rows),
        expected_steps=expected,
        final=[list(r) for r in fan.rays],
    )


# -- parabolic -------------------------------------------------------------------

_HALF = hjfrac.ReducedFraction(1, 2)


def _stability_of(ps: parabolic.ParabolicStructure, degree_bound: int) -> dict:
    values = [m.value for m in ps.marks]
    weights = [m.weight for m in ps.marks]
    out: dict = {"genus": ps.genus, "weights": [str(w) for w in weights], "values": values}
    if ps.genus == 0:
        slope, witness = parabolic.brute_force_min_slope(ps, degree_bound, witness=True)
        out.update(
            family="CP1 x CP1",
            certified=parabolic.certify_p1xp1(values, weights),
            min_slope=str(slope),
            witness={"self_int": witness.self_int, "incidence": sorted(witness.incidence)},
        )
        out["stable"] = out["certified"]
    elif ps.genus == 1 and len(ps.marks) == 3 and all(w == _HALF for w in weights):
        out.update(family="T x CP1", certified=parabolic.certify_txp1(values))
        out["stable"] = out["certified"]
    else:
        out.update(family=None, certified=False, stable=False)
    return out


def cmd_stability(args) -> Report:
    if args.random:
        rng = random.Random(args.seed)
        rows = []
        for i in range(args.random):
            ps = parabolic.random_p1xp1(rng)
            c = parabolic.certify_p1xp1([m.value for m in ps.marks], [m.weight for m in ps.marks])
            slope = parabolic.brute_force_min_slope(ps, args.degree_bound)
            rows.append({"index": i, "values": " ".join(m.value for m in ps.marks),
                         "certified": c, "min_slope": str(slope), "agree": c == (slope > 0)})
        agree = sum(r["agree"] for r in rows)
        return Report("stability", ok=agree == len(rows), table=rows, seed=args.seed,
                      configurations=len(rows), agreement=agree)
    if not args.config:
        raise DomainError("stability needs a config file or --random N")
    ps = parabolic.load_structure(args.config)
    info = _stability_of(ps, args.degree_bound)
    chi = parabolic.orbifold_euler(ps.genus, ps.orders)
    hyp = chi < 0
    rep = Report("stability", ok=bool(info["stable"]) and hyp, **info,
                 orbifold_euler=str(chi), hyperbolic=hyp, blowups=parabolic.total_blowups(ps))
    if not hyp:
        rep.warnings.append(f"hyperbolicity condition fails: orbifold Euler characteristic {chi} >= 0")
    if info["family"] is None:
        rep.warnings.append("no stability certificate applies to this configuration")
    return rep


def cmd_euler(args) -> Report:
    chi = parabolic.orbifold_euler(args.genus, args.orders)
    return Report("euler", ok=True, genus=args.genus, orders=list(args.orders),
                  orbifold_euler=str(chi), hyperbolic=chi < 0)


def cmd_examples(args) -> Report:
    expected = {"cp1xcp1-four-marks": (9, 10), "elliptic-decomposable": (2, None),
                "torus-three-halves": (6, None), "torus-four-point": (4, None)}
    rows = []
    for e in parabolic.example_catalogue():
        row = e.to_json()
        row["weights"] = " ".join(e.weights)
        row["matches"] = expected.get(e.name) == (e.blowups, e.cp2_count) and e.stable and e.hyperbolic
        rows.append(row)
    return Report("examples", ok=all(r["matches"] for r in rows), table=rows)


def cmd_rep_check(args) -> Report:
    pres, elems = orbirep.load_rep(args.file)
    tol = args.tol if args.tol is not None else 1e-9
    relations = orbirep.check_relations(pres, elems, tol)
    irreducible = orbirep.is_irreducible(elems, tol)
    g = pres.genus
    bound = max(pres.orders, default=1) * 4
    orders = [orbirep.element_order(l, bound, tol) for l in elems[2 * g:]]
    return Report("rep-check", ok=relations and irreducible, presentation=pres.to_json(),
                  relations=relations, irreducible=irreducible, local_orders=orders)


# -- metric ----------------------------------------------------------------------


def _ale(args) -> alemetric.ALEData:
    return alemetric.ale_data(_fraction(args), args.moments)


def cmd_metric_eval(args) -> Report:
    d = _ale(args)
    pts = alemetric.sample_points(d) if not args.points else [
        alemetric.ChartPoint(*map(float, s.split(","))) for s in args.points
    ]
    rows, skipped = [], 0
    for pt in pts:
        try:
            g = alemetric.metric_at(d, pt)
        except DomainError:
            skipped += 1
            continue
        for i in range(4):
            for j in range(i, 4):
                rows.append({"x": pt.x, "y": pt.y, "i": i, "j": j, "value": float(g[i, j])})
    return Report("metric eval", ok=True, table=rows, data=d.to_json(), skipped=skipped)


def cmd_metric_curvature(args) -> Report:
    d = _ale(args)
    tol = args.tol if args.tol is not None else 1e-3
    fn = lambda X: alemetric.metric_array(d, X)  # noqa: E731
    rows, skipped = [], 0
    for pt in alemetric.sample_points(d):
        try:
            s, raw, half = alemetric.scalar_curvature_richardson(fn, pt, args.h)
        except DomainError:
            skipped += 1
            continue
        rows.append({"x": pt.x, "y": pt.y, "scalar": s, "raw_h": raw, "raw_h2": half})
    worst = max(abs(r["scalar"]) for r in rows) if rows else float("nan")
    rep = Report("metric curvature", ok=bool(rows) and worst <= tol, table=rows,
                 fraction=str(d.fraction), max_abs_scalar=worst, tol=tol, skipped=skipped)
    if alemetric.check_pairing_sign(d, alemetric.sample_points(d)) == 0:
        rep.warnings.append("<v1, v2> changes sign over the sample set")
    return rep


def cmd_metric_decay(args) -> Report:
    d = _ale(args)
    radii = np.geomspace(args.rmin, args.rmax, args.n)
    fit = alemetric.decay_fit(d, radii, frame=args.frame)
    bound = args.max_exponent if args.max_exponent is not None else (-1.5 if args.frame == "polar" else -1.0)
    rows = [{"R": r, "deviation": v} for r, v in zip(fit.radii, fit.deviations)]
    ok = fit.exact or (fit.exponent <= bound and fit.residual < 0.1)
    return Report("metric decay", ok=ok, table=rows, fraction=str(d.fraction), frame=args.frame,
                  exponent=None if fit.exact else fit.exponent, residual=fit.residual,
                  exact=fit.exact, bound=bound)


def cmd_metric_glue(args) -> Report:
    d = _ale(args)
    res = gluekit.curvature_scaling_experiment(d, args.a_sweep)
    lo, hi = args.window
    rows = [{"a": a, "max_curvature": m} for a, m in zip(res.a_values, res.max_curvature)]
    return Report("metric glue", ok=not res.exact and lo <= res.exponent <= hi, table=rows,
                  fraction=str(d.fraction), exponent=None if res.exact else res.exponent,
                  exact=res.exact, residual=res.residual, window=[lo, hi])


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="text")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="sfkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def frac_cmd(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("p", type=int)
        sp.add_argument("q", type=int)
        sp.set_defaults(func=func)
        return sp

    for sp in (frac_cmd("resolve", cmd_resolve, "continued fractions, chain, fan and blow-down order"),
               frac_cmd("chain", cmd_chain, "self-intersection chain and move sequence")):
        sp.add_argument("--ascii", action="store_true")
    frac_cmd("fan", cmd_fan, "rays of the resolution fan").add_argument("--orbifold", action="store_true")
    frac_cmd("blowdown", cmd_blowdown, "blow the resolution fan down to the base fan")

    sp = sub.add_parser("stability", parents=[common], help="certify a parabolic structure")
    sp.add_argument("config", nargs="?")
    sp.add_argument("--degree-bound", type=int, default=3)
    sp.add_argument("--random", type=int, default=0, metavar="N",
                    help="cross-check certifier and oracle on N seeded random configurations")
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("euler", parents=[common], help="orbifold Euler characteristic")
    sp.add_argument("--genus", type=int, default=0)
    sp.add_argument("orders", type=int, nargs="*")
    sp.set_defaults(func=cmd_euler)

    sp = sub.add_parser("examples", parents=[common], help="catalogue of blow-up counts")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("rep-check", parents=[common], help="verify an SU(2)/Z2 representation")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_rep_check)

    mp = sub.add_parser("metric", help="explicit ALE metric checks")
    msub = mp.add_subparsers(dest="metric_command", required=True)
    for name, func in (("eval", cmd_metric_eval), ("curvature", cmd_metric_curvature),
                       ("decay", cmd_metric_decay), ("glue", cmd_metric_glue)):
        sp = msub.add_parser(name, parents=[common])
        sp.add_argument("p", type=int)
        sp.add_argument("q", type=int)
        sp.add_argument("--moments", type=float, nargs="+", default=None)
        sp.set_defaults(func=func)
        if name == "eval":
            sp.add_argument("--points", nargs="+", metavar="x,y[,t1,t2]")
        elif name == "curvature":
            sp.add_argument("--h", type=float, default=1e-3)
        elif name == "decay":
            sp.add_argument("--rmin", type=float, default=10.0)
            sp.add_argument("--rmax", type=float, default=100.0)
            sp.add_argument("--n", type=int, default=8)
            sp.add_argument("--frame", choices=("polar", "cartesian"), default="polar")
            sp.add_argument("--max-exponent", type=float, default=None)
        else:
            sp.add_argument("--a-sweep", type=float, nargs="+", default=[1 / 20, 1 / 40, 1 / 80])
            sp.add_argument("--window", type=float, nargs=2, default=[2.5, 3.5])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(rep, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
