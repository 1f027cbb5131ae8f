"""Command-line front end.

    chlab ch --singlet --a 0 --a2 270 --b 135 --b2 45
    chlab sweep --singlet --start 0 --stop 90 --step 1
    chlab lp --behavior fair.json
    chlab vertices --format csv

Machine-readable output goes to stdout (or --out), diagnostics to stderr.
Exit status: 0 success, 2 validation/usage error, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import sys

from . import analysis, hvmodel, inequality, montecarlo, quantum
from .scenario import Behavior, Scenario, ValidationError

DECIMALS = 9


def _round(obj):
    if isinstance(obj, float):
        return round(obj, DECIMALS)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{v:.{DECIMALS}f}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


# ---- argument groups ----

def _add_scenario(p):
    g = p.add_argument_group("scenario (planar degrees; defaults are the canonical CH settings)")
    g.add_argument("--a", type=float, default=0.0, help="side-1 setting a")
    g.add_argument("--a2", type=float, default=270.0, help="side-1 setting a'")
    g.add_argument("--b", type=float, default=135.0, help="side-2 setting b")
    g.add_argument("--b2", type=float, default=45.0, help="side-2 setting b'")
    g.add_argument("--scenario", metavar="FILE", help="scenario JSON (overrides the angle flags)")


def _add_source(p, behavior=True, model=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--singlet", action="store_true", help="the spin singlet (default)")
    g.add_argument("--state", metavar="FILE", help="two-qubit pure state JSON")
    if model:
        g.add_argument("--model", metavar="FILE", help="hidden-variable model JSON")
    if behavior:
        g.add_argument("--behavior", metavar="FILE", help="behavior JSON")


def _add_common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="tolerance override")


def _scenario(args) -> Scenario:
    if args.scenario:
        return Scenario.from_dict(_read_json(args.scenario))
    return Scenario.from_angles(args.a, args.a2, args.b, args.b2)


def _source(args):
    """('state'|'model'|'behavior', object)."""
    if getattr(args, "behavior", None):
        return "behavior", Behavior.from_dict(_read_json(args.behavior))
    if getattr(args, "model", None):
        return "model", hvmodel.model_from_dict(_read_json(args.model))
    if getattr(args, "state", None):
        return "state", quantum.TwoQubitPureState.from_dict(_read_json(args.state))
    return "state", quantum.TwoQubitPureState.singlet()


def _behavior_of(kind, obj):
    if kind == "behavior":
        return lambda s: obj
    if kind == "model":
        return lambda s: hvmodel.model_behavior(obj, s)
    return functools.partial(quantum.state_behavior, obj)


def _tol(args, default):
    tol = default if args.tol is None else args.tol
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    return tol


def _behavior_csv(b: Behavior) -> str:
    return _csv(["entry", "value"], zip(
        ("joint(0,0)", "joint(0,1)", "joint(1,0)", "joint(1,1)",
         "single1(0)", "single1(1)", "single2(0)", "single2(1)"), b.as_vector().tolist()))


# ---- subcommands ----

def cmd_quantum(args):
    kind, obj = _source(args)
    b = _behavior_of(kind, obj)(_scenario(args))
    if args.format == "csv":
        return _behavior_csv(b)
    out = {"behavior": b.to_dict()}
    if kind == "state":
        out["schmidt_rank"] = quantum.schmidt_rank(obj)
    return _dump_json(out)


def cmd_ch(args):
    kind, obj = _source(args)
    b = _behavior_of(kind, obj)(_scenario(args))
    report = inequality.ch_statistic(b, _tol(args, inequality.DEFAULT_TOL))
    if args.format == "csv":
        return _csv(["S", "lower_ok", "upper_ok"], [[report.S, str(report.lower_ok).lower(),
                                                     str(report.upper_ok).lower()]])
    return _dump_json({"behavior": b.to_dict(), **report.to_dict()})


def cmd_sweep(args):
    kind, obj = _source(args)
    params = inequality.grid(args.start, args.stop, args.step)
    rows = inequality.ch_sweep(_behavior_of(kind, obj), inequality.canonical_family, params,
                               _tol(args, inequality.DEFAULT_TOL))
    if args.format == "json":
        return _dump_json([{"param_deg": r.param_deg, **r.report.to_dict()} for r in rows])
    return inequality.sweep_csv(rows)


def cmd_lhv(args):
    model = hvmodel.load_model(args.model)
    b = hvmodel.model_behavior(model, _scenario(args))
    report = inequality.ch_statistic(b, _tol(args, inequality.DEFAULT_TOL))
    if args.format == "csv":
        return _behavior_csv(b)
    return _dump_json({"behavior": b.to_dict(), "ch": report.to_dict()})


def cmd_audit(args):
    model = hvmodel.load_model(args.model)
    seq = model.to_sequential() if isinstance(model, hvmodel.FactorizedModel) else model
    rows = []
    for i in range(2):
        for j in range(2):
            rows.append({"pair": [i, j], "joint": hvmodel.joint_prob_sequential(seq, i, j),
                         "side1_average": hvmodel.side1_average(seq, i, j),
                         "side2_conditional_average": hvmodel.side2_conditional_average(seq, i, j),
                         "covariance": hvmodel.lambda_covariance(seq, i, j)})
    if args.format == "csv":
        return _csv(["i", "j", "joint", "side1_average", "side2_conditional_average", "covariance"],
                    [[r["pair"][0], r["pair"][1], r["joint"], r["side1_average"],
                      r["side2_conditional_average"], r["covariance"]] for r in rows])
    return _dump_json(rows)


def cmd_independence(args):
    kind, obj = _source(args)
    s = _scenario(args)
    out = {"parameter_independence_gap": analysis.parameter_independence_gap(obj, s),
           "outcome_independence_gap": analysis.outcome_independence_gap(obj, s)}
    if args.format == "csv":
        return _csv(list(out), [list(out.values())])
    return _dump_json(out)


def _target(args) -> Behavior:
    kind, obj = _source(args)
    return _behavior_of(kind, obj)(_scenario(args))


def cmd_lp(args):
    verdict = analysis.local_feasibility(_target(args), _tol(args, 1e-9))
    if args.format == "csv":
        return _csv(["status", "residual"], [[verdict.status, verdict.residual]])
    return _dump_json(verdict.to_dict())


def cmd_fit(args):
    res = analysis.fit_factorized(_target(args), args.lambdas, args.budget, args.seed, args.starts)
    if args.format == "csv":
        return _csv(["residual_inf", "residual_l2", "iterations", "seed"],
                    [[res.residual_inf, res.residual_l2, res.iterations, res.seed]])
    return _dump_json(res.to_dict())


def cmd_mc(args):
    kind, obj = _source(args)
    s = _scenario(args)
    source = _behavior_of(kind, obj)(s) if kind == "state" else obj
    table = montecarlo.simulate(source, args.n, args.seed, s, workers=args.workers,
                                model_id="singlet" if kind == "state" and not args.state else None)
    for line in montecarlo.summary_lines(table):
        print(line, file=sys.stderr)
    est = montecarlo.estimate_behavior(table)
    report, se = montecarlo.ch_with_se(est)
    if args.format == "csv":
        return _csv(["S", "se_S", "lower_ok", "upper_ok"],
                    [[report.S, se, str(report.lower_ok).lower(), str(report.upper_ok).lower()]])
    return _dump_json({"counts": table.to_dict(), "estimate": est.to_dict(), "ch": report.to_dict(), "se_S": se})


def cmd_vertices(args):
    table = analysis.max_ch_deterministic()
    rows = [["".join(map(str, r.strategy)), r.S] for r in table.rows]
    if args.format == "csv":
        return _csv(["strategy", "S"], rows)
    return _dump_json({"max_S": table.max_S, "min_S": table.min_S,
                       "rows": [{"strategy": s, "S": v} for s, v in rows]})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chlab", description="Clauser-Horne hidden-variable laboratory")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help, source=True, scenario=True, **source_kw):
        p = sub.add_parser(name, help=help)
        if source:
            _add_source(p, **source_kw)
        if scenario:
            _add_scenario(p)
        _add_common(p)
        p.set_defaults(func=func)
        return p

    add("quantum", cmd_quantum, "behavior of the singlet or a pure state", behavior=False, model=False)
    add("ch", cmd_ch, "CH statistic for a behavior, state or model")
    p = add("sweep", cmd_sweep, "CH statistic over the canonical one-parameter family", behavior=False)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=90.0)
    p.add_argument("--step", type=float, default=1.0)
    p.set_defaults(format="csv")
    p = add("lhv", cmd_lhv, "behavior and CH statistic of a hidden-variable model", source=False)
    p.add_argument("--model", required=True, metavar="FILE")
    p = add("audit", cmd_audit, "lambda-covariance per setting pair", source=False, scenario=False)
    p.add_argument("--model", required=True, metavar="FILE")
    add("independence", cmd_independence, "parameter/outcome independence gaps", behavior=False)
    add("lp", cmd_lp, "local-polytope membership with certificate")
    p = add("fit", cmd_fit, "best-fit factorized model", model=False)
    p.add_argument("--lambdas", type=int, default=4)
    p.add_argument("--budget", type=int, default=400)
    p.add_argument("--starts", type=int, default=analysis.fit.DEFAULT_STARTS)
    p = add("mc", cmd_mc, "Monte Carlo estimate of behavior and CH statistic")
    p.add_argument("--n", type=int, default=100_000, help="trials per setting pair")
    p.add_argument("--workers", type=int, default=1)
    add("vertices", cmd_vertices, "CH statistic of the 16 deterministic strategies", source=False, scenario=False)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
