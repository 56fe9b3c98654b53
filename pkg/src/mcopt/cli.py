"""Command-line experiment runner.

Every subcommand writes one report (JSON by default, CSV with --format csv).
Exit codes: 0 success, 1 a theorem check failed, 2 invalid input,
3 resource limit. Errors are also written to stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import sys

from . import audit, boost, dist, junta, majority, nncompose, predict, proper, srm
from .errors import InvalidArgumentError, McoptError

SCHEMA = "v1"


# --- I/O helpers -------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc


def _load_dist(path):
    return dist.from_json_dict(_read_json(path))


def _load_predictor(path):
    return predict.from_json(_read_json(path), role="predictor")


def _load_auditors(path):
    obj = _read_json(path)
    if isinstance(obj, dict) and "auditors" in obj:
        obj = obj["auditors"]
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise InvalidArgumentError("auditors file must hold a list of auditor objects")
    return [predict.from_json(o, role="auditor") for o in obj]


def _cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    rows = report.get("rows", [])
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _emit(args, report):
    out = {"schema": SCHEMA, "command": args.command}
    if not args.deterministic:
        out["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    out.update(report)
    text = render(out, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if out.get("ok", True) else 1


def _positive(name, value):
    if not value > 0:
        raise InvalidArgumentError(f"--{name} must be positive")


# --- subcommands ---------------------------------------------------------------

def cmd_gen_majority(args):
    D = dist.make_majority_distribution(args.m)
    return _write_dist(args, D)


def cmd_gen_random_dist(args):
    D = dist.random_distribution(args.m, args.seed, weights=args.weights, binary_eta=args.binary_eta)
    return _write_dist(args, D)


def _write_dist(args, D):
    text = dist.dumps(D)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_audit(args):
    _positive("gamma", args.gamma)
    D = _load_dist(args.dist)
    f = _load_predictor(args.predictor)
    if args.cls == "juntas":
        if args.k is None:
            raise InvalidArgumentError("--class juntas needs --k")
        value, witness = audit.max_ma_violation_juntas(D, f, args.k)
        rows = [{"auditor": predict.describe(witness), "beta": value, "gamma": args.gamma,
                 "passed": value <= args.gamma}]
        extra = {"witness": predict.to_json(witness)}
    else:
        if not args.auditors:
            raise InvalidArgumentError("--class list needs --auditors")
        results = audit.audit_class(D, f, _load_auditors(args.auditors), args.gamma)
        rows = [{"auditor": r.auditor, "beta": r.beta, "gamma": r.gamma, "passed": r.passed}
                for r in results]
        extra = {}
    return _emit(args, {"passed": all(r["passed"] for r in rows), **extra, "rows": rows})


def cmd_boost(args):
    _positive("gamma", args.gamma)
    D = _load_dist(args.dist)
    trace = boost.hkrr_boost(D, _load_predictor(args.predictor), _load_auditors(args.auditors),
                             args.gamma)
    body = trace.to_json()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump({"schema": SCHEMA, **body, "final": predict.to_json(trace.final)}, fh,
                      indent=2)
            fh.write("\n")
    rows = body.pop("iterations")
    return _emit(args, {"iterations": len(rows), "cap": boost.iteration_cap(args.gamma),
                        **body, "rows": rows})


def _opt_rows(D, nmax, k=None, alpha=None):
    curve = junta.opt_curve(D, nmax, k or 1, alpha or 1.0)
    rows = []
    for n, (o, w) in enumerate(zip(curve.opts, curve.witnesses)):
        row = {"n": n, "OPT_n": o, "coords": list(w.coords)}
        if k is not None:
            has_next = n + k < len(curve.opts)
            row["gap"] = curve.gap(n) if has_next else None
            row["unlucky"] = n in curve.unlucky
        rows.append(row)
    return curve, rows


def cmd_junta_opt(args):
    D = _load_dist(args.dist)
    if args.n is not None:
        opt, w = junta.junta_opt(D, args.n)
        return _emit(args, {"rows": [{"n": args.n, "OPT_n": opt, "coords": list(w.coords),
                                      "table": w.table.tolist()}]})
    nmax = D.dim if args.nmax is None else args.nmax
    _, rows = _opt_rows(D, nmax)
    return _emit(args, {"rows": rows})


def cmd_unlucky(args):
    _positive("alpha", args.alpha)
    D = _load_dist(args.dist)
    nmax = D.dim if args.nmax is None else args.nmax
    curve, rows = _opt_rows(D, nmax, args.k, args.alpha)
    return _emit(args, {"k": args.k, "alpha": args.alpha, "unlucky": curve.unlucky,
                        "count_bound": args.k / args.alpha, "rows": rows})


def cmd_verify_upper(args):
    _positive("alpha", args.alpha)
    D = _load_dist(args.dist)
    rep = junta.verify_upper_bound(D, args.k, args.alpha, args.epsilon, args.nmax, seed=args.seed)
    return _emit(args, rep)


def cmd_lowerbound(args):
    rep = junta.lower_bound_experiment(args.k, args.alpha, m=args.m, per_n=args.per_n,
                                       seed=args.seed)
    rep["ok"] = all(r["passed"] for r in rep["rows"])
    return _emit(args, rep)


def cmd_maj_cor(args):
    value = majority.maj_correlation(args.k, args.m, args.method)
    bound = majority.correlation_bound(args.k, args.m)
    row = {"k": args.k, "m": args.m, "method": args.method, "value": value, "bound": bound,
           "passed": value > bound}
    return _emit(args, {**row, "rows": [row]})


def cmd_compose_check(args):
    _positive("samples", args.samples)
    f = predict.dag_from_json(_read_json(args.f))
    c = predict.dag_from_json(_read_json(args.c))
    h = nncompose.compose_clip_update(f, c, args.beta)
    rep = nncompose.functional_equality_check(h, f, c, args.beta, samples=args.samples,
                                              seed=args.seed)
    inlined = nncompose.inline_linear_nodes(h)
    X = nncompose.sample_inputs(f.n_inputs, args.samples, args.seed)
    inline_disc = float(max(abs(a - b) for a, b in zip(inlined.evaluate(X), h.evaluate(X))))
    row = {"node_count_f": rep.node_count_f, "node_count_c": rep.node_count_c,
           "node_count_h": rep.node_count_h, "count_ok": rep.count_ok,
           "max_abs_discrepancy": rep.max_abs_discrepancy,
           "node_count_inlined": inlined.size, "inline_discrepancy": inline_disc}
    ok = rep.ok and rep.count_ok and inline_disc <= 1e-12
    return _emit(args, {**row, "ok": ok, "rows": [row]})


def cmd_proper(args):
    _positive("gamma", args.gamma)
    spec = proper.get_spec(args.spec)
    D = _load_dist(args.dist)
    if args.g0:
        g0 = proper.DualPredictor.from_json(_read_json(args.g0))
    else:
        g0 = proper.DualPredictor.constant(D, spec.t0)
    trace = proper.proper_boost(spec, D, g0, _load_auditors(args.auditors), args.gamma)
    body = trace.to_json()
    rows = body.pop("iterations")
    for r in rows:
        r["drop_bound"] = r["beta"] ** 2 / (2 * spec.lam)
    return _emit(args, {**body, "iterations": len(rows), "rows": rows})


def cmd_srm(args):
    _positive("alpha", args.alpha)
    D = _load_dist(args.dist)
    nmax = args.nmax if args.nmax is not None else math.ceil(args.k / args.alpha)
    sel = srm.srm_select(D, args.k, args.alpha, nmax)
    ver = srm.srm_verify(sel, D, args.k, args.alpha, args.epsilon)
    rows = [{"n": n, "objective": v, "selected": n == sel.n_star}
            for n, v in enumerate(sel.objectives)]
    return _emit(args, {"n_star": sel.n_star, "objective": sel.objective,
                        "violation": sel.violation, "audit_bound": sel.audit_bound,
                        "f_star": predict.to_json(sel.f_star), "verify": ver,
                        "ok": ver["ok"], "rows": rows})


# --- parser --------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--deterministic", action="store_true",
                        help="omit the timestamp so repeated runs are byte-identical")

    p = argparse.ArgumentParser(prog="mcopt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-majority", parents=[common])
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_gen_majority)

    s = sub.add_parser("gen-random-dist", parents=[common])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--weights", choices=("uniform", "random"), default="uniform")
    s.add_argument("--binary-eta", action="store_true")
    s.set_defaults(func=cmd_gen_random_dist)

    s = sub.add_parser("audit", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--predictor", required=True)
    s.add_argument("--class", dest="cls", choices=("juntas", "list"), default="juntas")
    s.add_argument("--k", type=int)
    s.add_argument("--auditors")
    s.add_argument("--gamma", type=float, required=True)
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("boost", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--predictor", required=True)
    s.add_argument("--auditors", required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_boost)

    s = sub.add_parser("junta-opt", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--nmax", type=int)
    s.set_defaults(func=cmd_junta_opt)

    s = sub.add_parser("unlucky", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--nmax", type=int)
    s.set_defaults(func=cmd_unlucky)

    s = sub.add_parser("verify-upper", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--epsilon", type=float, default=0.0)
    s.add_argument("--nmax", type=int)
    s.set_defaults(func=cmd_verify_upper)

    s = sub.add_parser("lowerbound", parents=[common])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--per-n", type=int, default=2)
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("maj-cor", parents=[common])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--method", choices=("brute", "fourier"), default="brute")
    s.set_defaults(func=cmd_maj_cor)

    s = sub.add_parser("compose-check", parents=[common])
    s.add_argument("--f", required=True)
    s.add_argument("--c", required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(func=cmd_compose_check)

    s = sub.add_parser("proper", parents=[common])
    s.add_argument("--spec", choices=("xent", "squared"), required=True)
    s.add_argument("--dist", required=True)
    s.add_argument("--g0")
    s.add_argument("--auditors", required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.set_defaults(func=cmd_proper)

    s = sub.add_parser("srm", parents=[common])
    s.add_argument("--dist", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--nmax", type=int)
    s.add_argument("--epsilon", type=float, default=0.0)
    s.set_defaults(func=cmd_srm)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except McoptError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        sys.stderr.write(json.dumps(err) + "\n")
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
