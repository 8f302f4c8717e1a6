"""Command-line front end.

    expectile-es report --dist uniform --alpha 0.34 --format json
    expectile-es curve --preset fig1
    expectile-es dual-check --dist-file atoms.csv --alpha 0.2 --n-max 256

Exit codes: 0 success, 2 usage error, 3 domain or computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import fields

import numpy as np

from .asymptotics import MdaSpec, convergence_report, ratio_curve
from .bounds import r_alpha, r_phi
from .distortion import distortion_curve, mixture_distortion
from .distributions import (
    Bernoulli,
    BetaPower,
    Exponential1,
    Koenker,
    Pareto,
    Uniform01,
    read_empirical_csv,
    read_finite_csv,
)
from .dual import verify_duality
from .errors import NonIntegrable, ParseError, RiskError, ValidationError
from .expectile import expectile_curve
from .risk import (
    Failed,
    RiskReport,
    encode_value,
    expected_shortfall,
    expectile_es,
    expectile_tce,
    risk_report,
    value_at_risk,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 2, 3

DIST_GRAMMAR = """\
distribution spec: name[:key=value,...]
  uniform | uniform01
  exponential | exponential1
  koenker
  bernoulli:p=<0<p<1>
  beta:a=<a>0>            (alias beta_power; F(x) = x^a on [0, 1])
  pareto:a=<a>1>          (F(x) = 1 - (x + 1)^-a)
  empirical:file=<csv with a value column>
  finite:file=<csv with value,prob columns>"""

GRID_GRAMMAR = "alpha grid: lo:hi:count:lin|log   e.g. 0.001:0.5:50:log"

MDA_GRAMMAR = """\
attraction class: kind[:key=value,...]
  frechet:eta=<eta>1>
  weibull:eta=<eta>0>,xhat=<endpoint>
  gumbel[:xhat=<endpoint>,weibull_tail=0|1]"""

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

# name -> (constructor, required keys)
_FAMILIES = {
    "uniform": (lambda kw: Uniform01(), ()),
    "uniform01": (lambda kw: Uniform01(), ()),
    "exponential": (lambda kw: Exponential1(), ()),
    "exponential1": (lambda kw: Exponential1(), ()),
    "koenker": (lambda kw: Koenker(), ()),
    "bernoulli": (lambda kw: Bernoulli(kw["p"]), ("p",)),
    "beta": (lambda kw: BetaPower(kw["a"]), ("a",)),
    "beta_power": (lambda kw: BetaPower(kw["a"]), ("a",)),
    "pareto": (lambda kw: _pareto(kw["a"]), ("a",)),
    "empirical": (lambda kw: read_empirical_csv(kw["file"]), ("file",)),
    "finite": (lambda kw: read_finite_csv(kw["file"]), ("file",)),
}
_FILE_KINDS = ("empirical", "finite")


def _pareto(a):
    dist = Pareto(a)
    try:
        dist.mean()
    except NonIntegrable as exc:
        raise ValidationError(f"pareto:a={a} has an infinite mean (need a > 1)") from exc
    return dist


def _split_spec(spec: str, grammar_names):
    """Split ``name[:k=v,...]`` into (name, {key: (value, value_pos, key_pos)})."""
    m = _NAME.match(spec)
    if not m:
        raise ParseError(f"expected a name in {spec!r}", 0)
    name = m.group(0)
    if name not in grammar_names:
        raise ParseError(f"unknown name {name!r}", 0)
    rest = spec[m.end():]
    pairs = {}
    if not rest:
        return name, pairs
    if rest[0] != ":":
        raise ParseError(f"expected ':' after {name!r}", m.end())
    pos = m.end() + 1
    for item in rest[1:].split(","):
        key, eq, value = item.partition("=")
        if not eq or not _NAME.fullmatch(key.strip()):
            raise ParseError(f"expected key=value, got {item!r}", pos)
        key = key.strip()
        if key in pairs:
            raise ParseError(f"duplicate key {key!r}", pos)
        pairs[key] = (value.strip(), pos + len(item) - len(value), pos)
        pos += len(item) + 1
    return name, pairs


def _float(value, pos):
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"expected a number, got {value!r}", pos) from None


def parse_dist(spec: str):
    name, pairs = _split_spec(spec.strip(), _FAMILIES)
    build, required = _FAMILIES[name]
    for key, (_, _, pos) in pairs.items():
        if key not in required:
            raise ParseError(f"{name} takes no parameter {key!r}", pos)
    missing = [k for k in required if k not in pairs]
    if missing:
        raise ParseError(f"{name} needs {', '.join(k + '=' for k in missing)}", len(spec))
    kw = {}
    for key, (value, pos, _) in pairs.items():
        kw[key] = value if name in _FILE_KINDS else _float(value, pos)
    return build(kw)


def parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 4:
        raise ParseError(f"alpha grid needs 4 fields, got {len(parts)}", 0)
    offsets = np.cumsum([0] + [len(p) + 1 for p in parts])
    lo, hi = _float(parts[0], offsets[0]), _float(parts[1], offsets[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ParseError(f"count must be an integer, got {parts[2]!r}", int(offsets[2])) from None
    if count < 1:
        raise ParseError("count must be positive", int(offsets[2]))
    if parts[3] == "lin":
        return np.linspace(lo, hi, count)
    if parts[3] == "log":
        if lo <= 0 or hi <= 0:
            raise ValidationError("log grid needs positive end points")
        return np.geomspace(lo, hi, count)
    raise ParseError(f"spacing must be lin or log, got {parts[3]!r}", int(offsets[3]))


def parse_mda(spec: str) -> MdaSpec:
    name, pairs = _split_spec(spec.strip(), ("frechet", "weibull", "gumbel"))
    allowed = {"frechet": ("eta",), "weibull": ("eta", "xhat"), "gumbel": ("xhat", "weibull_tail")}
    kw = {}
    for key, (value, pos, key_pos) in pairs.items():
        if key not in allowed[name]:
            raise ParseError(f"{name} takes no parameter {key!r}", key_pos)
        if key == "weibull_tail":
            if value not in ("0", "1"):
                raise ParseError("weibull_tail must be 0 or 1", pos)
            kw[key] = value == "1"
        else:
            kw[key] = _float(value, pos)
    try:
        return MdaSpec(name, **kw)
    except RiskError as exc:
        raise ValidationError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, Failed):
        return v.code
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    return encode_value(obj)


def _table_json(header, rows):
    return [dict(zip(header, row)) for row in rows]


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(args, header, rows):
    rows = list(rows)
    if args.format == "json":
        _emit(args, _json_text(_table_json(header, rows)))
    else:
        _emit(args, _csv_text(header, rows))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _alphas(args, default=None):
    if args.alpha_grid:
        return parse_grid(args.alpha_grid)
    if args.alpha is not None:
        return np.array([args.alpha])
    if default is not None:
        return np.asarray(default, dtype=float)
    raise ParseError("give --alpha or --alpha-grid")


def cmd_report(args):
    dist = parse_dist(args.dist)
    reports = [risk_report(dist, float(a)) for a in _alphas(args)]
    if args.format == "json":
        payload = [r.to_json() for r in reports]
        _emit(args, _json_text(payload[0] if len(payload) == 1 else payload))
    else:
        header = [f.name for f in fields(RiskReport)]
        _emit(args, _csv_text(header, ([getattr(r, h) for h in header] for r in reports)))


def _measure(fn, *a):
    try:
        return fn(*a)
    except RiskError as exc:
        return Failed(exc.code)


# Figure presets: the alpha grids and columns behind the two ratio plots
PRESET_DISTS = {
    "fig1": ("pareto:a=2", "uniform01", "koenker", "beta:a=2"),
    "fig3": ("pareto:a=2", "exponential1", "uniform01", "beta:a=2"),
}


def _preset_rows(preset):
    if preset == "fig1":
        grid = np.linspace(0.005, 0.5, 100)
        header = ["dist", "alpha", "ES", "tce", "es"]
        for spec in PRESET_DISTS[preset]:
            dist = parse_dist(spec)
            for a in grid:
                a = float(a)
                yield header, [
                    spec,
                    a,
                    _measure(expected_shortfall, dist, a),
                    _measure(expectile_tce, dist, a),
                    _measure(expectile_es, dist, a),
                ]
    else:
        grid = np.geomspace(1e-5, 0.5, 60)
        header = ["dist", "alpha", "ratio", "value"]
        for spec in PRESET_DISTS[preset]:
            dist = parse_dist(spec)
            xhat = dist.essential_bounds()[1]
            for a in grid:
                a = float(a)
                big = _measure(expected_shortfall, dist, a)
                es = _measure(expectile_es, dist, a)
                if isinstance(big, Failed) or isinstance(es, Failed):
                    name, value = "ES/es", big if isinstance(big, Failed) else es
                elif math.isfinite(xhat):
                    name = "(xhat-ES)/(xhat-es)"
                    value = (xhat - big) / (xhat - es) if xhat != es else Failed("Undefined")
                else:
                    name, value = "ES/es", big / es
                yield header, [spec, a, name, value]


def cmd_curve(args):
    if args.preset:
        pairs = list(_preset_rows(args.preset))
        _emit_table(args, pairs[0][0], [r for _, r in pairs])
        return
    if not args.dist:
        raise ParseError("curve needs --dist or --preset")
    dist = parse_dist(args.dist)
    alphas = _alphas(args)
    if args.measure == "expectile":
        curve = expectile_curve(dist, np.sort(alphas))
        _emit_table(args, ["alpha", "expectile", "residual"], curve.rows())
    elif args.measure == "quantile":
        rows = [[float(a), value_at_risk(dist, float(a))] for a in alphas]
        _emit_table(args, ["alpha", "value"], rows)
    else:
        header = ["alpha", "var", "ES", "expectile", "tce", "es"]
        rows = []
        for a in alphas:
            r = risk_report(dist, float(a))
            rows.append([r.alpha, r.var, r.es_quantile, r.expectile, r.tce_expectile, r.es_expectile])
        _emit_table(args, header, rows)


def cmd_bounds(args):
    dist = parse_dist(args.dist)
    rows = []
    for a in _alphas(args):
        a = float(a)
        low, beta = r_alpha(dist, a)
        rows.append([a, low, beta, expectile_es(dist, a), r_phi(dist, a)])
    _emit_table(args, ["alpha", "r_alpha", "beta", "es", "r_phi"], rows)


def cmd_dual_check(args):
    if args.dist_file:
        model = read_finite_csv(args.dist_file)
    elif args.dist:
        model = parse_dist(args.dist)
    else:
        raise ParseError("dual-check needs --dist-file or --dist")
    if not getattr(model, "atomic", False):
        raise ValidationError(f"dual-check needs a finite model, got {model.describe()}")
    report = verify_duality(model, args.alpha, args.n_max, args.tol)
    payload = report.to_json()
    if not args.cells:
        payload.pop("cells")
    if args.format == "json":
        _emit(args, _json_text(payload))
    else:
        rows = zip(report.n_values, report.dual_values)
        _emit(args, _csv_text(["n", "dual_value"], rows))


def cmd_asymptotics(args):
    dist = parse_dist(args.dist)
    alphas = np.sort(_alphas(args, default=np.geomspace(1e-5, 0.1, 5)))[::-1]
    if args.mda:
        mda = parse_mda(args.mda)
        report = convergence_report(dist, mda, alphas, args.tol)
        if args.format == "json":
            _emit(args, _json_text(report.to_json()))
        else:
            rows = ([k, c["limit"], c["observed"], c["passed"]] for k, c in report.checks.items())
            _emit(args, _csv_text(["column", "limit", "observed", "passed"], rows))
        return
    table = ratio_curve(dist, alphas)
    _emit_table(args, table.header(), table.rows())


def cmd_distortion(args):
    alpha = args.alpha if args.alpha is not None else 0.1
    curve = distortion_curve(alpha, args.knots)
    header = ["t", "phi", "phi_prime"]
    rows = [list(r) for r in curve.rows()]
    if args.mixture:
        try:
            lam, beta, delta = (float(x) for x in args.mixture.split(","))
        except ValueError:
            raise ParseError("mixture needs lam,beta,delta", 0) from None
        header.append("phi_mix")
        for r in rows:
            r.append(mixture_distortion(lam, beta, delta, r[0]))
    _emit_table(args, header, rows)


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="expectile-es", description="Expectile and quantile risk measures.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dist=True):
        if dist:
            sp.add_argument("--dist", help="distribution spec, e.g. pareto:a=2")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--alpha-grid", help="lo:hi:count:lin|log")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("report", help="all measures at one level or over a grid")
    common(sp)
    sp.set_defaults(func=cmd_report, need_dist=True)

    sp = sub.add_parser("curve", help="measure curves over an alpha grid")
    common(sp)
    sp.add_argument("--measure", choices=("risk", "expectile", "quantile"), default="risk")
    sp.add_argument("--preset", choices=("fig1", "fig3"))
    sp.set_defaults(func=cmd_curve, need_dist=False)

    sp = sub.add_parser("bounds", help="lower bound R_alpha, es and upper bound R_phi")
    common(sp)
    sp.set_defaults(func=cmd_bounds, need_dist=True)

    sp = sub.add_parser("dual-check", help="step-density dual values against es")
    common(sp)
    sp.add_argument("--dist-file", help="value,prob CSV")
    sp.add_argument("--n-max", type=int, default=512)
    sp.add_argument("--tol", type=float, default=5e-4)
    sp.add_argument("--cells", action="store_true", help="include per-cell details")
    sp.set_defaults(func=cmd_dual_check, need_dist=False)

    sp = sub.add_parser("asymptotics", help="small-alpha ratio table or convergence check")
    common(sp)
    sp.add_argument("--mda", help="declared attraction class, e.g. frechet:eta=2")
    sp.add_argument("--tol", type=float, default=0.05)
    sp.set_defaults(func=cmd_asymptotics, need_dist=True)

    sp = sub.add_parser("distortion", help="phi and phi' on an even grid")
    common(sp, dist=False)
    sp.add_argument("--knots", type=int, default=101)
    sp.add_argument("--mixture", help="lam,beta,delta of a two-level ES mixture")
    sp.set_defaults(func=cmd_distortion, need_dist=False)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.need_dist and not args.dist:
            raise ParseError(f"{args.command} needs --dist")
        if args.command == "dual-check" and args.alpha is None:
            raise ParseError("dual-check needs --alpha")
        args.func(args)
    except ParseError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(DIST_GRAMMAR, GRID_GRAMMAR, MDA_GRAMMAR, sep="\n", file=sys.stderr)
        return EXIT_USAGE
    except RiskError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
