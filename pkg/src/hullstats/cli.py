"""Command-line entry point: ``hullstats <subcommand> [options]``.

Subcommands: laws, finite, series, oracle, mc, figures, selftest.  Tables
are CSV with ``#`` metadata lines (tool version, command, formula); the
same arguments always give byte-identical output.

Exit codes: 0 success, 1 a validation check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exactnum import DEFAULT_PRECISION, MIN_SINGULAR_PRECISION, rational_from_string
from .families import Family

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers --------------------------------------------------------------------------

def parse_grid(text: str | None) -> list[str]:
    """``"0.1,0.5"`` or ``"start:stop:count"`` (inclusive linear grid) -> list of number strings."""
    if text is None:
        return []
    text = str(text).strip()
    if text.count(":") == 2:
        a, b, n = text.split(":")
        n = int(n)
        if n < 1:
            raise UsageError(f"empty grid {text!r}")
        a, b = Fraction(a), Fraction(b)
        if n == 1:
            return [str(a)]
        return [str(a + (b - a) * j / (n - 1)) for j in range(n)]
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError(f"empty grid {text!r}")
    return items


def _num(s: str) -> float:
    return float(rational_from_string(s))


def read_config(path: str) -> dict:
    kv = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"malformed config line in {path}: {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key.replace("-", "_").lower()] = value
    return kv


def _table(columns, rows, meta, fmt="csv") -> str:
    if fmt == "json":
        return json.dumps({"meta": meta, "columns": columns, "rows": rows}, indent=1, default=str) + "\n"
    import csv
    import io

    buf = io.StringIO()
    for line in meta:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _meta(args, formula: str) -> list[str]:
    argv = " ".join(getattr(args, "_argv", []))
    lines = [f"hullstats {__version__}", f"command: hullstats {argv}".rstrip(), f"formula: {formula}"]
    if getattr(args, "config", None) and args.command != "mc":
        kv = read_config(args.config)
        lines.append("config: " + "; ".join(f"{k}={v}" for k, v in sorted(kv.items())))
    return lines


def _emit(text: str, args) -> None:
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- laws -----------------------------------------------------------------------------

LAW_OPS = {
    "regime_probability": ("u",),
    "perimeter_density": ("L", "u"),
    "perimeter_density_limit": ("L",),
    "regime_posterior": ("L", "u"),
    "perimeter_expectation": ("u",),
    "joint_laplace": ("sigma", "tau", "u"),
    "volume_laplace_given_L": ("sigma", "L"),
    "mean_volume_out": ("u",),
    "complement_volume_mean": ("u",),
    "M": ("mu",),
    "M_check": ("X",),
    "Q": ("mu", "B"),
    "Q_check": ("X", "B"),
}

_FORMULAS = {
    "regime_probability": "p_out(u) = (4-7u^6+3u^7)/4, p_in(u) = (7-3u)u^6/4",
    "perimeter_density": "joint density of regime and rescaled perimeter L",
    "perimeter_density_limit": "u->0 / u->1 limits of the conditional perimeter densities",
    "regime_posterior": "probability of each regime given the rescaled perimeter",
    "perimeter_expectation": "mean rescaled perimeter (conditioned or not)",
    "joint_laplace": "E[exp(-sigma V - tau L) | out]",
    "volume_laplace_given_L": "E[exp(-sigma V) | L], the same for all u",
    "mean_volume_out": "E[V | out]",
    "complement_volume_mean": "E[W/k^4 | in] for the complement volume W",
    "M": "Laplace kernel M(mu)", "M_check": "inverse Laplace kernel of M",
    "Q": "Laplace kernel Q(mu, B)", "Q_check": "inverse Laplace kernel of Q",
}


def _exact_regime(u: Fraction, regime: str) -> Fraction:
    if regime == "out":
        return (4 - 7 * u**6 + 3 * u**7) / 4
    return (7 - 3 * u) * u**6 / 4


def cmd_laws(args) -> int:
    from itertools import product

    from . import limit_laws as ll

    op = args.op
    if op not in LAW_OPS:
        raise UsageError(f"unknown op {op!r}; choose from {sorted(LAW_OPS)}")
    fam = Family.parse(args.family)
    grids = {}
    for name in LAW_OPS[op]:
        grids[name] = parse_grid(getattr(args, name))
        if not grids[name]:
            raise UsageError(f"--{name} is required for {op}")
    names = list(grids)
    extra = {"c": None if args.c is None else _num(args.c)}
    rows = []
    columns = names[:]
    for combo in product(*(grids[n] for n in names)):
        vals = dict(zip(names, combo))
        x = {k: _num(v) for k, v in vals.items()}
        if op == "regime_probability":
            columns = names + ["regime", "value", "exact"]
            regimes = ("out", "in") if args.regime in (None, "both") else (args.regime,)
            for reg in regimes:
                exact = _exact_regime(rational_from_string(vals["u"]), reg)
                rows.append([*combo, reg, ll.regime_probability(x["u"], reg), str(exact)])
            continue
        if op == "perimeter_density":
            columns = names + ["regime", "value"]
            reg = args.regime or "total"
            rows.append([*combo, reg, float(ll.perimeter_density(x["L"], x["u"], reg, fam, **extra))])
        elif op == "perimeter_density_limit":
            columns = names + ["which", "value"]
            which = args.which or "out_u0"
            rows.append([*combo, which, float(ll.perimeter_density_limit(x["L"], which, fam, **extra))])
        elif op == "regime_posterior":
            columns = names + ["pi_out", "pi_in"]
            rows.append([*combo, *ll.regime_posterior(x["L"], x["u"], fam, **extra)])
        elif op == "perimeter_expectation":
            columns = names + ["regime", "value"]
            reg = args.regime or "none"
            rows.append([*combo, reg, ll.perimeter_expectation_limit(x["u"], reg, fam, **extra)])
        elif op == "joint_laplace":
            columns = names + ["value"]
            rows.append([*combo, ll.joint_laplace(x["sigma"], x["tau"], x["u"], fam, **extra)])
        elif op == "volume_laplace_given_L":
            columns = names + ["value"]
            rows.append([*combo, ll.volume_laplace_given_L(x["sigma"], x["L"], fam, **extra)])
        elif op == "mean_volume_out":
            columns = names + ["value"]
            rows.append([*combo, ll.mean_volume_out(x["u"], fam)])
        elif op == "complement_volume_mean":
            columns = names + ["value"]
            rows.append([*combo, ll.complement_volume_mean(x["u"], fam)])
        else:
            columns = names + ["value"]
            rows.append([*combo, float(ll.laplace_kernels(op, *(x[n] for n in names)))])
    meta = _meta(args, _FORMULAS[op]) + [f"family {fam.roman} (c={fam.c:g}, f={fam.f:g})"]
    _emit(_table(columns, rows, meta, args.format), args)
    return EXIT_OK


# -- finite ---------------------------------------------------------------------------

def cmd_finite(args) -> int:
    from . import finite_laws as fl

    fam = Family.parse(args.family)
    q = args.quantity
    rows = []
    if q == "pmf":
        if args.d is None:
            raise UsageError("--d is required for the pmf")
        d = int(args.d)
        pmf = fl.perimeter_pmf(d, fam, args.p_max)
        columns = ["perimeter", "probability", "probability_decimal"]
        for perim, m in sorted(pmf.masses.items()):
            rows.append([perim, str(m), float(m)])
        total = fl.pmf_total_mass(d, fam)
        meta = _meta(args, "discrete perimeter law at k = infinity") + [
            f"family {fam.roman}, d={d}, closed-form total mass {total}"]
        _emit(_table(columns, rows, meta, args.format), args)
        return EXIT_OK
    if args.k is None:
        raise UsageError("--k is required")
    k = int(args.k)
    if args.all_d:
        ds = list(range(2, k))
    elif args.d is not None:
        ds = [int(v) for v in parse_grid(args.d)]
    else:
        raise UsageError("give --d or --all-d")
    if q == "regime":
        columns = ["k", "d", "u", "p_finite", "p_infinite", "p_finite_decimal", "p_infinite_decimal", "complement_defined"]
        for d in ds:
            r = fl.regime_probabilities(k, d, fam)
            rows.append([k, d, d / k, str(r.p_finite), str(r.p_infinite),
                         float(r.p_finite), float(r.p_infinite), r.complement_defined])
        formula = "exact out/in probabilities at finite k and d"
    elif q == "perimeter":
        if fam is not Family.QUADRANGULATION:
            raise UsageError("finite perimeter expectations exist for family i only")
        columns = ["k", "d", "u", "regime", "E_perimeter", "E_perimeter_decimal", "E_over_d2"]
        for d in ds:
            for reg in ("out", "in"):
                e = fl.perimeter_expectation(k, d, reg)
                rows.append([k, d, d / k, reg, str(e), float(e), float(e) / d**2])
        formula = "exact E_k[perimeter | regime] at finite k and d"
    else:
        raise UsageError(f"unknown quantity {q!r}")
    meta = _meta(args, formula) + [f"family {fam.roman}"]
    _emit(_table(columns, rows, meta, args.format), args)
    return EXIT_OK


# -- series ---------------------------------------------------------------------------

def cmd_series(args) -> int:
    import mpmath

    from . import gf_engine as gf

    q = args.quantity
    precision = args.precision
    rows = []
    if q in ("F", "G", "H_Td", "Y_Td"):
        if precision < MIN_SINGULAR_PRECISION:
            raise UsageError(f"singular extraction needs --precision >= {MIN_SINGULAR_PRECISION}")
        exp = gf.singular_extract(q, args.k, args.d, order=args.order, precision=precision)
        columns = ["power", "coefficient"]
        with mpmath.workdps(precision):
            for n, c in enumerate(exp.coeffs):
                rows.append([n, mpmath.nstr(c, precision - 5)])
        formula = f"expansion of {exp.quantity} in {exp.variable} at the critical point"
    elif q == "F_coeffs":
        s = gf.F_series(args.k, args.order)
        columns = ["N", "coefficient"]
        rows = [[n, str(s[n])] for n in range(args.order)]
        formula = f"[g^N] F(k={args.k}, g)"
    elif q == "G_coeffs":
        if args.d is None:
            raise UsageError("--d is required for G_coeffs")
        t = gf.G_coeffs(args.k, args.d, args.order, args.order)
        columns = ["n1", "n2", "ell", "coefficient"]
        rows = [[*key, str(v)] for key, v in sorted(t.entries.items())]
        formula = f"[g^n1 h^n2 alpha^ell] G(k={args.k}, d={args.d})"
    elif q == "propK":
        lam = rational_from_string(args.lam)
        r = gf.check_propK(args.order, lam)
        columns = ["power", "residual"]
        rows = [[n, str(r[n])] for n in range(len(r))]
        formula = f"operator identity residual at lambda={lam}"
        _emit(_table(columns, rows, _meta(args, formula), args.format), args)
        return EXIT_OK if r.is_zero() else EXIT_FAIL
    else:
        raise UsageError(f"unknown quantity {q!r}")
    _emit(_table(columns, rows, _meta(args, formula), args.format), args)
    return EXIT_OK


# -- oracle ---------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    from . import enum_oracle as eo

    if args.compare:
        if args.k is None or args.d is None:
            raise UsageError("--compare needs --k and --d")
        bad = eo.compare_with_series(args.k, int(args.d), args.N, args.prescription)
        columns = ["N", "k", "d", "V", "L", "census", "series"]
        meta = _meta(args, "hull census against generating-function coefficients") + [
            f"prescription {args.prescription}: {len(bad)} mismatching cells"]
        _emit(_table(columns, [list(b) for b in bad], meta, args.format), args)
        return EXIT_OK if not bad else EXIT_FAIL
    if args.check_F:
        from .gf_engine import F_series

        bad = []
        rows = []
        for N in range(1, args.N + 1):
            counts = eo.census(N, args.prescription).counts_by_k
            for k in sorted(counts):
                want = F_series(k, args.N + 1)[N]
                rows.append([N, k, counts[k], want])
                if counts[k] != want:
                    bad.append((N, k))
        _emit(_table(["N", "k", "census", "series"], rows,
                     _meta(args, "census counts by distance against [g^N] F(k, g)"), args.format), args)
        return EXIT_OK if not bad else EXIT_FAIL
    text = eo.census_csv(args.N, args.prescription)
    meta = "".join(f"# {m}\n" for m in _meta(args, "exhaustive hull census (N, k, d, V, L, count)"))
    _emit(meta + text, args)
    return EXIT_OK


# -- mc -------------------------------------------------------------------------------

def cmd_mc(args) -> int:
    from .mc.experiment import parse_plan, run_experiment

    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    overrides = {"N": args.N, "samples": args.samples, "seed": args.seed, "workers": args.workers,
                 "k_bins": args.k_bins, "d": args.d, "d_ratio": args.d_ratio,
                 "observables": args.observables, "prescription": args.prescription,
                 "backend": args.backend}
    try:
        plan = parse_plan(text, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_experiment(plan)
    meta = _meta(args, "Monte Carlo estimates; regime proxy: out iff V(d) <= N/2") + [f"plan: {plan.describe()}"]
    _emit(result.to_csv(meta), args)
    return EXIT_OK


# -- figures --------------------------------------------------------------------------

def cmd_figures(args) -> int:
    from . import figures

    fam = Family.parse(args.family)
    which = sorted(figures.BUILDERS) if args.which == "all" else [int(w) for w in parse_grid(args.which)]
    for w in which:
        if w not in figures.BUILDERS:
            raise UsageError(f"no data for figure {w}; available {sorted(figures.BUILDERS)}")
    outdir = Path(args.outdir) if args.outdir else None
    if outdir is None and len(which) > 1 and not args.output:
        raise UsageError("several figures need --outdir")
    for w in which:
        table = figures.build(w, fam)
        text = figures.write_csv(table, [f"hullstats {__version__}"])
        if outdir is not None:
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / f"fig{w:02d}_{fam.roman}.csv").write_text(text, encoding="utf-8")
        else:
            _emit(text, args)
    return EXIT_OK


# -- selftest -------------------------------------------------------------------------

def cmd_selftest(args) -> int:
    from . import acceptance

    skip = set()
    if args.skip_mc:
        skip.add(12)
    if args.only:
        wanted = {int(v) for v in parse_grid(args.only)}
        skip |= {c.number for c in acceptance.CHECKS} - wanted
    results = acceptance.run_all(skip=skip, mc_samples=args.mc_samples, workers=args.workers,
                                 report=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing check: criterion {failed[0].number} ({failed[0].name})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hullstats", description="Hull perimeter and volume statistics of random planar maps.")
    p.add_argument("--version", action="version", version=f"hullstats {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, family=True):
        sp.add_argument("--config", help="file of key = value lines supplying option defaults")
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if family:
            sp.add_argument("--family", default="i", help="i (quadrangulations), ii (triangulations), iii (Eulerian)")

    s = sub.add_parser("laws", help="evaluate limit laws on grids")
    common(s)
    s.add_argument("--op", required=False, default="regime_probability", help=", ".join(LAW_OPS))
    for name in ("u", "L", "X", "sigma", "tau", "mu", "B"):
        s.add_argument(f"--{name}", help="comma list or start:stop:count")
    s.add_argument("--regime", choices=("out", "in", "total", "none", "both"))
    s.add_argument("--which", choices=("out_u0", "out_u1", "in_u0", "in_u1_X"))
    s.add_argument("--c", help="override the perimeter constant c")
    s.set_defaults(func=cmd_laws)

    s = sub.add_parser("finite", help="exact finite-k laws")
    common(s)
    s.add_argument("--quantity", choices=("regime", "perimeter", "pmf"), default="regime")
    s.add_argument("--k", type=int)
    s.add_argument("--d")
    s.add_argument("--all-d", action="store_true")
    s.add_argument("--p-max", type=int, default=20)
    s.set_defaults(func=cmd_finite)

    s = sub.add_parser("series", help="generating-function series and singular expansions")
    common(s, family=False)
    s.add_argument("--quantity", choices=("F", "G", "H_Td", "Y_Td", "F_coeffs", "G_coeffs", "propK"), default="F")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--d", type=int)
    s.add_argument("--order", type=int, default=10)
    s.add_argument("--lam", default="1/10")
    s.add_argument("--precision", type=int,
                   default=int(os.environ.get("HULLSTATS_PRECISION", DEFAULT_PRECISION)))
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("oracle", help="exhaustive census and comparisons")
    common(s, family=False)
    s.add_argument("--N", type=int, default=3)
    s.add_argument("--k", type=int)
    s.add_argument("--d")
    s.add_argument("--compare", action="store_true", help="compare hull censuses with G coefficients")
    s.add_argument("--check-F", action="store_true", help="compare counts by k with F coefficients")
    s.add_argument("--prescription", choices=("origin", "maximal"), default="origin")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("mc", help="Monte Carlo experiment")
    common(s, family=False)
    s.add_argument("--N", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--k-bins")
    s.add_argument("--d")
    s.add_argument("--d-ratio", type=float)
    s.add_argument("--observables")
    s.add_argument("--prescription", choices=("origin", "maximal"))
    s.add_argument("--backend", choices=("numba", "numpy"))
    s.set_defaults(func=cmd_mc)

    s = sub.add_parser("figures", help="plot-ready figure data")
    common(s)
    s.add_argument("--which", default="all", help="figure numbers (comma list) or 'all'")
    s.add_argument("--outdir")
    s.set_defaults(func=cmd_figures)

    s = sub.add_parser("selftest", help="run the acceptance checks")
    s.add_argument("--config", help="file of key = value lines supplying option defaults")
    s.add_argument("--skip-mc", action="store_true", help="skip the Monte Carlo check")
    s.add_argument("--mc-samples", type=int, default=2000)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--only", help="comma list of criterion numbers")
    s.set_defaults(func=cmd_selftest)
    return p


def _apply_config(parser, args, argv):
    """Re-parse with values from ``--config`` as defaults (command-line flags still win)."""
    if args.command == "mc" or not getattr(args, "config", None):
        return args
    kv = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(kv) - known)
    if unknown:
        raise UsageError(f"unknown config keys {unknown}")
    defaults = {}
    for a in sub._actions:
        if a.dest in kv:
            v = kv[a.dest]
            if isinstance(a, argparse._StoreTrueAction):
                v = v.lower() in ("1", "true", "yes", "on")
            elif a.type is not None:
                v = a.type(v)
            defaults[a.dest] = v
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        args = _apply_config(parser, args, argv)
        args._argv = argv
        return args.func(args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"hullstats: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
