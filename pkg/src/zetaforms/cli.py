"""Command-line front end.

Subcommands: ``forms`` (integer linear forms over even indices),
``verify`` (the exact/residual check suites), ``rates`` (empirical
growth table), ``bound`` (dimension bounds), ``integral`` (Monte-Carlo
cross-check).  Every command is deterministic given its flags, including
the seed; big integers serialize as decimal strings.

Exit codes: 0 success, 1 usage/parameter error, 2 mathematical-check
failure, 3 resource/scan cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import bounds, reals
from .errors import (
    InconsistencyError,
    ParameterError,
    PrecisionUnreachableError,
    ScanCapError,
)
from .exact import lcm_upto
from .partfrac import (
    FormParams,
    PartialFractionTable,
    check_symmetry,
    decompose,
    eval_coeff_poly,
    integer_scaled,
    reconstruction_ok,
)

DEFAULT_PRECISION_BITS = 256
PRECISION_ENV_VAR = "ZETAFORMS_PRECISION_BITS"
DEFAULT_SAMPLES = 1_000_000
IDENTITY_SLACK_BITS = 8  # identity residuals compared against 2^-(prec-8)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MATH = 2
EXIT_RESOURCE = 3


@dataclass
class RunConfig:
    """Validated flag set for one command invocation."""

    command: str
    a: int = 3
    r: int | None = None
    n: int = 0
    n_max: int = 0
    z: Fraction = Fraction(1)
    precision_bits: int = DEFAULT_PRECISION_BITS
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    output: str = "json"
    out_path: str | None = None
    grid: list[int] = field(default_factory=list)
    find_dim: float | None = None
    inject_defect: bool = False


def _emit(config: RunConfig, text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")
    if config.out_path:
        with open(config.out_path, "w") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")


def _resolve_r(config: RunConfig) -> int:
    return config.r if config.r is not None else bounds.r_paper(config.a)


def cmd_forms(config: RunConfig) -> int:
    """Integer linear forms for every even n <= n_max (the published
    sequence is indexed by half these, so iterating even n here is the
    reindexing)."""
    if config.a % 2 == 0:
        raise ParameterError("forms at z = 1 need odd a (even zeta weights drop out)")
    r = _resolve_r(config)
    forms = []
    for n in range(0, config.n_max + 1, 2):
        form = reals.build_linear_form(FormParams(config.a, r, n), config.precision_bits)
        forms.append(json.loads(form.to_json()))
    if config.output == "csv":
        lines = ["a,r,n,p0,p,ell,residual,precision_bits"]
        for f in forms:
            lines.append(
                "{a},{r},{n},{p0},{plist},{ell},{residual},{prec}".format(
                    a=f["a"],
                    r=f["r"],
                    n=f["n"],
                    p0=f["p0"],
                    plist=";".join(f["p"]),
                    ell=f["ell"],
                    residual=f["residual"],
                    prec=f["precision_bits"],
                )
            )
        _emit(config, "\n".join(lines))
    else:
        _emit(config, json.dumps({"forms": forms}, indent=2))
    return EXIT_OK


def _mutated(table: PartialFractionTable) -> PartialFractionTable:
    """Test hook: bump one coefficient so the check suite must fail."""
    c = [list(row) for row in table.c]
    c[0][0] += 1
    return PartialFractionTable(table.params, tuple(tuple(row) for row in c))


def cmd_verify(config: RunConfig) -> int:
    """Run the exact identity suites (and, on the odd route, the
    residual certificate) for every n <= n_max."""
    r = _resolve_r(config)
    z = config.z if config.z > 1 else Fraction(2)
    checks = []
    all_ok = True

    def record(n: int, name: str, ok: bool) -> None:
        nonlocal all_ok
        checks.append({"n": n, "check": name, "pass": bool(ok)})
        all_ok = all_ok and ok

    for n in range(0, config.n_max + 1):
        params = FormParams(config.a, r, n)
        table = decompose(params)
        if config.inject_defect and n == 0:
            table = _mutated(table)
        record(n, "reconstruction", reconstruction_ok(table, seed=config.seed))
        record(n, "symmetry", check_symmetry(table))
        record(n, "weight1_vanishes_at_1", eval_coeff_poly(table, 1, 1) == 0)
        if params.odd_route:
            record(
                n,
                "even_weights_vanish_at_1",
                all(
                    eval_coeff_poly(table, i, 1) == 0
                    for i in range(2, params.a + 1, 2)
                ),
            )
        try:
            integer_scaled(table)
            record(n, "integrality", True)
        except InconsistencyError:
            record(n, "integrality", False)
        residual = reals.verify_identity_at_z(params, z, config.precision_bits)
        record(
            n,
            f"identity_at_z={z}",
            residual < mp.mpf(2) ** (-(config.precision_bits - IDENTITY_SLACK_BITS)),
        )
        if params.odd_route:
            try:
                reals.build_linear_form(params, config.precision_bits)
                record(n, "linear_form_residual", True)
            except InconsistencyError:
                record(n, "linear_form_residual", False)

    if config.output == "csv":
        lines = ["n,check,pass"] + [
            f"{c['n']},{c['check']},{int(c['pass'])}" for c in checks
        ]
        _emit(config, "\n".join(lines))
    else:
        _emit(config, json.dumps({"checks": checks, "all_pass": all_ok}, indent=2))
    return EXIT_OK if all_ok else EXIT_MATH


def cmd_rates(config: RunConfig) -> int:
    """Empirical growth table over even n: the series root
    |S_n(1)|^(1/n) and the scaled-coefficient root
    max_i |d^a P_i(1)|^(1/n), with their limiting bounds appended."""
    if config.n_max < 6:
        raise ParameterError("rates need n_max >= 6")
    r = _resolve_r(config)
    a = config.a
    rows = []
    for n in range(2, config.n_max + 1, 2):
        params = FormParams(a, r, n)
        series = reals.eval_series(params, Fraction(1), 96)
        s_root = float(mp.exp(mp.log(abs(series)) / n))
        scaled = integer_scaled(decompose(params))
        d = lcm_upto(n)
        full = [abs(v) * d**i for i, v in enumerate(scaled)]  # d^a P_i(1)
        biggest = max(v for v in full if v)
        p_root = float(mp.exp(mp.log(mp.mpf(biggest)) / n))
        rows.append((n, s_root, p_root))
    s_cap = bounds.s_bound(r, a)
    p_cap = math.exp(a + bounds.p_growth_bound_log(r, a))
    if config.output == "json":
        _emit(
            config,
            json.dumps(
                {
                    "rows": [
                        {"n": n, "series_root": sr, "coeff_root": pr}
                        for n, sr, pr in rows
                    ],
                    "s_bound": s_cap,
                    "ea_p_growth_bound": p_cap,
                },
                indent=2,
            ),
        )
    else:
        lines = ["n,series_root,coeff_root"]
        for n, sr, pr in rows:
            lines.append(f"{n},{sr:.12g},{pr:.12g}")
        lines.append(f"s_bound,{s_cap:.12g},")
        lines.append(f"ea_p_growth_bound,{p_cap:.12g},")
        _emit(config, "\n".join(lines))
    return EXIT_OK


def cmd_bound(config: RunConfig) -> int:
    """Dimension bound reports: one a, a grid of a, or a threshold search."""
    if config.find_dim is not None:
        a_star = bounds.min_a_for_dim(config.find_dim)
        report = bounds.optimize_r(a_star)
        obj = {"target": config.find_dim, "a": a_star, "report": json.loads(report.to_json())}
        _emit(config, json.dumps(obj, indent=2))
        return EXIT_OK
    if config.grid:
        rows = bounds.asymptotic_check(config.grid)
        if config.output == "csv":
            lines = ["a,delta_lb,ratio"]
            for a, ratio in rows:
                delta = bounds.optimize_r(a).delta_lb
                lines.append(f"{a},{delta:.12g},{ratio:.12g}")
            _emit(config, "\n".join(lines))
        else:
            _emit(
                config,
                json.dumps(
                    {"grid": [{"a": a, "ratio": ratio} for a, ratio in rows]},
                    indent=2,
                ),
            )
        return EXIT_OK
    report = bounds.optimize_r(config.a)
    _emit(config, report.to_json())
    return EXIT_OK


def cmd_integral(config: RunConfig) -> int:
    """Monte-Carlo estimate of the integral representation vs the series."""
    r = _resolve_r(config)
    params = FormParams(config.a, r, config.n)
    estimate, stderr = reals.mc_integral(params, config.z, config.samples, config.seed)
    series = float(reals.eval_series(params, config.z, 96))
    z_score = (estimate - series) / stderr if stderr > 0 else math.inf
    obj = {
        "estimate": estimate,
        "stderr": stderr,
        "series": series,
        "z_score": z_score,
        "samples": config.samples,
        "seed": config.seed,
    }
    _emit(config, json.dumps(obj, indent=2))
    return EXIT_OK if abs(z_score) <= 3 else EXIT_MATH


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap to 1."""

    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION_BITS
    try:
        return int(raw)
    except ValueError as exc:
        raise ParameterError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from exc


def _parse_grid(raw: str) -> list[int]:
    """'1e3:1e9' -> decade grid [10^3, ..., 10^9]."""
    try:
        lo_s, hi_s = raw.split(":")
        lo = int(float(lo_s))
        hi = int(float(hi_s))
    except ValueError as exc:
        raise ParameterError(f"bad grid spec {raw!r}; want LO:HI") from exc
    if lo < 10 or hi < lo:
        raise ParameterError(f"bad grid range {raw!r}")
    grid = []
    a = lo
    while a <= hi:
        grid.append(a)
        a *= 10
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetaforms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, with_r=True):
        p.add_argument("--a", type=int, default=3, help="zeta height (default 3)")
        if with_r:
            p.add_argument(
                "--r",
                type=int,
                default=None,
                help="acceleration parameter (default: nearest a/(log a)^2)",
            )
        p.add_argument("--prec", type=int, default=None, help="precision bits")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="also write the report here")

    p = sub.add_parser("forms", help="integer linear forms for even n <= nmax")
    common(p)
    p.add_argument("--nmax", type=int, default=0)

    p = sub.add_parser("verify", help="exact identity and residual suites")
    common(p)
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--z", default="2", help="rational z > 1 for the identity check")
    p.add_argument("--inject-defect", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("rates", help="empirical growth roots vs bounds")
    common(p)
    p.add_argument("--nmax", type=int, default=20)

    p = sub.add_parser("bound", help="dimension lower bounds")
    common(p, with_r=False)
    p.add_argument("--grid", default=None, help="decade grid LO:HI, e.g. 1e3:1e9")
    p.add_argument("--find-dim", type=float, default=None, dest="find_dim")

    p = sub.add_parser("integral", help="Monte-Carlo integral cross-check")
    common(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--z", default="1", help="rational z >= 1, as p/q")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    config.a = args.a
    config.r = getattr(args, "r", None)
    config.n = getattr(args, "n", 0)
    config.n_max = getattr(args, "nmax", 0)
    config.seed = args.seed
    config.output = args.output
    config.out_path = args.out
    config.precision_bits = args.prec if args.prec is not None else _default_precision()
    config.samples = getattr(args, "samples", DEFAULT_SAMPLES)
    config.inject_defect = getattr(args, "inject_defect", False)
    config.find_dim = getattr(args, "find_dim", None)
    if getattr(args, "grid", None):
        config.grid = _parse_grid(args.grid)
    raw_z = getattr(args, "z", None)
    if raw_z is not None:
        try:
            config.z = Fraction(raw_z)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"bad rational {raw_z!r}; want p/q") from exc
    return config


_COMMANDS = {
    "forms": cmd_forms,
    "verify": cmd_verify,
    "rates": cmd_rates,
    "bound": cmd_bound,
    "integral": cmd_integral,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        return _COMMANDS[config.command](config)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except ParameterError as exc:
        print(f"zetaforms: parameter error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"zetaforms: consistency check failed: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (ScanCapError, PrecisionUnreachableError) as exc:
        print(f"zetaforms: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
