"""riemann-holder: command-line front end.

Output is deterministic: JSON keys are emitted in a fixed order, floats use
repr, and every numeric field sits next to an ``est_error``.
Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 cross-check
failure, 4 precision shortfall.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .contfrac import CertifiedReal, InsufficientPrecision, cf_expand, tau_estimate
from .hoelder import DegenerateFit, estimate_alpha, predicted_alpha
from .local import asymptotic_terms, classify_re_behavior, expansion_constants, remainder
from .numtheory import (
    Rational,
    gauss_sum_brute,
    gauss_sum_closed,
    gauss_sum_general,
    gauss_sum_general_brute,
)
from .phi import phi_increment_contour, phi_increment_series, phi_series
from .precision import DEFAULT_DIGITS, PrecisionError, default_digits
from .theta import UpperHalfPoint, theta_auto, theta_direct, theta_near_rational
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_CROSS, EXIT_PRECISION = 0, 1, 2, 3, 4
CSV_HEADER = ("h", "abs_increment", "re", "im", "est_error")


class UsageError(ValueError):
    pass


class CrossCheckFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = DEFAULT_DIGITS
    tol: float = 1e-10
    output: str = "json"
    seed: int = 7

    def __post_init__(self):
        if self.precision_digits < 17:
            raise UsageError("precision must be at least 17 digits")
        if not self.tol >= 10.0 ** (-self.precision_digits + 5):
            raise UsageError(f"tol below 10^-(precision-5) = 1e-{self.precision_digits - 5}")


# ---------------------------------------------------------------- emission


def _f(v) -> float:
    return float(v)


def num(value, err=0.0) -> dict:
    return {"value": _f(value), "est_error": _f(err)}


def cnum(value, err=0.0) -> dict:
    z = complex(value)
    return {"re": z.real, "im": z.imag, "est_error": _f(err)}


def exact_int(v: int) -> dict:
    return {"value": int(v), "est_error": 0.0}


def emit_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, allow_nan=True) + "\n"


def emit_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(emit_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(emit_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def emit_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: (-abs(r[0]), -r[0])):
        w.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


def render(obj, cfg: RunConfig, rows=None) -> str:
    if cfg.output == "csv":
        if rows is None:
            raise UsageError("this command has no CSV grid; use --output json or text")
        return emit_csv(rows)
    if cfg.output == "text":
        return emit_text(obj) + "\n"
    return emit_json(obj)


# ---------------------------------------------------------------- parsing helpers


def parse_rational(text: str) -> Rational:
    try:
        return Rational.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}") from exc


def parse_real(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad real {text!r}") from exc


def parse_x(text: str) -> CertifiedReal:
    try:
        return CertifiedReal.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------- commands


def cmd_gauss_sum(args, cfg: RunConfig):
    q, p = args.q, args.p
    if q < 1 or math.gcd(p, q) != 1:
        raise UsageError(f"need q >= 1 and gcd(p, q) = 1, got q={q} p={p}")
    out = {"command": "gauss-sum", "q": exact_int(q), "p": exact_int(p)}
    if args.m is None:
        s = gauss_sum_closed(q, p)
        val = s.to_complex()
        out["branch"] = s.branch.value
        out["exact"] = str(s)
        out["value"] = cnum(val, 4 * q * 2.0**-52)
        if args.brute:
            hp = gauss_sum_brute(q, p)
            b, err = complex(hp.value), hp.err
            out["brute"] = cnum(b, err)
            if abs(b - val) > 1e-9:
                raise CrossCheckFailure(json.dumps(out))
    else:
        g = gauss_sum_general(q, p, args.m)
        val = g.to_complex()
        out["m"] = exact_int(args.m)
        out["branch"] = g.base.branch.value
        if g.is_zero:
            out["exact"] = "0"
        else:
            out["exact"] = f"{g.scale}*e({g.phase})*S({g.base.q},{g.p})" + f" with S = {g.base}"
        out["value"] = cnum(val, 8 * q * 2.0**-52)
        if args.brute:
            hp = gauss_sum_general_brute(q, p, args.m)
            b, err = complex(hp.value), hp.err
            out["brute"] = cnum(b, err)
            if abs(b - val) > 1e-9:
                raise CrossCheckFailure(json.dumps(out))
    return out, None


def cmd_alpha(args, cfg: RunConfig):
    x = parse_x(args.x)
    pred = predicted_alpha(x, args.depth)
    out = {"command": "alpha", "x": str(x)}
    out["predicted"] = {"value": pred.alpha, "est_error": 0.0, "source": pred.source}
    if pred.alpha_detrended is not None:
        out["predicted_detrended"] = num(pred.alpha_detrended)
    if pred.tau is not None:
        out["tau"] = num(pred.tau)
    if args.predict_only:
        return out, None
    fit = estimate_alpha(
        x,
        h_min=args.h_min,
        h_max=args.h_max,
        samples_per_decade=args.per_decade,
        detrend=args.detrend,
        envelope=args.envelope,
        component=args.component,
        digits=cfg.precision_digits,
    )
    out["component"] = fit.component
    out["envelope"] = fit.envelope
    out["fitted_raw"] = num(fit.exponent_raw, fit.fit_residual)
    out["fitted_detrended"] = num(fit.exponent_detrended, fit.fit_residual_detrended)
    out["residual"] = num(fit.fit_residual if not args.detrend else fit.fit_residual_detrended)
    out["flagged"] = fit.flagged
    out["samples"] = [
        {"h": s.h, "abs_increment": s.abs_increment, "re": s.re, "im": s.im, "est_error": s.est_error}
        for s in fit.samples
    ]
    rows = [(s.h, s.abs_increment, s.re, s.im, s.est_error) for s in fit.samples]
    return out, rows


def cmd_verify(args, cfg: RunConfig):
    names = SUITES if args.suite == "all" else (args.suite,)
    suites = []
    for name in names:
        rep = run_suite(name, cfg.seed)
        suites.append(
            {
                "suite": name,
                "passed": rep.passed,
                "checks": [
                    {"name": c.name, "passed": c.passed, "margin": c.margin, "est_error": 0.0, "detail": c.detail}
                    for c in rep.checks
                ],
            }
        )
    return {"command": "verify", "suites": suites}, None


def _verify_text(obj) -> str:
    lines = []
    for s in obj["suites"]:
        for c in s["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            extra = f"  [{c['detail']}]" if c["detail"] else ""
            lines.append(f"{status} {s['suite']}: {c['name']} (margin {c['margin']:.3g}){extra}")
    return "\n".join(lines) + "\n"


def cmd_theta(args, cfg: RunConfig):
    x, y = parse_real(args.x), parse_real(args.y)
    if y <= 0:
        raise UsageError("y must be positive")
    z = UpperHalfPoint(x, y)
    tol = cfg.tol
    if args.method == "direct":
        r = theta_direct(z, tol, cfg.precision_digits)
    elif args.method == "near":
        if args.anchor is None:
            raise UsageError("--method near needs --anchor p/q")
        a = parse_rational(args.anchor)
        zeta = x - a.as_fraction()
        r = theta_near_rational(a.p, a.q, complex(float(zeta), float(y)), tol, digits=cfg.precision_digits)
    else:
        r = theta_auto(z, tol, cfg.precision_digits)
    out = {"command": "theta", "x": str(x), "y": str(y), "method": r.method}
    if r.anchor is not None:
        out["anchor"] = str(r.anchor)
    out["value"] = cnum(r.value, r.est_error)
    out["terms_used"] = exact_int(r.terms_used)
    return out, None


def cmd_phi(args, cfg: RunConfig):
    x = parse_real(args.x)
    out = {"command": "phi", "x": str(x)}
    if args.h is None:
        y = parse_real(args.y) if args.y else Fraction(0)
        v = phi_series(x, float(y), max(cfg.tol, 1e-8))
        out["y"] = str(y)
        out["method"] = "series"
        out["value"] = cnum(v.value, v.err)
        return out, None
    h = parse_real(args.h)
    if args.method == "series":
        inc = phi_increment_series(x, h, max(cfg.tol, 1e-8))
    else:
        inc = phi_increment_contour(x, h, cfg.tol, cfg.precision_digits)
    out["h"] = str(h)
    out["method"] = inc.method
    out["increment"] = cnum(inc.value.value, inc.est_error)
    rows = [(float(h), abs(complex(inc.value.value)), complex(inc.value.value).real,
             complex(inc.value.value).imag, inc.est_error)]
    return out, rows


def cmd_expand(args, cfg: RunConfig):
    r = parse_rational(args.pq)
    if r.q < 1:
        raise UsageError("bad rational")
    e = expansion_constants(r.p, r.q)
    b = classify_re_behavior(r.p, r.q)
    out = {"command": "expand", "at": str(r)}
    out["c_minus"] = cnum(e.c_minus.value, e.c_minus.err)
    out["c_plus"] = cnum(e.c_plus.value, e.c_plus.err)
    out["exact"] = e.c_exact
    out["differentiable_phi"] = e.differentiable_phi
    out["table_row"] = e.table_row.value
    out["re_leading"] = {
        "left": {"kind": b.left_kind, "value": b.left, "est_error": 0.0},
        "right": {"kind": b.right_kind, "value": b.right, "est_error": 0.0},
    }
    if args.h is not None:
        h = parse_real(args.h)
        tol = max(cfg.tol, 1e-12)
        rem = remainder(r.p, r.q, h, tol)
        out["h"] = str(h)
        out["remainder"] = cnum(rem.value, rem.err)
        if args.K is not None:
            a = asymptotic_terms(r.p, r.q, h, args.K, tol)
            out["asymptotic_terms"] = [
                {"k": k, "a_k": a.coefficients[k], "re": complex(t.value).real,
                 "im": complex(t.value).imag, "est_error": t.err}
                for k, t in enumerate(a.terms)
            ]
            out["integral_remainder"] = cnum(a.integral.value, a.integral.err)
    return out, None


def cmd_cf(args, cfg: RunConfig):
    x = parse_x(args.x)
    try:
        exp = cf_expand(x, args.terms, strict=args.strict)
    except InsufficientPrecision as exc:
        raise PrecisionError(str(exc), cfg.precision_digits + 1) from exc
    out = {"command": "cf", "x": str(x), "truncated": exp.truncated, "terminated": exp.terminated}
    out["terms"] = [exact_int(a) for a in exp.terms]
    out["convergents"] = [
        {
            "n": c.n,
            "p": str(c.p),
            "q": str(c.q),
            "q_mod_4": c.q_class,
            "side": c.side,
            "tau": c.tau,
            "est_error": c.tau_err if c.tau_err is not None else 0.0,
        }
        for c in exp.convergents
    ]
    if not x.is_rational:
        try:
            est = tau_estimate(x, min(args.terms, len(exp.convergents)))
            out["tau_hat"] = num(est.tau_hat)
            if est.exact_tau is not None:
                out["tau_exact"] = num(est.exact_tau)
        except ValueError:
            pass
    return out, None


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS,
                        help="working digits (default 40 or $RIEMANN_PRECISION)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="absolute tolerance (default 1e-10)")
    common.add_argument("--output", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized verify grids (default 7)")
    ap = argparse.ArgumentParser(prog="riemann-holder", description=__doc__.splitlines()[0], parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    g = sub.add_parser("gauss-sum", help="S(q,p) or S(q,p,m)")
    g.add_argument("q", type=int)
    g.add_argument("p", type=int)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--brute", action="store_true", help="cross-check against direct summation")
    g.set_defaults(func=cmd_gauss_sum)

    a = sub.add_parser("alpha", help="fitted and predicted Hoelder exponent")
    a.add_argument("x", help="rat:p/q | dec:<digits> | quad:a0,a1,(period)")
    a.add_argument("--h-min", type=float, default=1e-7)
    a.add_argument("--h-max", type=float, default=1e-2)
    a.add_argument("--per-decade", type=int, default=6)
    a.add_argument("--detrend", action="store_true")
    a.add_argument("--envelope", action=argparse.BooleanOptionalAction, default=None)
    a.add_argument("--component", choices=("phi", "re", "im", "f"), default="phi")
    a.add_argument("--predict-only", action="store_true")
    a.add_argument("--depth", type=int, default=25, help="convergents used for tau")
    a.add_argument("--csv", action="store_true", help="emit the sample grid as CSV")
    a.set_defaults(func=cmd_alpha)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("theta", help="theta(x + iy)")
    t.add_argument("x")
    t.add_argument("y")
    t.add_argument("--method", choices=("auto", "direct", "near"), default="auto")
    t.add_argument("--anchor", default=None, help="p/q for --method near")
    t.set_defaults(func=cmd_theta)

    p = sub.add_parser("phi", help="phi(x + iy) or the increment phi(x+h) - phi(x)")
    p.add_argument("x")
    p.add_argument("--y", default=None)
    p.add_argument("--h", default=None)
    p.add_argument("--method", choices=("contour", "series"), default="contour")
    p.set_defaults(func=cmd_phi)

    e = sub.add_parser("expand", help="local expansion constants at p/q")
    e.add_argument("pq")
    e.add_argument("--h", default=None, help="evaluate the remainder at this h")
    e.add_argument("--K", type=int, default=None, help="asymptotic terms up to K")
    e.set_defaults(func=cmd_expand)

    c = sub.add_parser("cf", help="certified continued fraction")
    c.add_argument("x")
    c.add_argument("--terms", type=int, default=20)
    c.add_argument("--strict", action="store_true")
    c.set_defaults(func=cmd_cf)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out_stream = sys.stdout
    try:
        digits = getattr(args, "precision", None) or default_digits()
        output = "csv" if getattr(args, "csv", False) else getattr(args, "output", "json")
        cfg = RunConfig(precision_digits=digits, tol=getattr(args, "tol", 1e-10), output=output,
                        seed=getattr(args, "seed", 7))
        obj, rows = args.func(args, cfg)
        if args.command == "verify" and cfg.output == "text":
            text = _verify_text(obj)
        else:
            text = render(obj, cfg, rows)
        out_stream.write(text)
        if args.command == "verify" and not all(s["passed"] for s in obj["suites"]):
            failing = [
                {"suite": s["suite"], "check": c["name"], "margin": c["margin"], "detail": c["detail"]}
                for s in obj["suites"]
                for c in s["checks"]
                if not c["passed"]
            ]
            sys.stderr.write("verification failed: " + json.dumps(failing) + "\n")
            return EXIT_VERIFY
        return EXIT_OK
    except PrecisionError as exc:
        sys.stderr.write(f"precision shortfall: {exc} (required digits: {exc.needed_digits})\n")
        return EXIT_PRECISION
    except CrossCheckFailure as exc:
        sys.stderr.write(f"cross-check failed: {exc}\n")
        return EXIT_CROSS
    except (UsageError, DegenerateFit, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
