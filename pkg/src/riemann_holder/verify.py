"""Desk-scale property suites behind ``riemann-holder verify``.

Every check reports a margin: the worst observed deviation divided by its
threshold, so a check passes iff margin <= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .contfrac import CertifiedReal, cf_expand, tau_estimate, tau_test_number
from .hoelder import witness_check, witness_scales
from .local import (
    asymptotic_terms,
    classify_re_behavior,
    expansion_constants,
    increment_model,
    remainder,
)
from .numtheory import brute_general_table, gauss_sum_closed, gauss_sum_table
from .phi import phi_increment_contour
from .precision import context
from .theta import UpperHalfPoint, field_for, theta_direct, theta_near_rational

SUITES = ("gauss", "theta", "expansion", "table1", "contfrac", "witness")

GOLDEN = CertifiedReal.quadratic([0], [1])
SILVER = CertifiedReal.quadratic([0], [2])
TABLE1_REPRESENTATIVES = ((1, 5), (1, 3), (1, 2), (1, 4), (3, 4))
EXPANSION_POINTS = ((1, 2), (1, 3), (1, 4), (2, 5), (3, 4))


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, worst: float, limit: float, detail: str = "") -> Check:
        margin = worst / limit if limit > 0 else (0.0 if worst == 0 else math.inf)
        c = Check(name, bool(margin <= 1.0), float(margin), detail)
        self.checks.append(c)
        return c


# ---------------------------------------------------------------- gauss


def _coprime(q: int):
    return [p for p in range(1, q + 1) if math.gcd(p, q) == 1]


def suite_gauss(q_max: int = 500, q_max_general: int = 200) -> SuiteReport:
    rep = SuiteReport("gauss")
    worst = 0.0
    worst_case = ""
    for q in range(1, q_max + 1):
        j2 = (np.arange(1, q + 1, dtype=np.int64) ** 2) % q
        roots = np.exp(2j * np.pi * np.arange(q) / q)
        for p in _coprime(q):
            brute = complex(roots[(p * j2) % q].sum())
            d = abs(gauss_sum_closed(q, p).to_complex() - brute)
            if d > worst:
                worst, worst_case = d, f"q={q} p={p}"
    rep.add(f"closed form vs brute force, q <= {q_max}", worst, 1e-9, worst_case)

    worst, worst_case = 0.0, ""
    for q in range(1, q_max_general + 1):
        ps = _coprime(q)
        brute = brute_general_table(q, ps)
        for i, p in enumerate(ps):
            d = float(np.abs(gauss_sum_table(q, p) - brute[i]).max())
            if d > worst:
                worst, worst_case = d, f"q={q} p={p}"
    rep.add(f"generalized sums vs brute force, q <= {q_max_general}, all m", worst, 1e-9, worst_case)

    exact_bad = 0
    for q in range(1, q_max + 1):
        for p in _coprime(q)[:8]:
            v = gauss_sum_closed(q, p).abs_squared()
            want = {1: q, 3: q, 2: 0, 0: 2 * q}[q % 4]
            exact_bad += v != want
    rep.add("|S(q,p)|^2 in {0, q, 2q} by branch (exact)", float(exact_bad), 0.5)
    return rep


# ---------------------------------------------------------------- theta


def suite_theta(tol: float = 1e-9, seed: int = 7) -> SuiteReport:
    rep = SuiteReport("theta")
    worst, case = 0.0, ""
    for q in (1, 2, 3, 4, 5, 7, 8, 12, 13, 21, 34, 50):
        for p in sorted({1, q // 2 + 1, q - 1} & set(_coprime(q))):
            for mag in (1e-6, 1e-4, 1e-2, 1e-1):
                for ratio in (1.0, 0.5, 0.1):
                    y = mag * ratio
                    x = math.sqrt(max(0.0, mag * mag - y * y))
                    zeta = complex(x, y)
                    near = theta_near_rational(p, q, zeta, tol, max_terms=10**6)
                    direct = theta_direct(UpperHalfPoint(Fraction(p, q) + Fraction(x), y), tol)
                    d = abs(complex(near.value) - complex(direct.value))
                    m = d / (near.est_error + direct.est_error)
                    if m > worst:
                        worst, case = m, f"p/q={p}/{q} |zeta|={mag} y/|zeta|={ratio}"
    rep.add("dual representation agreement (ratio to combined est_error)", worst, 1.0, case)

    rng = np.random.default_rng(seed)
    worst, case = 0.0, ""
    for _ in range(40):
        x = float(rng.random())
        y = float(10 ** rng.uniform(-4, 0))
        r = theta_direct(UpperHalfPoint(x, y), 1e-9)
        bound = 1 + 2 * math.exp(-2 * math.pi * y) + (2 * y) ** -0.5
        m = (abs(complex(r.value)) - r.est_error) / bound
        if m > worst:
            worst, case = m, f"x={x:.6f} y={y:.3g}"
    rep.add("elementary bound |theta| <= 1 + 2e^{-2 pi y} + (2y)^{-1/2}", worst, 1.0, case)

    worst = 0.0
    for x, y in ((0.1, 0.3), (0.37, 0.01), (0.9, 1e-3)):
        a = theta_direct(UpperHalfPoint(Fraction(x), y), 1e-10)
        b = theta_direct(UpperHalfPoint(Fraction(x) + 1, y), 1e-10)
        worst = max(worst, abs(complex(a.value) - complex(b.value)) / (a.est_error + b.est_error))
    rep.add("periodicity theta(z+1) = theta(z)", worst, 1.0)

    worst, case = 0.0, ""
    tau, eps = 2.0, 0.05
    rho = GOLDEN.midpoint(200)
    fld = field_for(rho, context(15))
    for mag in np.geomspace(1e-8, 1e-3, 16):
        for y in (mag, mag / 10):
            for sgn in (1, -1):
                u = sgn * math.sqrt(max(0.0, mag * mag - y * y))
                bound = mag ** (1 / (2 * tau) - eps - 0.5) + y**-0.5 * mag ** (1 / (2 * tau) - eps)
                r = fld.evaluate(u, y, 1e-6 * bound)
                m = (abs(complex(r.value)) + r.est_error) / bound
                if m > worst:
                    worst, case = m, f"|z|={mag:.3g} y={y:.3g}"
    rep.add("sampled theta bound near the golden ratio (ratio <= 10)", worst, 10.0, case)
    return rep


# ---------------------------------------------------------------- expansion


def suite_expansion() -> SuiteReport:
    rep = SuiteReport("expansion")
    worst, case = 0.0, ""
    for p, q in EXPANSION_POINTS:
        for k in range(8, 21):
            for s in (1, -1):
                h = Fraction(s, 2**k)
                model = increment_model(p, q, h, 1e-10)
                inc = phi_increment_contour(Fraction(p, q), h, 1e-11)
                d = abs(complex(model.value) - complex(inc.value.value))
                if d > worst:
                    worst, case = d, f"p/q={p}/{q} h={'-' if s < 0 else ''}2^-{k}"
    rep.add("increment = C-part - h/2 + R (abs, <= 1e-8)", worst, 1e-8, case)

    for p, q in ((1, 3), (1, 2)):
        for s in (1, -1):
            lx, ly = [], []
            for k in range(8, 25):
                h = Fraction(s, 2**k)
                r = remainder(p, q, h, 1e-4 * q**1.5 * float(abs(h)) ** 1.5)
                lx.append(math.log(float(abs(h))))
                ly.append(math.log(abs(complex(r.value))))
            slope = float(np.polyfit(lx, ly, 1)[0])
            rep.add(f"remainder slope at {p}/{q}, sign {s:+d}", abs(slope - 1.5), 0.05, f"slope={slope:.4f}")

    worst = 0.0
    for s in (1, -1):
        h = Fraction(s, 2**12)
        r = remainder(1, 3, h, 1e-11)
        a = asymptotic_terms(1, 3, h, 2, 1e-11)
        tot = a.total
        worst = max(worst, abs(complex(r.value) - complex(tot.value)) / (r.err + tot.err))
    rep.add("asymptotic series telescoping at K = 2 (ratio to errors)", worst, 1.0)

    worst = 0.0
    for q in range(1, 60):
        for p in _coprime(q):
            e = expansion_constants(p, q)
            worst = max(worst, abs(complex(e.c_plus.value) * 1j - complex(e.c_minus.value)))
    rep.add("C- = i C+", worst, 1e-14)
    return rep


# ---------------------------------------------------------------- one-sided Re behaviour


def table1_rows(h_mag: float = 1e-6):
    """(p, q, side, kind, measured, predicted, deviation, limit) for each representative."""
    rows = []
    for p, q in TABLE1_REPRESENTATIVES:
        beh = classify_re_behavior(p, q)
        for side, coeff, kind in (("left", beh.left, beh.left_kind), ("right", beh.right, beh.right_kind)):
            h = Fraction(-h_mag if side == "left" else h_mag)
            inc = phi_increment_contour(Fraction(p, q), h, 1e-6 * h_mag**1.5)
            re = float(inc.value.value.real)
            if kind == "sqrt":
                pred = coeff * math.sqrt(h_mag)
                dev = abs(re / pred - 1)
                rows.append((p, q, side, kind, re, pred, dev, 0.02, re * pred > 0))
            else:
                dev = abs(re + float(h) / 2)
                rows.append((p, q, side, kind, re, -float(h) / 2, dev, 10 * q**1.5 * h_mag**1.5, True))
    return rows


def suite_table1() -> SuiteReport:
    rep = SuiteReport("table1")
    for p, q in TABLE1_REPRESENTATIVES:
        e = expansion_constants(p, q)
        b = classify_re_behavior(p, q)
        d = max(abs(e.re_coeff_left - b.left), abs(e.re_coeff_right - b.right))
        rep.add(f"Re C-/C+ match the table at {p}/{q} ({b.row.value})", d, 1e-14)
    for p, q, side, kind, re, pred, dev, limit, sign_ok in table1_rows():
        label = f"{p}/{q} {side} ({kind})"
        if not sign_ok:
            rep.checks.append(Check(label + " sign", False, math.inf, f"re={re:.6g} predicted={pred:.6g}"))
        rep.add(label, dev, limit, f"re={re:.6g} predicted={pred:.6g}")
    return rep


# ---------------------------------------------------------------- contfrac


def suite_contfrac() -> SuiteReport:
    rep = SuiteReport("contfrac")
    inputs = [
        GOLDEN,
        SILVER,
        CertifiedReal.quadratic([1], [1, 2]),
        CertifiedReal.decimal("0.618033988749894848"),
        CertifiedReal.decimal("3.14159265358979323846264338327950288"),
        CertifiedReal.rational(355, 113),
        tau_test_number(),
    ]
    det_bad = consec_bad = side_bad = dist_bad = bound_bad = 0
    for x in inputs:
        exp = cf_expand(x, 30)
        pairs = exp.all_pairs
        for n in range(len(pairs) - 1):
            (p0, q0), (p1, q1) = pairs[n], pairs[n + 1]
            det_bad += p1 * q0 - p0 * q1 != (-1) ** n
            consec_bad += q0 % 4 == 2 and q1 % 4 == 2
        cs = exp.convergents
        lo, hi = x.enclosure(512)
        for a, b in zip(cs, cs[1:]):
            if a.side and b.side:
                side_bad += a.side == b.side
            da = max(abs(lo - a.value), abs(hi - a.value))
            db = min(abs(lo - b.value), abs(hi - b.value))
            if a.tau is not None and b.tau is not None and not x.is_rational:
                dist_bad += not db < da
            if a.tau is not None:
                # (1/q_n)^{tau_n - 1} <= 1/q_{n+1} <= 2 (1/q_n)^{tau_n - 1}, with the tau error bar
                lq = math.log(a.q)
                lo_t, hi_t = a.tau - a.tau_err, a.tau + a.tau_err
                left = -(hi_t - 1) * lq
                right = math.log(2) - (lo_t - 1) * lq
                v = -math.log(b.q)
                bound_bad += not (left - 1e-12 <= v <= right + 1e-12)
    rep.add("determinant identity p_{n+1} q_n - p_n q_{n+1} = (-1)^n (exact)", float(det_bad), 0.5)
    rep.add("no two consecutive q_n = 2 mod 4", float(consec_bad), 0.5)
    rep.add("sides alternate", float(side_bad), 0.5)
    rep.add("|x - r_n| strictly decreasing", float(dist_bad), 0.5)
    rep.add("two-sided bound on 1/q_{n+1} from tau_n", float(bound_bad), 0.5)
    est = tau_estimate(GOLDEN, 25)
    rep.add("golden ratio tau window at N = 25 within [2.0, 2.1]",
            max(0.0, est.tau_hat - 2.1, 2.0 - est.tau_hat), 1e-12, f"tau_hat={est.tau_hat:.6f}")
    return rep


# ---------------------------------------------------------------- witness


GOLDEN_WITNESS_Q = (5, 13, 89, 233)


def golden_witness_indices():
    return [c.n for c in cf_expand(GOLDEN, 20) if c.q in GOLDEN_WITNESS_Q]


def suite_witness(digits: int = 100) -> SuiteReport:
    rep = SuiteReport("witness")
    r = witness_check(GOLDEN, golden_witness_indices(), 0.1)
    rep.add("golden ratio ratios >= 0.05", 0.05 / r.min_ratio, 1.0, f"min={r.min_ratio:.4f}")
    rep.add("golden ratio max/min ratio <= 100", r.max_ratio / r.min_ratio, 100.0)
    rho = tau_test_number()
    idx = witness_scales(rho, 2, min_tau=3.0)
    r4 = witness_check(rho, idx, 0.1, digits=digits)
    rep.add("tau-4 number: positive floors", 0.0 if r4.min_ratio > 0 else math.inf, 1.0,
            f"ratios={[round(e.ratio, 6) for e in r4.entries]}")
    rep.add("tau-4 number: ratios within a factor 10", r4.max_ratio / r4.min_ratio, 10.0)
    return rep


RUNNERS = {
    "gauss": suite_gauss,
    "theta": suite_theta,
    "expansion": suite_expansion,
    "table1": suite_table1,
    "contfrac": suite_contfrac,
    "witness": suite_witness,
}


def run_suite(name: str, seed: int | None = None) -> SuiteReport:
    """Run one suite; ``seed`` drives the randomized grids (theta only)."""
    if name == "theta" and seed is not None:
        return suite_theta(seed=seed)
    return RUNNERS[name]()
