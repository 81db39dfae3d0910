"""Pointwise Hoelder exponents of phi: log-log fits and witness sequences.

The fitted quantity is the slope of log|increment| against log|h| over a
two-sided log grid. With the envelope option each |h| carries the running
maximum over all smaller |h|, which tracks the sup in the definition of the
exponent instead of the chirp-induced dips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .contfrac import CertifiedReal, Tag, alpha_from_tau, cf_expand, tau_estimate
from .precision import PrecisionError, cancellation_digits, default_digits
from .phi import phi_increment_contour

COMPONENTS = ("phi", "re", "im", "f")
SANITY_WINDOW = (0.3, 2.0)
MIN_SAMPLES = 6


class DegenerateFit(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    h: float
    abs_increment: float
    re: float
    im: float
    est_error: float


@dataclass
class HoelderFit:
    x: CertifiedReal
    component: str
    exponent_raw: float
    exponent_detrended: float
    fit_residual: float
    fit_residual_detrended: float
    envelope: bool
    detrend: bool
    samples: list[Sample]
    h_range: tuple[float, float]
    flagged: bool = False

    @property
    def exponent(self) -> float:
        return self.exponent_detrended if self.detrend else self.exponent_raw


def _base_point(x: CertifiedReal, h_min: float) -> Fraction:
    if x.tag is Tag.QUADRATIC:
        bits = int(4 * math.log2(1 / h_min)) + 96
        return x.midpoint(bits)
    return x.midpoint()


def _increment(base: Fraction, h: Fraction, component: str, tol: float, digits):
    """(raw complex, detrended complex, error) for one signed step."""
    if component == "f":
        inc = phi_increment_contour(base / 2, h / 2, tol / (2 * math.pi), digits)
        d = complex(inc.value.value)
        raw = 2 * math.pi * d.real
        return complex(raw), complex(raw + math.pi * float(h) / 2), 2 * math.pi * inc.est_error
    inc = phi_increment_contour(base, h, tol, digits)
    d = complex(inc.value.value)
    return d, d + float(h) / 2, inc.est_error


def _magnitude(v: complex, component: str) -> float:
    if component == "re" or component == "f":
        return abs(v.real)
    if component == "im":
        return abs(v.imag)
    return abs(v)


def log_grid(h_min: float, h_max: float, per_decade: int) -> list[float]:
    """Log-spaced |h| values, descending, exact in binary."""
    decades = math.log10(h_max / h_min)
    n = max(2, math.ceil(decades * per_decade) + 1)
    return [float(v) for v in np.geomspace(h_max, h_min, n)]


def _fit(hs: np.ndarray, vals: np.ndarray, errs: np.ndarray, envelope: bool):
    order = np.argsort(hs)
    hs, vals, errs = hs[order], vals[order], errs[order]
    if envelope:
        vals = np.maximum.accumulate(vals)
    usable = (vals > 0) & (vals > 4 * errs)
    if usable.sum() < MIN_SAMPLES:
        raise DegenerateFit(f"degenerate fit: {int(usable.sum())} usable samples (need {MIN_SAMPLES})")
    lx, ly = np.log(hs[usable]), np.log(vals[usable])
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    return float(slope), resid


def estimate_alpha(
    x: CertifiedReal,
    h_min: float = 1e-7,
    h_max: float = 1e-2,
    samples_per_decade: int = 6,
    detrend: bool = False,
    envelope: bool | None = None,
    component: str = "phi",
    rel_tol: float = 1e-6,
    digits: int | None = None,
) -> HoelderFit:
    """Fit the local exponent of ``component`` at x from increments on a log grid.

    Both signs of h are sampled and the larger magnitude is kept per |h|.
    Raw and detrended (increment + h/2) exponents are both fitted; ``detrend``
    picks which one the samples and ``exponent`` report.
    """
    if component not in COMPONENTS:
        raise ValueError(f"component must be one of {COMPONENTS}")
    if not 0 < h_min < h_max <= 0.1:
        raise ValueError("need 0 < h_min < h_max <= 0.1")
    digits = default_digits() if digits is None else digits
    needed = math.ceil(cancellation_digits(Fraction(h_min)))
    if needed > digits:
        raise PrecisionError("precision insufficient at h_min", needed)
    if envelope is None:
        envelope = not x.is_rational
    base = _base_point(x, h_min)
    grid = log_grid(h_min, h_max, samples_per_decade)
    samples: list[Sample] = []
    raw_vals, det_vals, errs = [], [], []
    for a in grid:
        # tolerance relative to the smallest expected size, |h|^{3/2}
        tol = rel_tol * a**1.5
        best_raw = best_det = 0.0
        worst_err = 0.0
        for sign in (1, -1):
            h = Fraction(sign * a)
            raw, det, err = _increment(base, h, component, tol, digits)
            use = det if detrend else raw
            samples.append(Sample(float(h), _magnitude(use, component), use.real, use.imag, err))
            best_raw = max(best_raw, _magnitude(raw, component))
            best_det = max(best_det, _magnitude(det, component))
            worst_err = max(worst_err, err)
        raw_vals.append(best_raw)
        det_vals.append(best_det)
        errs.append(worst_err)
    hs, e = np.array(grid), np.array(errs)
    slope_raw, res_raw = _fit(hs, np.array(raw_vals), e, envelope)
    slope_det, res_det = _fit(hs, np.array(det_vals), e, envelope)
    samples.sort(key=lambda s: (-abs(s.h), -s.h))
    flagged = not SANITY_WINDOW[0] <= slope_raw <= SANITY_WINDOW[1]
    return HoelderFit(
        x=x,
        component=component,
        exponent_raw=slope_raw,
        exponent_detrended=slope_det,
        fit_residual=res_raw,
        fit_residual_detrended=res_det,
        envelope=envelope,
        detrend=detrend,
        samples=samples,
        h_range=(h_min, h_max),
        flagged=flagged,
    )


@dataclass(frozen=True)
class PredictedAlpha:
    alpha: float
    source: str
    alpha_detrended: float | None = None
    tau: float | None = None
    tau_numeric: float | None = None


def predicted_alpha(x: CertifiedReal, N: int = 25) -> PredictedAlpha:
    """Exponent predicted from the arithmetic of x."""
    if x.is_rational:
        v = x.lo
        if v.denominator % 4 == 2:
            return PredictedAlpha(1.0, "rational q=2 mod 4: differentiable (raw 1, detrended 3/2)", 1.5)
        return PredictedAlpha(0.5, "rational: square-root term present")
    est = tau_estimate(x, N)
    if est.exact_tau is not None:
        return PredictedAlpha(alpha_from_tau(est.exact_tau), "quadratic irrational: tau = 2",
                              tau=est.exact_tau, tau_numeric=est.tau_hat)
    return PredictedAlpha(alpha_from_tau(max(2.0, est.tau_hat)), f"tau estimate over {N} convergents",
                          tau=est.tau_hat, tau_numeric=est.tau_hat)


@dataclass(frozen=True)
class WitnessEntry:
    l: int
    r_l: Fraction
    tau_l: float
    x_l: float
    h_l: float
    measured_increment: float
    est_error: float
    ratio: float
    predicted_floor: float


@dataclass
class WitnessReport:
    rho: CertifiedReal
    lam: float
    entries: list[WitnessEntry] = field(default_factory=list)

    @property
    def min_ratio(self) -> float:
        return min(e.ratio for e in self.entries)

    @property
    def max_ratio(self) -> float:
        return max(e.ratio for e in self.entries)

    @property
    def ok(self) -> bool:
        return self.min_ratio > 0 and self.max_ratio / self.min_ratio <= 100


def witness_scales(rho: CertifiedReal, count: int, min_tau: float = 2.0, max_terms: int = 60) -> list[int]:
    """Indices of the first ``count`` certified convergents with q != 2 (mod 4) and tau_l >= min_tau."""
    out = []
    for c in cf_expand(rho, max_terms):
        if c.q_class != 2 and c.tau is not None and c.q > 1 and c.tau >= min_tau:
            out.append(c.n)
            if len(out) == count:
                break
    return out


def witness_check(rho: CertifiedReal, l_indices: Sequence[int], lam: float = 0.1,
                  rel_tol: float = 1e-6, digits: int | None = None) -> WitnessReport:
    """Increments along the witness steps h_l in {r_l - rho, r_l + x_l - rho}, x_l = lam |rho - r_l|.

    For each l the larger of the two increments is compared with
    |h_l|^{1/2 + 1/(2 tau_l)}; the floor is the running minimum of that ratio.
    """
    if rho.is_rational:
        raise ValueError("witness sequences need an irrational rho")
    if not 0 < lam <= 0.25:
        raise ValueError("lambda must lie in (0, 0.25]")
    if not l_indices:
        raise ValueError("no indices")
    exp = cf_expand(rho, max(l_indices) + 1)
    by_n = {c.n: c for c in exp.convergents}
    digits = default_digits() if digits is None else digits
    report = WitnessReport(rho, lam)
    floor = math.inf
    for l in l_indices:
        c = by_n.get(l)
        if c is None:
            raise ValueError(f"convergent {l} not certified")
        if c.q_class == 2:
            raise ValueError(f"q_{l} = {c.q} is 2 mod 4")
        if c.tau is None:
            raise ValueError(f"tau_{l} not certified")
        dist_bits = int(4 * math.log2(c.q)) + 8
        base = rho.midpoint(2 * dist_bits + 128) if rho.tag is Tag.QUADRATIC else rho.midpoint()
        r = c.value
        d = r - base
        needed = math.ceil(cancellation_digits(d))
        if needed > digits:
            raise PrecisionError(f"precision insufficient at |rho - r_{l}|", needed)
        x_l = Fraction(lam) * abs(d)
        best = None
        for h in (d, d + x_l):
            tol = rel_tol * float(abs(h)) ** 1.5
            inc = phi_increment_contour(base, h, tol, digits)
            mag = float(abs(inc.value.value))
            if best is None or mag > best[1]:
                best = (h, mag, inc.est_error)
        h, mag, err = best
        beta = 0.5 + 0.5 / c.tau
        ratio = mag / float(abs(h)) ** beta
        floor = min(floor, ratio)
        report.entries.append(
            WitnessEntry(l, r, c.tau, float(x_l), float(h), mag, err, ratio, floor * float(abs(h)) ** beta)
        )
    return report
