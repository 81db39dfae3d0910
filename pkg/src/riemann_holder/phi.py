"""phi(z) = sum_{n>=1} e(n^2 z) / (2 pi i n^2) and its increments.

Increments use the contour identity

    phi(x+h) - phi(x) = -h/2 + (1/2) (L + T - R),

with L, R the integrals of theta(x + .) up the vertical sides [0, i|h|] and
[h, h + i|h|], and T the integral along the top side [i|h|, h + i|h|]. The
vertical sides are integrated in t after z = i t^2, which cancels the
y^{-1/2} growth of theta at the real axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .precision import (
    ComplexHP,
    cancellation_digits,
    from_fraction,
    kernel_context,
    to_fraction,
)
from .quadrature import integrate
from .theta import ThetaField, UpperHalfPoint, field_for, theta_auto

MAX_SERIES_TERMS = 10**8
_CHUNK = 1 << 20
_TWO64 = float(2**64)


def turns_u64(x) -> int:
    """frac(x) quantised to 2^-64, for exact modular phase products in uint64."""
    fx = to_fraction(x)
    fx -= math.floor(fx)
    return (fx.numerator << 64) // fx.denominator


def _phase_sum(weights_fn, x64: int, n_terms: int, coeffs_fn=None):
    """sum_{n=1}^{N} c_n w_n e(n^2 x) with the phase reduced exactly mod 1."""
    total = 0j
    xu = np.uint64(x64)
    for start in range(1, n_terms + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_terms + 1), dtype=np.uint64)
        with np.errstate(over="ignore"):
            ph = (n * n) * xu
        ang = ph.astype(np.float64) * (2 * math.pi / _TWO64)
        terms = weights_fn(n.astype(np.float64)) * np.exp(1j * ang)
        if coeffs_fn is not None:
            terms = terms * coeffs_fn(n)
        total += complex(terms.sum())
    return total


def series_terms(tol: float, y: float = 0.0) -> int:
    """Terms so that the tail of phi's series is below tol."""
    n = math.ceil(1 / (2 * math.pi * tol))
    if y > 0:
        m = 1
        while True:
            ratio = math.exp(-2 * math.pi * (2 * m + 3) * y)
            tail = math.exp(-2 * math.pi * (m + 1) ** 2 * y) / (2 * math.pi * (m + 1) ** 2 * (1 - ratio))
            if tail <= tol or m >= n:
                break
            m = m + 1 + m // 4
        n = min(n, m)
    return n


def _series_tail(n: int, y: float) -> float:
    tail = 1 / (2 * math.pi * n)
    if y > 0:
        ratio = math.exp(-2 * math.pi * (2 * n + 3) * y)
        tail = min(tail, math.exp(-2 * math.pi * (n + 1) ** 2 * y) / (2 * math.pi * (n + 1) ** 2 * (1 - ratio)))
    return tail


def phi_series(x, y: float = 0.0, tol: float = 1e-8, n_terms: int | None = None) -> ComplexHP:
    """Partial sum of phi at x + iy (y >= 0) with a rigorous tail bound."""
    if y < 0:
        raise ValueError("phi is evaluated on the closed upper half-plane only")
    n = series_terms(tol, y) if n_terms is None else n_terms
    if n > MAX_SERIES_TERMS:
        raise ValueError(f"tolerance unreachable: needs {n} terms (cap {MAX_SERIES_TERMS})")
    yf = float(y)

    def weights(nf):
        w = 1 / (2 * math.pi * nf * nf)
        return w * np.exp(-2 * math.pi * nf * nf * yf) if yf > 0 else w

    raw = _phase_sum(weights, turns_u64(x), n)
    value = raw / 1j
    # tail + quantised phase (n^2 * 2^-64 per term) + float rounding
    err = _series_tail(n, yf) + n * 2.0**-64 + 8 * np.finfo(float).eps
    return ComplexHP(value, err)


@dataclass(frozen=True)
class ContourSpec:
    """Rectangle legs relative to the base point and the quadrature settings."""

    nodes: int = 16
    max_panels: int = 4000
    tol: float = 1e-11

    def legs(self, h):
        a = abs(h)
        return {
            "left": (0, 1j * a),
            "top": (1j * a, h + 1j * a),
            "right": (h, h + 1j * a),
        }


@dataclass(frozen=True)
class PhiIncrement:
    x: object
    h: object
    value: ComplexHP
    est_error: float
    method: str
    evals: int = 0
    legs: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value.value)


def _vertical_leg(fld: ThetaField, sqrt_h, theta_tol: float, spec: ContourSpec, ctx, tol: float):
    two_i = ctx.mpc(0, 2)

    def f(ts):
        out = []
        for t in ts:
            r = fld.evaluate(0, t * t, theta_tol)
            jac = two_i * t
            out.append((r.value * jac, r.est_error * float(abs(jac))))
        return out

    return integrate(f, ctx.mpf(0), sqrt_h, tol, ctx, spec.nodes, spec.max_panels, initial_panels=4)


def _top_leg(fld: ThetaField, h, height, theta_tol: float, spec: ContourSpec, ctx, tol: float):
    def f(ss):
        return [(r.value, r.est_error) for r in (fld.evaluate(s, height, theta_tol) for s in ss)]

    return integrate(f, ctx.mpf(0), h, tol, ctx, spec.nodes, spec.max_panels, initial_panels=4)


def _as_base(x):
    if hasattr(x, "midpoint"):
        return x.midpoint(bits=256)
    return to_fraction(x)


def phi_increment_contour(x, h, tol: float = 1e-11, digits: int | None = None,
                          spec: ContourSpec | None = None, height=None) -> PhiIncrement:
    """phi(x+h) - phi(x) from theta integrated around the rectangle over [x, x+h].

    ``height`` overrides the rectangle height |h| (path independence checks).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    spec = spec or ContourSpec(tol=tol)
    hf = to_fraction(h)
    if hf == 0 or abs(hf) > Fraction(1, 2):
        raise ValueError("need 0 < |h| <= 1/2")
    ctx = kernel_context(cancellation_digits(hf), digits)
    base = _as_base(x) % 1
    hc = from_fraction(ctx, hf)
    a = abs(hc) if height is None else from_fraction(ctx, to_fraction(height))
    f0 = field_for(base, ctx)
    f1 = field_for(base + hf, ctx)
    leg_tol = tol / 3
    theta_tol = max(leg_tol / (8 * float(a) + float(abs(hc))), 1e-300)
    sq = ctx.sqrt(a)
    left = _vertical_leg(f0, sq, theta_tol, spec, ctx, leg_tol)
    right = _vertical_leg(f1, sq, theta_tol, spec, ctx, leg_tol)
    top = _top_leg(f0, hc, a, theta_tol, spec, ctx, leg_tol)
    value = -hc / 2 + (left.value + top.value - right.value) / 2
    err = float(left.est_error + top.est_error + right.est_error) / 2 + 8 * float(ctx.eps) * float(abs(value))
    legs = {"left": left, "top": top, "right": right}
    return PhiIncrement(x, h, ComplexHP(value, err), err, "contour",
                        left.evals + top.evals + right.evals, legs)


def phi_increment_series(x, h, tol: float = 1e-8, n_terms: int | None = None) -> PhiIncrement:
    """phi_series(x+h) - phi_series(x), the brute-force oracle."""
    xf, hf = to_fraction(x), to_fraction(h)
    a = phi_series(xf + hf, 0.0, tol, n_terms)
    b = phi_series(xf, 0.0, tol, n_terms)
    diff = a - b
    return PhiIncrement(x, h, diff, diff.err, "series_oracle")


def phi_derivative_identity_check(z: UpperHalfPoint, step: float) -> float:
    """|central difference of phi at z - (theta(z) - 1)/2|."""
    y = float(z.y)
    if y < 2 * step:
        raise ValueError("need y >= 2*step")
    xf = to_fraction(z.x)
    sf = to_fraction(step)
    tol = 1e-16
    fwd = phi_series(xf + sf, y, tol).value
    bwd = phi_series(xf - sf, y, tol).value
    deriv = (fwd - bwd) / (2 * step)
    th = complex(theta_auto(z, 1e-14).value)
    return abs(deriv - (th - 1) / 2)


def riemann_f(x, tol: float = 1e-7, method: str = "auto", digits: int | None = None) -> float:
    """f(x) = sum sin(n^2 pi x)/n^2 = 2 pi Re phi(x/2)."""
    half = to_fraction(x) / 2
    if method == "auto":
        method = "series" if series_terms(tol / (2 * math.pi)) <= MAX_SERIES_TERMS // 10 else "contour"
    if method == "series":
        return 2 * math.pi * phi_series(half, 0.0, tol / (2 * math.pi)).value.real
    # Re phi(0) = 0, so f(x) = 2 pi Re(phi(h) - phi(0)) with h = x/2 reduced to [-1/2, 1/2]
    h = half - round(half)
    if h == 0:
        return 0.0
    inc = phi_increment_contour(0, h, tol / (4 * math.pi), digits)
    return 2 * math.pi * float(inc.value.value.real)


def f_increment(x, h, tol: float = 1e-11, digits: int | None = None) -> tuple[float, float]:
    """f(x+h) - f(x) and its error bound, through the contour for phi at x/2."""
    inc = phi_increment_contour(to_fraction(x) / 2, to_fraction(h) / 2, tol / (2 * math.pi), digits)
    return 2 * math.pi * float(inc.value.value.real), 2 * math.pi * inc.est_error
