"""Jacobi theta function theta(z) = sum_n e(n^2 z) for Im z > 0.

Two representations are available: the direct series, and the transformed
series around a rational anchor p/q,

    theta(p/q + zeta) = e^{i pi/4} / (q sqrt 2) * zeta^{-1/2}
                        * (S(q,p) + 2 sum_{m>=1} S(q,p,m) exp(-i pi m^2 / (2 q^2 zeta))),

whose terms decay like exp(-pi m^2 y / (2 q^2 |zeta|^2)). ``ThetaField``
caches the convergents of a base point and picks the cheapest representation
for every evaluation near it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .contfrac import anchor_pairs
from .numtheory import (
    Rational,
    gauss_sum_bound,
    gauss_sum_closed,
    mod_inverse,
    normalize_residue,
)
from .precision import (
    FLOAT_DIGITS,
    ComplexHP,
    PrecisionError,
    context,
    default_digits,
    from_fraction,
    real_of,
    to_fraction,
)


class SeriesNotEffective(RuntimeError):
    def __init__(self, needed: int, max_terms: int):
        super().__init__(f"series not effective: needs {needed} terms, cap {max_terms}")
        self.needed = needed


@dataclass(frozen=True)
class UpperHalfPoint:
    x: object
    y: object

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"Im z must be positive, got {self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "UpperHalfPoint":
        return cls(z.real, z.imag)

    def reduced(self) -> "UpperHalfPoint":
        x = to_fraction(self.x)
        return UpperHalfPoint(x - math.floor(x), self.y)


@dataclass(frozen=True)
class ThetaResult:
    value: object
    est_error: float
    method: str
    terms_used: int
    anchor: Rational | None = None

    @property
    def hp(self) -> ComplexHP:
        return ComplexHP(self.value, self.est_error)

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------- truncation


def direct_terms(y: float, tol: float) -> int:
    n = math.ceil(math.sqrt(max(0.0, math.log(2 / tol)) / (2 * math.pi * y))) + 2
    lo = 0
    while direct_tail(y, n) > tol:
        lo, n = n, n + 1 + n // 16
    # smallest n meeting tol: the tail is decreasing in n, so bisect on (lo, n]
    lo = max(lo, 0)
    while n - lo > 1:
        mid = (lo + n) // 2
        if mid >= 1 and direct_tail(y, mid) <= tol:
            n = mid
        else:
            lo = mid
    return n


def direct_tail(y: float, n: int) -> float:
    """Bound on 2 sum_{k>n} exp(-2 pi k^2 y)."""
    lead = -2 * math.pi * (n + 1) ** 2 * y
    ratio = math.exp(-2 * math.pi * (2 * n + 3) * y)
    return 2 * math.exp(lead) / (1 - ratio) if ratio < 1 else math.inf


def _near_tail(log_amp: float, log_r: float, m: int) -> float:
    """log of amp * sum_{k>m} r^{k^2} with r = exp(log_r) < 1."""
    ratio = math.exp(log_r * (2 * m + 3))
    if ratio >= 1:
        return math.inf
    return log_amp + log_r * (m + 1) ** 2 - math.log1p(-ratio)


def near_terms(q: int, smax: float, zeta_abs: float, y: float, tol: float) -> int:
    """Smallest M whose transformed-series tail is below tol."""
    log_amp = math.log(2 * smax / (q * math.sqrt(2))) - 0.5 * math.log(zeta_abs)
    log_r = -math.pi * y / (2 * q * q * zeta_abs * zeta_abs)
    log_tol = math.log(tol)
    if log_r == 0.0:
        return 2**62
    guess = math.sqrt(max(0.0, (log_amp - log_tol) / -log_r)) - 1
    m = max(0, int(guess))
    while _near_tail(log_amp, log_r, m) > log_tol:
        m += 1 + m // 8
    return m


# ---------------------------------------------------------------- anchors


class Anchor:
    """A rational p/q with the Gauss-sum data of the transformed series."""

    __slots__ = ("p", "q", "pn", "pinv", "pinv4", "smax", "_numeric")

    def __init__(self, p: int, q: int):
        self.p, self.q = p, q
        self.pn = normalize_residue(p, q)
        self.pinv = mod_inverse(self.pn, q)
        self.pinv4 = mod_inverse(self.pn, 4 * q) if q % 4 == 2 else None
        self.smax = gauss_sum_bound(q)
        self._numeric = {}

    def _bases(self, ctx):
        key = id(ctx)
        if key not in self._numeric:
            s0 = gauss_sum_closed(self.q, self.pn).to_complex(ctx)
            s4 = gauss_sum_closed(4 * self.q, self.pn).to_complex(ctx) / 2 if self.pinv4 is not None else None
            self._numeric[key] = (s0, s4)
        return self._numeric[key]

    def coefficient_turns(self, m: int):
        """S(q,p,m) as (which base, phase numerator, phase denominator) or None if zero."""
        q = self.q
        mr = m % q
        if q % 2:
            mh = (mr * ((q + 1) // 2)) % q
            return 0, -(self.pinv * mh * mh % q), q
        if mr % 2 == 0:
            mh = mr // 2
            return 0, -(self.pinv * mh * mh % q), q
        if q % 4 == 0:
            return None
        return 1, -(self.pinv4 * mr * mr % (4 * q)), 4 * q

    def evaluate(self, ctx, zeta, tol: float, max_terms: int = 100_000):
        """theta(p/q + zeta) via the transformed series: (value, err, terms)."""
        q = self.q
        s0, s4 = self._bases(ctx)
        zabs = float(abs(zeta))
        y = float(zeta.imag)
        m_max = near_terms(q, self.smax, zabs, y, tol)
        if m_max > max_terms:
            raise SeriesNotEffective(m_max, max_terms)
        two_pi = 2 * ctx.pi
        base = -ctx.mpc(0, 1) * ctx.pi / (2 * q * q * zeta)
        acc = ctx.mpc(s0)
        mag = float(abs(s0))
        for m in range(1, m_max + 1):
            c = self.coefficient_turns(m)
            if c is None:
                continue
            which, num, den = c
            s = s0 if which == 0 else s4
            if s == 0:
                continue
            arg = base * (m * m) + ctx.mpc(0, two_pi * (ctx.mpf(num) / den))
            term = 2 * s * ctx.exp(arg)
            acc += term
            mag += float(abs(term))
        pref = ctx.expjpi(ctx.mpf(1) / 4) / (q * ctx.sqrt(2) * ctx.sqrt(zeta))
        value = pref * acc
        pabs = float(abs(pref))
        tail = math.exp(_near_tail(math.log(2 * self.smax * pabs), -math.pi * y / (2 * q * q * zabs * zabs), m_max))
        rounding = 16 * (m_max + 4) * float(ctx.eps) * pabs * mag
        return value, tail + rounding, m_max


def _direct(ctx, x: Fraction, y, tol: float, n_terms: int | None = None):
    yf = float(y)
    n = direct_terms(yf, tol) if n_terms is None else n_terms
    two_pi = 2 * ctx.pi
    a, b = x.numerator, x.denominator
    y_ctx = ctx.convert(y) if not isinstance(y, Fraction) else from_fraction(ctx, y)
    acc = ctx.mpc(0)
    mag = 0.0
    for k in range(1, n + 1):
        k2 = k * k
        turns = from_fraction(ctx, Fraction(k2 * a % b, b))
        term = ctx.exp(ctx.mpc(-two_pi * k2 * y_ctx, two_pi * turns))
        acc += term
        mag += float(abs(term))
    value = 1 + 2 * acc
    err = direct_tail(yf, n) + 16 * (n + 2) * float(ctx.eps) * (1 + 2 * mag)
    return value, err, n


@lru_cache(maxsize=256)
def _anchors_for(x: Fraction) -> tuple[tuple[Anchor, Fraction], ...]:
    out = []
    for p, q in anchor_pairs(x):
        out.append((Anchor(p, q), x - Fraction(p, q)))
    return tuple(out)


class ThetaField:
    """theta evaluated at points X + w, X exact and w a small complex offset.

    The offsets d_n = X - p_n/q_n of the convergents of X are exact, so
    evaluations close to X keep full relative accuracy in zeta = d_n + w.
    """

    def __init__(self, x, ctx):
        self.x = to_fraction(x)
        self.ctx = ctx
        self.anchors = [
            (anc, from_fraction(ctx, d), float(d)) for anc, d in _anchors_for(self.x)
        ]

    def choose(self, u: float, y: float, tol: float):
        """(cost, anchor index or None for direct)."""
        best_cost = direct_terms(y, tol)
        best = None
        sqrt_y = math.sqrt(y)
        lead = math.sqrt(2 * max(1.0, math.log(1 / tol)) / math.pi)
        for i, (anc, _, d) in enumerate(self.anchors):
            # compared as int vs float: q can exceed the float range
            if anc.q > (4 * best_cost + 8) / (sqrt_y * lead):
                break
            zabs = math.hypot(d + u, y)
            cost = near_terms(anc.q, anc.smax, zabs, y, tol)
            if cost <= best_cost:
                best_cost, best = cost, i
        return best_cost, best

    def evaluate(self, u, y, tol: float) -> ThetaResult:
        """theta(X + u + i y)."""
        ctx = self.ctx
        uf, yf = float(u), float(y)
        _, idx = self.choose(uf, yf, tol)
        if idx is None:
            xr = self.x + to_fraction(u) if not isinstance(u, Fraction) else self.x + u
            value, err, n = _direct(ctx, xr % 1, y, tol)
            return ThetaResult(value, err, "direct", n)
        anc, d, _ = self.anchors[idx]
        zeta = ctx.mpc(d + u, y)
        value, err, m = anc.evaluate(ctx, zeta, tol)
        return ThetaResult(value, err, "near_rational", m, Rational(anc.p, anc.q))


# ---------------------------------------------------------------- public API


def _theta_context(y: float, tol: float, digits: int | None):
    digits = default_digits() if digits is None else digits
    mag = max(1.0, (2 * y) ** -0.5)
    needed = math.ceil(math.log10(mag / tol)) + 2
    if needed <= FLOAT_DIGITS:
        return context(FLOAT_DIGITS)
    if needed > digits:
        raise PrecisionError("tolerance below working precision", needed)
    return context(digits)


def theta_direct(z: UpperHalfPoint, tol: float = 1e-12, digits: int | None = None) -> ThetaResult:
    """1 + 2 sum_{n<=N} e(n^2 z) with a rigorous geometric tail bound."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = z.y
    ctx = _theta_context(float(y), tol, digits)
    x = to_fraction(z.x) % 1
    value, err, n = _direct(ctx, x, y, tol)
    return ThetaResult(value, err, "direct", n)


def theta_near_rational(
    p: int,
    q: int,
    zeta: complex,
    tol: float = 1e-12,
    max_terms: int = 100_000,
    digits: int | None = None,
) -> ThetaResult:
    """theta(p/q + zeta) through the transformed series at the anchor p/q."""
    if math.gcd(p, q) != 1 or q < 1:
        raise ValueError(f"need coprime p/q with q >= 1, got {p}/{q}")
    y = float(zeta.imag)
    if not y > 0:
        raise ValueError("Im zeta must be positive")
    ctx = _theta_context(y, tol, digits)
    anc = Anchor(p, q)
    zc = ctx.mpc(real_of(ctx, zeta.real), real_of(ctx, zeta.imag))
    value, err, m = anc.evaluate(ctx, zc, tol, max_terms)
    return ThetaResult(value, err, "near_rational", m, Rational(p, q))


def theta_auto(z: UpperHalfPoint, tol: float = 1e-12, digits: int | None = None) -> ThetaResult:
    """Cheapest of the direct series and the transformed series at a convergent of x."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ctx = _theta_context(float(z.y), tol, digits)
    field = field_for(to_fraction(z.x) % 1, ctx)
    return field.evaluate(0, z.y if not isinstance(z.y, Fraction) else from_fraction(ctx, z.y), tol)


@lru_cache(maxsize=64)
def _field_cached(x: Fraction, ctx_key: int) -> ThetaField:
    return ThetaField(x, context(ctx_key))


def field_for(x: Fraction, ctx) -> ThetaField:
    return _field_cached(x, ctx.dps)


def elementary_bound(y: float) -> float:
    """|theta(x + iy)| <= 1 + 2 e^{-2 pi y} + (2y)^{-1/2}."""
    return 1 + 2 * math.exp(-2 * math.pi * y) + (2 * y) ** -0.5
