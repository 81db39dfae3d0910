"""Local expansion of phi at a rational p/q.

    phi(p/q + h) - phi(p/q) = C- |h|_-^{1/2} + C+ |h|_+^{1/2} - h/2 + R(h),

with C+ = e^{i pi/4} S(q,p) / (q sqrt 2), C- = i C+, and a remainder built from
the twisted functions

    phi_{q,p}^{(-k)}(x) = sum_{m>=1} S(q,p,m) / (2 pi i m^2)^{k+1} e(m^2 x).

Powers t^{k+1/2} for t < 0 follow t^{1/2} = i |t|^{1/2}, the principal branch
continued from the upper half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import mpmath
import numpy as np

from .numtheory import (
    Rational,
    gauss_sum_bound,
    gauss_sum_closed,
    gauss_sum_table,
    jacobi_symbol,
    normalize_residue,
)
from .phi import MAX_SERIES_TERMS, _phase_sum, turns_u64
from .precision import ComplexHP, to_fraction


class TableRow(str, Enum):
    Q1 = "q1"
    Q3 = "q3"
    Q2 = "q2"
    Q0_P1 = "q0_p1"
    Q0_P3 = "q0_p3"


def table_row(p: int, q: int) -> TableRow:
    r = q % 4
    if r == 1:
        return TableRow.Q1
    if r == 3:
        return TableRow.Q3
    if r == 2:
        return TableRow.Q2
    return TableRow.Q0_P1 if p % 4 == 1 else TableRow.Q0_P3


def half_power(t: float) -> complex:
    """t^{1/2} with t^{1/2} = i |t|^{1/2} for t < 0."""
    return complex(math.sqrt(t)) if t >= 0 else 1j * math.sqrt(-t)


def sqrt_plus(h: float) -> float:
    """|h|_+^{1/2}: sqrt(h) for h > 0, else 0."""
    return math.sqrt(h) if h > 0 else 0.0


def sqrt_minus(h: float) -> float:
    """|h|_-^{1/2}: sqrt(|h|) for h < 0, else 0."""
    return math.sqrt(-h) if h < 0 else 0.0


def _check_pair(p: int, q: int) -> None:
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"need coprime p/q with q >= 1, got {p}/{q}")


@dataclass(frozen=True)
class RationalExpansion:
    at: Rational
    c_minus: ComplexHP
    c_plus: ComplexHP
    c_exact: str
    differentiable_phi: bool
    table_row: TableRow
    re_coeff_left: float
    re_coeff_right: float

    def square_root_part(self, h: float) -> complex:
        return complex(self.c_minus.value) * sqrt_minus(h) + complex(self.c_plus.value) * sqrt_plus(h)

    def model(self, h: float) -> complex:
        """Increment without the remainder: C-part - h/2."""
        return self.square_root_part(h) - h / 2


def expansion_constants(p: int, q: int) -> RationalExpansion:
    """C-, C+ and the one-sided behaviour class of Re at p/q."""
    _check_pair(p, q)
    s = gauss_sum_closed(q, p)
    # C+ = (1 + i) S / (2 q), C- = (i - 1) S / (2 q); S = (a + b i) sqrt(q)
    a, b = s.a, s.b
    plus_re, plus_im = (a - b) / (2 * q), (a + b) / (2 * q)
    minus_re, minus_im = -(a + b) / (2 * q), (a - b) / (2 * q)
    root = math.sqrt(q)
    c_plus = complex(float(plus_re), float(plus_im)) * root
    c_minus = complex(float(minus_re), float(minus_im)) * root
    ulp = 4 * np.finfo(float).eps
    exact = f"C+ = ({plus_re}{'+' if plus_im >= 0 else '-'}{abs(plus_im)}i)*sqrt({q}); C- = i*C+"
    return RationalExpansion(
        at=Rational(p, q),
        c_minus=ComplexHP(c_minus, ulp),
        c_plus=ComplexHP(c_plus, ulp),
        c_exact=exact,
        differentiable_phi=(q % 4 == 2),
        table_row=table_row(normalize_residue(p, q), q),
        re_coeff_left=c_minus.real,
        re_coeff_right=c_plus.real,
    )


@dataclass(frozen=True)
class ReBehavior:
    row: TableRow
    left: float
    right: float
    left_kind: str
    right_kind: str


def classify_re_behavior(p: int, q: int) -> ReBehavior:
    """Leading term of Re(phi(p/q + h) - phi(p/q)) on each side, from Jacobi symbols.

    Sides with a square-root term carry the coefficient of |h|^{1/2}; the others
    are purely linear (-h/2) and carry 0.
    """
    _check_pair(p, q)
    pn = normalize_residue(p, q)
    row = table_row(pn, q)
    sq = 1 / math.sqrt(q)
    if row is TableRow.Q1:
        c = jacobi_symbol(pn, q) * sq / 2
        return ReBehavior(row, -c, c, "sqrt", "sqrt")
    if row is TableRow.Q3:
        c = jacobi_symbol(pn, q) * sq / 2
        return ReBehavior(row, -c, -c, "sqrt", "sqrt")
    if row is TableRow.Q2:
        return ReBehavior(row, 0.0, 0.0, "linear", "linear")
    c = jacobi_symbol(q, pn) * sq
    if row is TableRow.Q0_P1:
        return ReBehavior(row, -c, 0.0, "sqrt", "linear")
    return ReBehavior(row, 0.0, c, "linear", "sqrt")


def is_differentiable_f(p: int, q: int) -> bool:
    """Riemann's f is differentiable at p/q iff p and q are both odd."""
    _check_pair(p, q)
    return p % 2 == 1 and q % 2 == 1


def is_differentiable_phi(p: int, q: int) -> bool:
    _check_pair(p, q)
    return q % 4 == 2


# ---------------------------------------------------------------- twisted phi


@dataclass(frozen=True)
class TwistedPhi:
    q: int
    p: int
    k: int = 0

    def __post_init__(self):
        _check_pair(self.p, self.q)
        if self.k < 0:
            raise ValueError("primitive order must be >= 0")

    def sup_bound(self) -> float:
        """sqrt(2q) zeta(2k+2) / (2 pi)^{k+1}."""
        return gauss_sum_bound(self.q) * float(mpmath.zeta(2 * self.k + 2)) / (2 * math.pi) ** (self.k + 1)

    def tail(self, m: int) -> float:
        """Bound on the terms beyond m."""
        k = self.k
        return gauss_sum_bound(self.q) * (2 * math.pi) ** -(k + 1) / ((2 * k + 1) * m ** (2 * k + 1))

    def terms_for(self, tol: float) -> int:
        k = self.k
        c = gauss_sum_bound(self.q) * (2 * math.pi) ** -(k + 1) / (2 * k + 1)
        return max(1, math.ceil((c / tol) ** (1 / (2 * k + 1))))


def twisted_phi_eval(t: TwistedPhi, x, tol: float = 1e-10, n_terms: int | None = None) -> ComplexHP:
    """phi_{q,p}^{(-k)}(x) for real x, the phase reduced exactly mod 1."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = t.terms_for(tol) if n_terms is None else n_terms
    if m > MAX_SERIES_TERMS:
        raise ValueError(f"tolerance unreachable: needs {m} terms (cap {MAX_SERIES_TERMS})")
    table = gauss_sum_table(t.q, t.p)
    q, k = t.q, t.k
    scale = (2j * math.pi) ** -(k + 1)

    def weights(mf):
        return mf ** (-2.0 * (k + 1))

    def coeffs(mu):
        return table[(mu % np.uint64(q)).astype(np.int64)]

    raw = _phase_sum(weights, turns_u64(x), m, coeffs)
    err = t.tail(m) + gauss_sum_bound(q) * (m * 2.0**-64 + 16 * np.finfo(float).eps)
    return ComplexHP(raw * scale, err)


def twisted_argument(q: int, h) -> Fraction:
    """-1/(4 q^2 h) reduced mod 1."""
    return (-1 / (4 * q * q * to_fraction(h))) % 1


# ---------------------------------------------------------------- remainder integrals

_ASYMPTOTIC_FROM = 40.0


def _scaled_gamma(a: float, c: np.ndarray):
    """E(a, ic) = e^{x} Gamma(a, x) x^{1-a} at x = i c, with an error bound.

    Large c: the asymptotic series sum_j (a-1)...(a-j) / x^j, truncated at its
    smallest term. Small c: mpmath's incomplete gamma.
    """
    out = np.empty(c.shape, dtype=complex)
    err = np.empty(c.shape)
    big = c >= _ASYMPTOTIC_FROM
    if big.any():
        x = 1j * c[big]
        term = np.ones_like(x)
        acc = np.ones_like(x)
        live = np.ones(x.shape, dtype=bool)
        for j in range(1, 400):
            nxt = term * (a - j) / x
            # stop each entry at its smallest term
            live &= np.abs(nxt) < np.abs(term)
            live &= np.abs(term) > 1e-18
            if not live.any():
                break
            term = np.where(live, nxt, term)
            acc = acc + np.where(live, nxt, 0)
        out[big] = acc
        err[big] = 2 * np.abs(term) + 8 * np.finfo(float).eps
    with mpmath.workdps(30):
        for i in np.flatnonzero(~big):
            x = mpmath.mpc(0, c[i])
            v = mpmath.exp(x) * mpmath.gammainc(a, x) * x ** (1 - a)
            out[i] = complex(v)
            err[i] = 8 * np.finfo(float).eps
    return out, err


def remainder_integral(p: int, q: int, h, K: int = 0, tol: float = 1e-14) -> ComplexHP:
    """I_K = int_0^h t^{K+1/2} phi_{q,p}^{(-K)}(-1/(4 q^2 t)) dt, mode by mode.

    Each mode integral int_0^H t^{K+1/2} e^{-ib/t} dt, b = pi m^2 / (2 q^2),
    is an incomplete gamma function; the sum over m is cut where the bound
    |mode| <= 2 H^{K+5/2} / b makes the rest smaller than tol.
    """
    _check_pair(p, q)
    hf = to_fraction(h)
    if hf == 0:
        return ComplexHP(0j, 0.0)
    H = abs(hf)
    Hf = float(H)
    a = -K - 1.5
    # |S_m / (2 pi m^2)^{K+1}| * 2 H^{K+5/2} / b_m <= coef * m^{-2K-4}
    coef = gauss_sum_bound(q) * 4 * q * q * Hf ** (K + 2.5) / (math.pi * (2 * math.pi) ** (K + 1))
    s = 2 * K + 4
    M = max(8, math.ceil((coef / ((s - 1) * tol)) ** (1 / (s - 1))))
    m = np.arange(1, M + 1, dtype=np.float64)
    table = gauss_sum_table(q, p)
    S = table[np.arange(1, M + 1) % q]
    b = math.pi * m * m / (2 * q * q)
    c = b / Hf
    E, E_err = _scaled_gamma(a, c)
    # e^{-i b/H} = e(-m^2 / (4 q^2 H)), phase reduced exactly
    turns_base = (-1 / (4 * q * q * H)) % 1
    x64 = (turns_base.numerator << 64) // turns_base.denominator
    mu = np.arange(1, M + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        ph = (mu * mu) * np.uint64(x64)
    rot = np.exp(1j * ph.astype(np.float64) * (2 * math.pi / 2.0**64))
    j_plus = Hf ** (K + 2.5) / (1j * b) * rot * E
    if hf < 0:
        # t = -u: (-1)^{K+1} i conj(J+(|h|))
        modes = (-1) ** (K + 1) * 1j * np.conj(j_plus)
    else:
        modes = j_plus
    weights = S / (2j * math.pi * m * m) ** (K + 1)
    total = complex(np.sum(weights * modes))
    mode_err = np.abs(weights) * Hf ** (K + 2.5) / b * (E_err + np.abs(E) * M * 2.0**-60)
    tail = coef * M ** (1 - s) / (s - 1)
    return ComplexHP(total, tail + float(mode_err.sum()))


def _integral_coefficients(q: int, K: int) -> list[complex]:
    """c_0 = -6 q e^{i pi/4}/sqrt 2, c_{k+1} = -4 q^2 (k + 5/2) c_k."""
    c = [-6 * q * complex(math.cos(math.pi / 4), math.sin(math.pi / 4)) / math.sqrt(2)]
    for k in range(K):
        c.append(-4 * q * q * (k + 2.5) * c[-1])
    return c


def asymptotic_coefficient(k: int) -> float:
    """a_k = (-1)^k 4^{k+1} prod_{j=1}^{k} (j + 1/2)."""
    prod = 1.0
    for j in range(1, k + 1):
        prod *= j + 0.5
    return (-1) ** k * 4 ** (k + 1) * prod


def asymptotic_term(p: int, q: int, h, k: int, tol: float = 1e-14) -> ComplexHP:
    """-(e^{-3 pi i s/4}/sqrt 2) a_k q^{2k+1} phi^{(-k)}(-1/(4q^2 h)) e^{k pi i (1-s)/2} |h|^{k+3/2}."""
    hf = to_fraction(h)
    s = 1 if hf > 0 else -1
    H = float(abs(hf))
    front = -complex(math.cos(3 * math.pi * s / 4), -math.sin(3 * math.pi * s / 4)) / math.sqrt(2)
    front *= asymptotic_coefficient(k) * q ** (2 * k + 1) * (1 if s > 0 else (-1) ** k) * H ** (k + 1.5)
    scale = abs(front)
    val = twisted_phi_eval(TwistedPhi(q, p, k), twisted_argument(q, hf), tol / max(scale, 1e-300))
    return val.scaled(front)


@dataclass(frozen=True)
class AsymptoticTerms:
    terms: list[ComplexHP]
    integral: ComplexHP
    coefficients: list[float]

    @property
    def total(self) -> ComplexHP:
        acc = self.integral
        for t in self.terms:
            acc = acc + t
        return acc


def asymptotic_terms(p: int, q: int, h, K: int, tol: float = 1e-12) -> AsymptoticTerms:
    """Terms k = 0..K of the integration-by-parts series and the integral left over."""
    _check_pair(p, q)
    if K < 0:
        raise ValueError("K must be >= 0")
    hf = to_fraction(h)
    if hf == 0 or abs(hf) > Fraction(1, 10):
        raise ValueError("need 0 < |h| <= 0.1")
    part = tol / (K + 2)
    terms = [asymptotic_term(p, q, hf, k, part) for k in range(K + 1)]
    cK = _integral_coefficients(q, K)[K]
    integral = remainder_integral(p, q, hf, K, part / abs(cK)).scaled(cK)
    return AsymptoticTerms(terms, integral, [asymptotic_coefficient(k) for k in range(K + 1)])


def remainder(p: int, q: int, h, tol: float = 1e-12) -> ComplexHP:
    """R_{q,p}(h) = -4q (e^{-3 pi i s/4}/sqrt 2) phi_{q,p}(-1/(4q^2 h)) |h|^{3/2}
    - 6q (e^{i pi/4}/sqrt 2) int_0^h t^{1/2} phi_{q,p}(-1/(4q^2 t)) dt."""
    return asymptotic_terms(p, q, h, 0, tol).total


def increment_model(p: int, q: int, h, tol: float = 1e-12) -> ComplexHP:
    """C-part - h/2 + R(h): the right-hand side of the local expansion."""
    exp = expansion_constants(p, q)
    hf = float(to_fraction(h))
    r = remainder(p, q, h, tol)
    return ComplexHP(exp.model(hf) + complex(r.value), r.err + 4 * np.finfo(float).eps)
