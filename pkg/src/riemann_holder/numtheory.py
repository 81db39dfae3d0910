"""Exact integer kernel: Jacobi symbols and quadratic Gauss sums.

Closed forms are kept symbolic as ``(a + b*i) * sqrt(q)`` with rational
``a, b`` so that the vanishing branch ``q = 2 (mod 4)`` is an exact zero.
Numeric values only appear at the boundary (``to_complex``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .precision import ComplexHP


class Branch(str, Enum):
    Q_ODD = "q_odd"
    Q_2MOD4 = "q_2mod4"
    Q_0MOD4 = "q_0mod4"


def branch_of(q: int) -> Branch:
    if q % 2:
        return Branch.Q_ODD
    return Branch.Q_2MOD4 if q % 4 == 2 else Branch.Q_0MOD4


@dataclass(frozen=True)
class Rational:
    """Reduced fraction p/q with q >= 1."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0:
            raise ValueError("denominator must be nonzero")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    def __str__(self):
        return f"{self.p}/{self.q}"

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    @classmethod
    def parse(cls, text: str) -> "Rational":
        num, _, den = text.partition("/")
        return cls(int(num), int(den) if den else 1)


def mod_inverse(a: int, m: int) -> int:
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not invertible mod {m}")
    return pow(a, -1, m) if m > 1 else 0


def jacobi_symbol(p: int, q: int) -> int:
    """Jacobi symbol (p|q) for odd q >= 1, by quadratic reciprocity."""
    if q <= 0 or q % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive q, got {q}")
    p %= q
    result = 1
    while p:
        while p % 2 == 0:
            p //= 2
            if q % 8 in (3, 5):
                result = -result
        p, q = q, p
        if p % 4 == 3 and q % 4 == 3:
            result = -result
        p %= q
    return result if q == 1 else 0


def epsilon(n: int) -> complex:
    """1 if n = 1 (mod 4), i if n = 3 (mod 4)."""
    if n % 2 == 0:
        raise ValueError(f"epsilon is defined for odd n only, got {n}")
    return 1 + 0j if n % 4 == 1 else 1j


def _epsilon_parts(n: int) -> tuple[int, int]:
    return (1, 0) if n % 4 == 1 else (0, 1)


@dataclass(frozen=True)
class GaussSumValue:
    """Exact value ``(a + b*i) * sqrt(q)``."""

    a: Fraction
    b: Fraction
    q: int
    branch: Branch

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def abs_squared(self) -> Fraction:
        return (self.a * self.a + self.b * self.b) * self.q

    def to_complex(self, ctx=None):
        if ctx is None:
            return complex(float(self.a), float(self.b)) * math.sqrt(self.q)
        root = ctx.sqrt(self.q)
        return ctx.mpc(ctx.convert(self.a) * root, ctx.convert(self.b) * root)

    def __str__(self):
        if self.is_zero:
            return "0"
        coeff = _format_gaussian(self.a, self.b)
        return f"{coeff}*sqrt({self.q})" if self.q != 1 else coeff


def _format_gaussian(a: Fraction, b: Fraction) -> str:
    if b == 0:
        return str(a)
    if a == 0:
        return f"{b}*i" if b not in (1, -1) else ("i" if b == 1 else "-i")
    sign = "+" if b > 0 else "-"
    mag = abs(b)
    return f"({a}{sign}{'' if mag == 1 else str(mag) + '*'}i)"


def _check_coprime(q: int, p: int) -> None:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")


def normalize_residue(p: int, q: int) -> int:
    """Representative of p mod q in [1, q]."""
    r = p % q
    return r if r else q


def gauss_sum_closed(q: int, p: int) -> GaussSumValue:
    """S(q, p) = sum_{j=1}^{q} e(p j^2 / q) in closed form."""
    _check_coprime(q, p)
    p = normalize_residue(p, q)
    branch = branch_of(q)
    zero = Fraction(0)
    if branch is Branch.Q_ODD:
        chi = jacobi_symbol(p, q)
        re, im = _epsilon_parts(q)
        return GaussSumValue(Fraction(chi * re), Fraction(chi * im), q, branch)
    if branch is Branch.Q_2MOD4:
        return GaussSumValue(zero, zero, q, branch)
    # (1 + i) * conj(eps_p) * (q|p); p is odd here
    chi = jacobi_symbol(q, p)
    if p % 4 == 1:
        a, b = 1, 1
    else:  # (1 + i) * (-i) = 1 - i
        a, b = 1, -1
    return GaussSumValue(Fraction(chi * a), Fraction(chi * b), q, branch)


def _root_table(q: int) -> np.ndarray:
    k = np.arange(q, dtype=np.float64)
    return np.exp(2j * np.pi * k / q)


def gauss_sum_brute(q: int, p: int):
    """Direct q-term sum with a rounding bound."""
    _check_coprime(q, p)
    j = np.arange(1, q + 1, dtype=np.int64)
    idx = (p % q) * (j * j % q) % q
    value = complex(_root_table(q)[idx].sum())
    return ComplexHP(value, q * np.finfo(float).eps * 4)


@dataclass(frozen=True)
class GeneralGaussSum:
    """S(q, p, m) in reduced form ``scale * e(phase) * base``.

    ``base`` is S(q, p) or S(4q, p); ``phase`` is an exact rational number
    of turns. ``vanishes`` marks the exact zero case q = 0 (mod 4), m odd.
    """

    q: int
    p: int
    m: int
    base: GaussSumValue
    scale: Fraction
    phase: Fraction
    vanishes: bool = False

    @property
    def is_zero(self) -> bool:
        return self.vanishes or self.base.is_zero

    def to_complex(self, ctx=None):
        if self.is_zero:
            return 0j if ctx is None else ctx.mpc(0)
        if ctx is None:
            rot = cmath.exp(2j * math.pi * float(self.phase))
            return float(self.scale) * rot * self.base.to_complex()
        rot = ctx.expjpi(2 * ctx.convert(self.phase))
        return ctx.convert(self.scale) * rot * self.base.to_complex(ctx)


def gauss_sum_general(q: int, p: int, m: int) -> GeneralGaussSum:
    """S(q, p, m) = sum_{j=1}^{q} e((p j^2 + m j) / q) via completing the square."""
    _check_coprime(q, p)
    p = normalize_residue(p, q)
    m_red = m % q
    if q % 2 or m_red % 2 == 0:
        # m = 2 m' (mod q)
        half = (q + 1) // 2 if q % 2 else None
        m_half = (m_red * half) % q if half is not None else m_red // 2
        pinv = mod_inverse(p, q)
        phase = Fraction(-(pinv * m_half * m_half % q), q)
        return GeneralGaussSum(q, p, m, gauss_sum_closed(q, p), Fraction(1), phase % 1)
    if q % 4 == 0:
        return GeneralGaussSum(q, p, m, gauss_sum_closed(q, p), Fraction(0), Fraction(0), vanishes=True)
    # q = 2 (mod 4) and m odd; p* is the inverse of p mod 4q
    pinv = mod_inverse(p, 4 * q)
    phase = Fraction(-(pinv * m_red * m_red % (4 * q)), 4 * q)
    return GeneralGaussSum(q, p, m, gauss_sum_closed(4 * q, p), Fraction(1, 2), phase % 1)


def gauss_sum_general_brute(q: int, p: int, m: int):
    """Direct sum of e((p j^2 + m j)/q) with a rounding bound."""
    _check_coprime(q, p)
    j = np.arange(1, q + 1, dtype=np.int64)
    idx = ((p % q) * (j * j % q) + (m % q) * j) % q
    value = complex(_root_table(q)[idx].sum())
    return ComplexHP(value, q * np.finfo(float).eps * 4)


def gauss_sum_table(q: int, p: int) -> np.ndarray:
    """Closed-form S(q, p, m) for m = 0..q-1 as a complex128 array.

    Same reductions as ``gauss_sum_general``, vectorised over m with the
    phases reduced in exact integer arithmetic.
    """
    _check_coprime(q, p)
    p = normalize_residue(p, q)
    m = np.arange(q, dtype=np.int64)
    out = np.zeros(q, dtype=complex)
    s0 = gauss_sum_closed(q, p).to_complex()
    pinv = mod_inverse(p, q)
    if q % 2:
        mh = m * ((q + 1) // 2) % q
        even = np.ones(q, dtype=bool)
    else:
        mh = m // 2
        even = m % 2 == 0
    num = (pinv * (mh * mh % q)) % q
    out[even] = s0 * np.exp(-2j * np.pi * num[even] / q)
    if q % 4 == 2:
        s4 = gauss_sum_closed(4 * q, p).to_complex() / 2
        pinv4 = mod_inverse(p, 4 * q)
        odd = ~even
        num4 = (pinv4 * (m[odd] * m[odd] % (4 * q))) % (4 * q)
        out[odd] = s4 * np.exp(-2j * np.pi * num4 / (4 * q))
    return out


def brute_general_table(q: int, p_values) -> np.ndarray:
    """Brute-force S(q, p, m) for every p in ``p_values`` and m in [0, q).

    Row i, column m. Uses exact residue arithmetic before the root table.
    """
    roots = _root_table(q)
    j = np.arange(1, q + 1, dtype=np.int64)
    p_arr = np.asarray(list(p_values), dtype=np.int64) % q
    quad = roots[(p_arr[:, None] * (j * j % q)[None, :]) % q]
    lin = roots[(np.arange(q, dtype=np.int64)[:, None] * j[None, :]) % q]
    return quad @ lin.T


def gauss_sum_bound(q: int) -> float:
    """Uniform bound on |S(q, p, m)| over p, m."""
    if q < 2**1000:
        return math.sqrt(2 * q)
    # q beyond the float range (anchors of tiny rationals)
    return math.exp(0.5 * (math.log(2) + math.log(q))) * (1 + 1e-12)
