"""Certified continued-fraction expansion and approximation exponents."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .numtheory import Rational


class InsufficientPrecision(ValueError):
    def __init__(self, index: int):
        super().__init__(f"insufficient precision: certified only up to convergent {index}")
        self.index = index


class Tag(str, Enum):
    RATIONAL = "rational"
    QUADRATIC = "quadratic_irrational"
    DECIMAL = "decimal_literal"


def _convergents_of_terms(terms: Sequence[int]):
    """(p_n, q_n) for n = 0..len(terms)-1."""
    p0, q0, p1, q1 = 1, 0, terms[0], 1
    out = [(p1, q1)]
    for a in terms[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


def _exact_terms(x: Fraction, limit: int | None = None) -> list[int]:
    terms = []
    while limit is None or len(terms) < limit:
        a = x.numerator // x.denominator
        terms.append(a)
        x -= a
        if x == 0:
            break
        x = 1 / x
    return terms


@dataclass(frozen=True)
class CertifiedReal:
    """A real number known through an exact enclosure.

    ``rational``: the exact value. ``quadratic_irrational``: ultimately periodic
    partial quotients, so any enclosure can be produced exactly.
    ``decimal_literal``: a fixed interval [lo, hi].
    """

    tag: Tag
    lo: Fraction | None = None
    hi: Fraction | None = None
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    label: str = ""

    @classmethod
    def rational(cls, p: int, q: int = 1) -> "CertifiedReal":
        r = Rational(p, q)
        v = r.as_fraction()
        return cls(Tag.RATIONAL, v, v, label=f"rat:{r}")

    @classmethod
    def quadratic(cls, preperiod: Sequence[int], period: Sequence[int]) -> "CertifiedReal":
        if not period or any(a < 1 for a in period) or any(a < 1 for a in preperiod[1:]):
            raise ValueError("partial quotients after the first must be positive")
        if not preperiod:
            preperiod = (period[0],)
            period = tuple(period[1:]) + (period[0],)
        body = ",".join(map(str, preperiod))
        label = f"quad:{body},({','.join(map(str, period))})"
        return cls(Tag.QUADRATIC, preperiod=tuple(preperiod), period=tuple(period), label=label)

    @classmethod
    def decimal(cls, text: str) -> "CertifiedReal":
        """A decimal literal, enclosed to one unit of its last digit."""
        text = text.strip()
        if not re.fullmatch(r"[+-]?\d+(\.\d+)?", text):
            raise ValueError(f"not a decimal literal: {text!r}")
        digits = len(text.partition(".")[2])
        centre = Fraction(text)
        unit = Fraction(1, 10**digits)
        return cls(Tag.DECIMAL, centre - unit, centre + unit, label=f"dec:{text}")

    @classmethod
    def interval(cls, lo: Fraction, hi: Fraction, label: str = "") -> "CertifiedReal":
        if lo > hi:
            raise ValueError("empty enclosure")
        return cls(Tag.DECIMAL, Fraction(lo), Fraction(hi), label=label)

    @classmethod
    def parse(cls, spec: str) -> "CertifiedReal":
        """Parse ``rat:p/q``, ``dec:<digits>`` or ``quad:a0,a1,(period)``."""
        kind, _, body = spec.partition(":")
        if kind == "rat":
            r = Rational.parse(body)
            return cls.rational(r.p, r.q)
        if kind == "dec":
            return cls.decimal(body)
        if kind == "quad":
            m = re.fullmatch(r"\s*((?:-?\d+\s*,\s*)*)\(\s*(\d+(?:\s*,\s*\d+)*)\s*\)\s*", body)
            if not m:
                raise ValueError(f"bad quadratic spec: {spec!r}")
            pre = [int(t) for t in m.group(1).split(",") if t.strip()]
            per = [int(t) for t in m.group(2).split(",")]
            return cls.quadratic(pre, per)
        raise ValueError(f"unknown x-spec kind: {spec!r}")

    @property
    def is_rational(self) -> bool:
        return self.tag is Tag.RATIONAL

    def terms(self, count: int) -> list[int]:
        """First ``count`` partial quotients (quadratic tag only)."""
        out = list(self.preperiod[:count])
        while len(out) < count:
            out.extend(self.period)
        return out[:count]

    def enclosure(self, bits: int = 128) -> tuple[Fraction, Fraction]:
        if self.tag is not Tag.QUADRATIC:
            return self.lo, self.hi
        n = len(self.preperiod) + 2
        while True:
            conv = _convergents_of_terms(self.terms(n))
            (pa, qa), (pb, qb) = conv[-2], conv[-1]
            if qa * qb > 2**bits:
                a, b = Fraction(pa, qa), Fraction(pb, qb)
                return min(a, b), max(a, b)
            n += max(4, len(self.period))

    def midpoint(self, bits: int = 128) -> Fraction:
        lo, hi = self.enclosure(bits)
        return (lo + hi) / 2

    def width(self, bits: int = 128) -> Fraction:
        lo, hi = self.enclosure(bits)
        return hi - lo

    def __str__(self):
        return self.label or f"[{float(self.lo)}, {float(self.hi)}]"


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    n: int
    tau: float | None
    tau_err: float | None
    side: str | None
    q_class: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def tau_certified(self) -> bool:
        return self.tau is not None


@dataclass
class CFExpansion:
    terms: list[int]
    convergents: list[Convergent]
    truncated: bool
    terminated: bool
    all_pairs: list[tuple[int, int]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.convergents)

    def __len__(self):
        return len(self.convergents)

    def __getitem__(self, i):
        return self.convergents[i]


def _certified_terms(lo: Fraction, hi: Fraction, max_terms: int):
    """Partial quotients shared by every point of [lo, hi]; (terms, truncated, terminated)."""
    terms: list[int] = []
    while len(terms) < max_terms:
        a_lo, a_hi = math.floor(lo), math.floor(hi)
        if a_lo != a_hi:
            return terms, True, False
        terms.append(a_lo)
        lo, hi = lo - a_lo, hi - a_lo
        if lo == hi == 0:
            return terms, False, True
        if lo == 0:
            # only the left endpoint terminates here
            return terms, True, False
        lo, hi = 1 / hi, 1 / lo
    return terms, False, False


def _distance_bounds(lo: Fraction, hi: Fraction, r: Fraction) -> tuple[Fraction, Fraction]:
    if r < lo:
        return lo - r, hi - r
    if r > hi:
        return r - hi, r - lo
    return Fraction(0), max(r - lo, hi - r)


def _ln(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def _tau_from_bounds(dlo: Fraction, dhi: Fraction, q: int):
    """(tau, error bar) or (None, None) when uncertified or q = 1."""
    if q <= 1 or dlo <= 0:
        return None, None
    lnq = math.log(q)
    t_hi = -_ln(dlo) / lnq
    t_lo = -_ln(dhi) / lnq
    return 0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)


def _side(lo: Fraction, hi: Fraction, r: Fraction) -> str | None:
    if r < lo:
        return "left"
    if r > hi:
        return "right"
    return None


def cf_expand(x: CertifiedReal, max_terms: int, strict: bool = False) -> CFExpansion:
    """Certified convergents r_1, r_2, ... (the trivial r_0 = a_0 is omitted).

    Terms are emitted only while both ends of the enclosure share them.
    With ``strict`` an uncertifiable request raises ``InsufficientPrecision``.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    want = max_terms + 1  # a_0 plus max_terms further quotients
    if x.tag is Tag.QUADRATIC:
        terms, truncated, terminated = x.terms(want), False, False
    elif x.tag is Tag.RATIONAL:
        full = _exact_terms(x.lo)
        terms, truncated, terminated = full[:want], False, len(full) <= want
    else:
        terms, truncated, terminated = _certified_terms(x.lo, x.hi, want)
    pairs = _convergents_of_terms(terms) if terms else []
    if x.tag is Tag.QUADRATIC and pairs:
        q_last = pairs[-1][1]
        lo, hi = x.enclosure(bits=4 * max(q_last.bit_length(), 1) + 96)
    else:
        lo, hi = x.lo, x.hi
    convs = []
    for n, (p, q) in enumerate(pairs):
        if n == 0:
            continue
        r = Fraction(p, q)
        dlo, dhi = _distance_bounds(lo, hi, r)
        tau, err = _tau_from_bounds(dlo, dhi, q)
        convs.append(Convergent(p, q, n, tau, err, _side(lo, hi, r), q % 4))
    if strict and truncated:
        raise InsufficientPrecision(len(convs))
    return CFExpansion(terms, convs, truncated, bool(terminated), pairs)


def tau_sequence(x: CertifiedReal, convergents: Sequence[Convergent]) -> list[float | None]:
    """tau_n = ln(1/|x - r_n|) / ln(q_n); None where uncertified or q_n = 1."""
    return [c.tau for c in convergents]


@dataclass(frozen=True)
class TauEstimate:
    tau_hat: float
    window_values: list[tuple[int, float]]
    filtered_indices: list[int]
    exact_tau: float | None


def tau_estimate(x: CertifiedReal, N: int) -> TauEstimate:
    """Finite-N proxy for tau(x): max of tau_n over the filtered tail window.

    Filtering keeps convergents with q_n != 2 (mod 4) and a certified tau_n;
    the window is n >= 3N/4, where tau_n - 2 ~ 1/ln(q_n) has mostly settled.
    The full filtered sequence is returned for extrapolation.
    """
    if x.is_rational:
        raise ValueError("tau is defined for irrational inputs")
    exp = cf_expand(x, N)
    filtered = [c for c in exp.convergents if c.q_class != 2 and c.tau is not None]
    if not filtered:
        raise ValueError("no filtered convergents")
    window = [(c.n, c.tau) for c in filtered if c.n >= math.ceil(3 * N / 4)]
    if not window:
        window = [(c.n, c.tau) for c in filtered[-1:]]
    exact = 2.0 if x.tag is Tag.QUADRATIC else None
    return TauEstimate(
        tau_hat=max(t for _, t in window),
        window_values=window,
        filtered_indices=[c.n for c in filtered],
        exact_tau=exact,
    )


def alpha_from_tau(tau: float) -> float:
    """Hoelder exponent 1/2 + 1/(2 tau) for tau >= 2 (tau = inf gives 1/2)."""
    if not tau >= 2:
        raise ValueError(f"tau must be >= 2, got {tau}")
    return 0.5 + 0.5 / tau


def tau_test_number(tau: int = 4, levels: int = 4, base: int = 10, first: int = 1) -> CertifiedReal:
    """sum_k base^(-s_k) with s_1 = first, s_{k+1} = tau * s_k, enclosed after ``levels`` terms."""
    exps = [first * tau**k for k in range(levels + 1)]
    lo = sum(Fraction(1, base**s) for s in exps[:-1])
    hi = lo + 2 * Fraction(1, base ** exps[-1])
    return CertifiedReal.interval(lo, hi, label=f"tau{tau}:{base}^-{exps[:-1]}")


def anchor_pairs(x: Fraction, limit: int = 400) -> list[tuple[int, int]]:
    """All convergents (p_n, q_n), n >= 0, of an exact rational."""
    return _convergents_of_terms(_exact_terms(x, limit))
