"""Composite Gauss-Legendre quadrature with dyadic panel refinement.

Refinement is global: the panel with the largest coarse/fine disagreement is
bisected until the summed disagreement drops below the tolerance. Panels are
reduced in left-to-right order so results do not depend on refinement order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
import numpy as np


class QuadratureError(RuntimeError):
    def __init__(self, achieved: float, value=None):
        super().__init__(f"quadrature not converged (achieved error {achieved:.3g})")
        self.achieved = achieved
        self.value = value


@lru_cache(maxsize=None)
def _gl_float(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return tuple(float(v) for v in x), tuple(float(v) for v in w)


@lru_cache(maxsize=None)
def _gl_mp(n: int, dps: int):
    ctx = mpmath.MPContext()
    ctx.dps = dps + 10
    xs, ws = [], []
    for x0 in _gl_float(n)[0]:
        x = ctx.mpf(x0)
        for _ in range(100):
            p, p1 = ctx.legendre(n, x), ctx.legendre(n - 1, x)
            dp = n * (x * p - p1) / (x * x - 1)
            step = p / dp
            x -= step
            if abs(step) < ctx.mpf(10) ** (-(dps + 8)):
                break
        p1 = ctx.legendre(n - 1, x)
        dp = n * (x * ctx.legendre(n, x) - p1) / (x * x - 1)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return tuple(xs), tuple(ws)


def gauss_legendre(ctx, n: int = 16):
    """Nodes and weights on [-1, 1] in the given context."""
    if ctx is mpmath.fp:
        return _gl_float(n)
    xs, ws = _gl_mp(n, ctx.dps)
    return tuple(ctx.convert(x) for x in xs), tuple(ctx.convert(w) for w in ws)


@dataclass
class QuadResult:
    value: object
    est_error: float
    evals: int
    panels: int


# f maps a list of abscissae to a list of (value, absolute error) pairs
Integrand = Callable[[Sequence[object]], Sequence[tuple[object, float]]]


def integrate(
    f: Integrand,
    a,
    b,
    tol: float,
    ctx,
    nodes: int = 16,
    max_panels: int = 4000,
    initial_panels: int = 2,
) -> QuadResult:
    if not tol > 0:
        raise ValueError("tol must be positive")
    xs, ws = gauss_legendre(ctx, nodes)
    evals = 0

    def rule(lo, hi):
        nonlocal evals
        half = (hi - lo) / 2
        mid = lo + half
        pts = [mid + half * x for x in xs]
        vals = f(pts)
        evals += len(pts)
        total = sum((w * v for w, (v, _) in zip(ws, vals)), ctx.mpc(0)) * half
        err = float(abs(half)) * sum(float(w) * float(e) for w, (_, e) in zip(ws, vals))
        return total, err

    def make_panel(lo, hi, coarse):
        mid = lo + (hi - lo) / 2
        left, right = rule(lo, mid), rule(mid, hi)
        diff = float(abs(coarse[0] - (left[0] + right[0])))
        return [lo, hi, left, right, diff]

    width = (b - a) / initial_panels
    bounds = [a + k * width for k in range(initial_panels)] + [b]
    panels = [make_panel(lo, hi, rule(lo, hi)) for lo, hi in zip(bounds, bounds[1:])]
    heap = [(-p[4], i) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    live = {i: p for i, p in enumerate(panels)}
    total_diff = sum(p[4] for p in panels)
    next_id = len(panels)

    while total_diff > tol:
        if len(live) >= max_panels:
            raise QuadratureError(total_diff, _sum_live(live, ctx))
        _, pid = heapq.heappop(heap)
        lo, hi, left, right, diff = live.pop(pid)
        total_diff -= diff
        mid = lo + (hi - lo) / 2
        for child in (make_panel(lo, mid, left), make_panel(mid, hi, right)):
            live[next_id] = child
            heapq.heappush(heap, (-child[4], next_id))
            total_diff += child[4]
            next_id += 1
        # guard against drift from repeated float subtraction
        if len(live) % 64 == 0:
            total_diff = sum(p[4] for p in live.values())

    value = _sum_live(live, ctx)
    fine_err = sum(p[2][1] + p[3][1] for p in live.values())
    est = sum(p[4] for p in live.values()) + fine_err
    return QuadResult(value, est, evals, len(live))


def _sum_live(live, ctx):
    ordered = sorted(live.values(), key=lambda p: p[0])
    total = ctx.mpc(0)
    for p in ordered:
        total += p[2][0] + p[3][0]
    return total
