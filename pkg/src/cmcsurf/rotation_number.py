"""Rotation number K(H, n, C) of the profile curve and its limiting values."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .errors import BelowThreshold, EmptyInterval, NoRoot
from .profile_solver import period_integrals
from .scalar_core import ProblemParams, SpaceKind, gap_at_t2, roots_n2, spherical


@dataclass(frozen=True)
class KBounds:
    a1: float
    a2n: float
    b2: float


def rotation_K(p: ProblemParams, *, rtol: float = 1e-13) -> float:
    """K = theta(T), the angle swept by the profile curve over one period of g."""
    _, (K,) = period_integrals(p, rtol=rtol, which=("theta",))
    return K


def rotation_K_n2_lemma(H: float, C: float, *, epsrel: float = 1e-13) -> float:
    """K(H, 2, C) from the cosine-substituted integral over [0, pi].

    Uses q1 = (2H - C) / (2C(1 + H^2)) and q2 = sqrt(C^2 - 4CH - 4) / (2C(1 + H^2)).
    The two factors that vanish at the ends of the interval are rebuilt from
    the roots, -q1 - q2 = t1^2/C and 1 + q1 - q2 = (C - t2^2)/C, so the
    integrand stays accurate for very large C.
    """
    if C * C - 4.0 * C * H - 4.0 < 0.0:
        raise BelowThreshold(f"C={C} is below 2(H + sqrt(1 + H^2)) for H={H}")
    kappa = 1.0 + H * H
    q2 = math.sqrt(C * C - 4.0 * C * H - 4.0) / (2.0 * C * kappa)
    t1, t2 = roots_n2(H, C)
    lo = t1 * t1 / C
    hi = gap_at_t2(spherical(2, H, C), t2) / C
    root_kappa = math.sqrt(kappa)

    def integrand(sin2, cos2):
        # -q2 cos t - q1 and 1 + q1 + q2 cos t written with half-angle squares
        u = lo + 2.0 * q2 * sin2
        w = hi + 2.0 * q2 * cos2
        return (1.0 / C + H * u) / (w * math.sqrt(u) * root_kappa)

    first = lambda t: integrand(math.sin(0.5 * t) ** 2, math.cos(0.5 * t) ** 2)  # noqa: E731
    # second half with t -> pi - t so both peaks sit at a representable 0
    second = lambda t: integrand(math.cos(0.5 * t) ** 2, math.sin(0.5 * t) ** 2)  # noqa: E731
    total = 0.0
    for f, floor in ((first, lo), (second, hi)):
        # the peak at 0 has width ~ sqrt(floor / q2); split geometrically towards it
        width = 2.0 * math.sqrt(floor / q2)
        edges = [0.0]
        while width < 0.5 * math.pi:
            edges.append(width)
            width *= 8.0
        edges.append(0.5 * math.pi)
        for a, b in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
            total += val
    return total


def a1_limit(H: float) -> float:
    """lim K as C -> infinity: 2 arccot(H)."""
    return 2.0 * math.atan2(1.0, H)


def a2n_limit(n: int, H: float) -> float:
    """lim K as C -> c0+."""
    return math.pi * math.sqrt(2.0 - 2.0 * n * H / math.sqrt(4.0 * (n - 1) + H * H * n * n))


def b1_bound(H: float) -> float:
    """The n = 2 large-C limit; identical to a1."""
    return a1_limit(H)


def b2_bound(H: float) -> float:
    """The n = 2 threshold limit in its published closed form."""
    w = H + math.sqrt(1.0 + H * H)
    return (
        math.sqrt(2.0) * math.pi * w**1.5
        / ((1.0 + H * H) ** 0.25 * (1.0 + 2.0 * H * H + 2.0 * H * math.sqrt(1.0 + H * H)))
    )


def k_limits(n: int, H: float) -> KBounds:
    return KBounds(a1=a1_limit(H), a2n=a2n_limit(n, H), b2=b2_bound(H))


def admissible_H_interval(n: int, m: int):
    """Open H-interval on which 2*pi/m lies strictly between a1(H) and a2n(H)."""
    if m < 2:
        raise ValueError("m must be at least 2")
    h_lo = 0.0 if m == 2 else 1.0 / math.tan(math.pi / m)
    h_hi = (m * m - 2) * math.sqrt(n - 1) / (n * math.sqrt(m * m - 1))
    if h_lo >= h_hi:
        raise EmptyInterval(f"no guaranteed H for n={n}, m={m}: ({h_lo}, {h_hi})")
    return h_lo, h_hi


def singular_limit_oracle(f, c: float, *, window: float = 1e3) -> float:
    """Integral of dt / sqrt(f(t) + c) from 0 to the first positive root t(c) of f + c.

    For f(0) = f'(0) = 0 and f''(0) = -2a < 0 this tends to pi / (2 sqrt(a))
    as c -> 0+.  Raises NoRoot when f + c stays positive up to ``window``.
    """
    if c <= 0.0:
        raise ValueError("c must be positive")
    g = lambda t: f(t) + c  # noqa: E731
    t = 1e-3 * math.sqrt(c)
    prev = 0.0
    while g(t) > 0.0:
        prev, t = t, t * 1.05
        if t > window:
            raise NoRoot(f"f + c has no positive root below {window}")
    tc = brentq(g, prev, t, xtol=1e-15 * t, rtol=8.9e-16)

    # t = tc - 2 tc sin^2(phi/2) maps the square-root singularity at tc to a
    # smooth integrand; within h of tc, f + c is replaced by its secant model
    # because the subtraction there has no significant digits left
    h = 1e-7 * tc
    slope = g(tc - h) / h

    def integrand(phi):
        below = 2.0 * tc * math.sin(0.5 * phi) ** 2
        val = slope * below if below < h else g(tc - below)
        if val <= 0.0:
            return 0.0
        return tc * math.sin(phi) / math.sqrt(val)

    # accuracy is bounded by the rounding of f + c itself; quad may notice
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-12, limit=500)
    return val


def k_sweep(n: int, H: float, c_values, space: SpaceKind = SpaceKind.SPHERICAL):
    return np.array([rotation_K(ProblemParams(space, n, H, float(c))) for c in c_values])
