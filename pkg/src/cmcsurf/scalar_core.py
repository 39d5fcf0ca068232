"""Energy polynomials, their roots and the critical threshold c0.

A profile g of a rotational CMC hypersurface obeys the first integral

    (g')**2 + g**(2-2n) + kappa*g**2 + 2*H*g**(2-n) = C

with kappa = 1 + H**2 (sphere), H**2 - 1 (hyperbolic space) or H**2
(Euclidean space).  Writing (g')**2 = q(g) = g**(2-2n) * xi(g) turns the
existence question into locating the two positive roots t1 < t2 of the
polynomial xi.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BelowThreshold, HyperbolicUnbounded, NoPeriodicSolution

# roots are only isolated when C exceeds c0 by this relative margin
THRESHOLD_MARGIN = 1e-12


class SpaceKind(str, enum.Enum):
    SPHERICAL = "spherical"
    HYPERBOLIC = "hyperbolic"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class ProblemParams:
    """Ambient space, dimension n of the hypersurface, mean curvature H and energy C."""

    space: SpaceKind
    n: int
    H: float
    C: float

    def __post_init__(self):
        object.__setattr__(self, "space", SpaceKind(self.space))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.space is SpaceKind.SPHERICAL and self.H < 0:
            raise ValueError("spherical profiles require H >= 0")
        if not self.C > 0:
            raise ValueError("the energy constant C must be positive")

    @property
    def kappa(self) -> float:
        return space_kappa(self.space, self.H)


@dataclass(frozen=True)
class PolyRoots:
    t1: float
    t2: float
    v0: float
    c0: float
    a: float

    def as_dict(self) -> dict:
        return {"t1": self.t1, "t2": self.t2, "v0": self.v0, "c0": self.c0, "a": self.a}


def space_kappa(space: SpaceKind, H: float) -> float:
    space = SpaceKind(space)
    if space is SpaceKind.SPHERICAL:
        return 1.0 + H * H
    if space is SpaceKind.HYPERBOLIC:
        return H * H - 1.0
    return H * H


def spherical(n, H, C) -> ProblemParams:
    return ProblemParams(SpaceKind.SPHERICAL, n, H, C)


def xi_coefficients(p: ProblemParams) -> dict[int, float]:
    """Monomial coefficients {power: coefficient} of xi."""
    n = p.n
    coeffs: dict[int, float] = {}
    for power, c in ((2 * n, -p.kappa), (2 * n - 2, p.C), (n, -2.0 * p.H), (0, -1.0)):
        coeffs[power] = coeffs.get(power, 0.0) + c
    return coeffs


def xi(s, p: ProblemParams):
    s = np.asarray(s, dtype=float)
    n = p.n
    return p.C * s ** (2 * n - 2) - 1.0 - p.kappa * s ** (2 * n) - 2.0 * p.H * s**n


def q_energy(v, p: ProblemParams):
    """q(v) = C - v**(2-2n) - kappa*v**2 - 2H v**(2-n); (g')**2 = q(g)."""
    v = np.asarray(v, dtype=float)
    n = p.n
    return p.C - v ** (2 - 2 * n) - p.kappa * v**2 - 2.0 * p.H * v ** (2 - n)


def q_energy_prime(v, p: ProblemParams):
    v = np.asarray(v, dtype=float)
    n = p.n
    return (
        -2.0 * p.kappa * v
        - (2 - 2 * n) * v ** (1 - 2 * n)
        - 2.0 * p.H * (2 - n) * v ** (1 - n)
    )


def q_tilde(t, p: ProblemParams):
    """Rescaled energy in the variable r = v / sqrt(C); q(v) = C * q_tilde(v / sqrt(C))."""
    t = np.asarray(t, dtype=float)
    n, H, C = p.n, p.H, p.C
    return (
        1.0
        - p.kappa * t**2
        - C ** (-n) * t ** (2 - 2 * n)
        - 2.0 * H * C ** (-n / 2) * t ** (2 - n)
    )


def critical_point(n: int, H: float, space: SpaceKind = SpaceKind.SPHERICAL):
    """Return (v0, c0, a): the maximiser of q, the threshold energy and -q''(v0)/2.

    q(v0) = C - c0, so a periodic profile exists iff C > c0.
    """
    space = SpaceKind(space)
    if space is SpaceKind.HYPERBOLIC and H <= 1.0:
        raise HyperbolicUnbounded(f"hyperbolic profiles need H > 1, got H={H}")
    kappa = space_kappa(space, H)
    if kappa <= 0.0:
        raise NoPeriodicSolution(f"no positive critical point for H={H} in {space.value} space")
    # q'(v) = 0  <=>  kappa x**2 - H(n-2) x - (n-1) = 0 with x = v**n
    disc = math.sqrt(H * H * (n - 2) ** 2 + 4.0 * kappa * (n - 1))
    x = (H * (n - 2) + disc) / (2.0 * kappa)
    v0 = x ** (1.0 / n)
    c0 = v0 ** (2 - 2 * n) + kappa * v0 * v0 + 2.0 * H * v0 ** (2 - n)
    a = kappa + (n - 1) * (2 * n - 1) * v0 ** (-2 * n) + H * (n - 2) * (n - 1) * v0 ** (-n)
    return v0, c0, a


def c_for_root(t: float, n: int, H: float, space: SpaceKind = SpaceKind.SPHERICAL) -> float:
    """Energy C for which t is a root of xi."""
    kappa = space_kappa(space, H)
    return (1.0 + kappa * t ** (2 * n) + 2.0 * H * t**n) / t ** (2 * n - 2)


def roots_n2(H: float, C: float, space: SpaceKind = SpaceKind.SPHERICAL):
    """Closed-form roots t1 <= t2 of xi for surfaces (n = 2)."""
    kappa = space_kappa(space, H)
    disc = (C - 2.0 * H) ** 2 - 4.0 * kappa
    if disc < 0.0 or C - 2.0 * H <= 0.0:
        raise BelowThreshold(f"C={C} is below the n=2 threshold for H={H}")
    big = C - 2.0 * H + math.sqrt(disc)
    # t1**2 = (C - 2H - sqrt(disc)) / (2 kappa) rewritten without cancellation
    t1 = math.sqrt(2.0 / big)
    t2 = math.sqrt(big / (2.0 * kappa))
    return t1, t2


def _brent(f, a, b, scale):
    return brentq(f, a, b, xtol=4e-16 * scale, rtol=8.9e-16, maxiter=500)


def roots_general(p: ProblemParams) -> PolyRoots:
    """Isolate t1 in (0, v0) and t2 in (v0, inf) by Brent's method."""
    v0, c0, a = critical_point(p.n, p.H, p.space)
    if p.C < c0 * (1.0 + THRESHOLD_MARGIN):
        raise NoPeriodicSolution(
            f"C={p.C!r} does not exceed c0={c0!r} by the required relative margin"
        )
    n, H, C, kappa = p.n, p.H, p.C, p.kappa

    def f(s: float) -> float:
        sn = s**n
        return C * s ** (2 * n - 2) - 1.0 - kappa * sn * sn - 2.0 * H * sn
    if f(v0) <= 0.0:
        raise NoPeriodicSolution(f"q(v0) <= 0 for C={p.C!r}")
    lo = 1e-6 * v0
    while f(lo) >= 0.0:
        lo *= 1e-3
        if lo < 1e-300:
            raise NoPeriodicSolution("could not bracket the inner root")
    hi = 1.01 * math.sqrt(p.C / p.kappa)
    hi = max(hi, 1.01 * v0)
    while f(hi) >= 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise NoPeriodicSolution("could not bracket the outer root")
    t1 = _brent(f, lo, v0, v0)
    t2 = _brent(f, v0, hi, v0)
    return PolyRoots(t1=t1, t2=t2, v0=v0, c0=c0, a=a)


def deflated_xi(s, p: ProblemParams, t1: float, t2: float):
    """P(s) = xi(s) / ((s - t1) (t2 - s)), positive on [t1, t2].

    P is minus the second divided difference xi[t1, t2, s].  Expanding it in
    complete homogeneous sums h_j(t1, s) leaves coefficients that are tail
    sums of xi at t2; those are taken from the low-order end (valid because
    xi(t2) = 0), which avoids the cancellation between the C and kappa terms
    that ruins the naive quotient when C is large.
    """
    s = np.asarray(s, dtype=float)
    coeffs = xi_coefficients(p)
    top = 2 * p.n - 2
    h = np.ones_like(s)
    out = np.zeros_like(s)
    for j in range(top + 1):
        if j:
            h = h * s + t1**j
        a_j = sum(c * t2 ** (k - 2 - j) for k, c in coeffs.items() if k <= j + 1)
        out = out + a_j * h
    return out


def gap_at_t2(p: ProblemParams, t2: float) -> float:
    """C - t2**2 computed from the root relation instead of by subtraction."""
    n = p.n
    return (p.kappa - 1.0) * t2 * t2 + t2 ** (2 - 2 * n) + 2.0 * p.H * t2 ** (2 - n)
