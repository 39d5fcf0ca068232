"""Periodic profile g(u) and the angle/height accumulator theta(u).

The profile is built from the inverse of G(s) = int_{t1}^{s} dt / sqrt(q(t)).
Everything is parametrised by an auxiliary angle psi through

    s(psi) = t1 + (t2 - t1) * sin(psi / 2)**2,

which absorbs both square-root endpoint singularities: du/dpsi and
dtheta/dpsi are smooth, psi in [0, pi] covers the rising half period and
the falling half follows from g(T - u) = g(u).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BelowThreshold, NoPeriodicSolution
from .quadrature import PiecewiseChebyshev
from .scalar_core import (
    ProblemParams,
    PolyRoots,
    SpaceKind,
    deflated_xi,
    gap_at_t2,
    roots_general,
    roots_n2,
)

PROFILE_MARGIN = 1e-10


class ProfileSample(NamedTuple):
    g: np.ndarray
    gprime: np.ndarray
    r: np.ndarray
    lam: np.ndarray
    mu: np.ndarray


def _integrands(p: ProblemParams, roots: PolyRoots, side: str, which=("u", "theta")):
    """du/dx and dtheta/dx on x in [0, pi/2].

    side "low": s = t1 + D sin^2(x/2); side "high": s = t2 - D sin^2(x/2).
    Anchoring each half at its own root keeps s - t1 and t2 - s at full
    relative precision where the integrands are sharply peaked.
    """
    t1, t2 = roots.t1, roots.t2
    delta = t2 - t1
    n, H, C = p.n, p.H, p.C
    sqrt_c = math.sqrt(C)
    gap = gap_at_t2(p, t2) if p.space is SpaceKind.SPHERICAL else 0.0

    def f(x):
        if side == "low":
            s = t1 + delta * np.sin(0.5 * x) ** 2
            below_t2 = delta * np.cos(0.5 * x) ** 2
        else:
            below_t2 = delta * np.sin(0.5 * x) ** 2
            s = t2 - below_t2
        root_p = np.sqrt(deflated_xi(s, p, t1, t2))
        out = []
        if "u" in which:
            out.append(s ** (n - 1) / root_p)
        if "theta" in which:
            num = H * s**n + 1.0
            if p.space is SpaceKind.SPHERICAL:
                # C - s^2 = (C - t2^2) + (t2 - s)(t2 + s)
                out.append(sqrt_c * num / ((gap + below_t2 * (t2 + s)) * root_p))
            elif p.space is SpaceKind.HYPERBOLIC:
                out.append(sqrt_c * num / ((C + s * s) * root_p))
            else:
                out.append(num / (sqrt_c * root_p))
        return np.array(out)

    return f


def _tables(p: ProblemParams, roots: PolyRoots, rtol: float, which=("u", "theta")):
    return tuple(
        PiecewiseChebyshev.adapt(
            _integrands(p, roots, side, which), 0.0, 0.5 * math.pi, len(which),
            rtol=rtol, init_panels=4,
        )
        for side in ("low", "high")
    )


def check_profile_threshold(p: ProblemParams, roots: PolyRoots):
    if p.C < roots.c0 * (1.0 + PROFILE_MARGIN):
        raise NoPeriodicSolution(
            f"C={p.C!r} is too close to the threshold c0={roots.c0!r} to build a profile"
        )


@dataclass(frozen=True)
class ProfileSolution:
    """A periodic profile with its accumulated angle (or height in R^{n+1}).

    ``K`` is theta(T): the angular advance per period in the sphere and in
    hyperbolic space, the height gained per period in Euclidean space.
    ``low`` and ``high`` tabulate u and theta over the rising half period,
    anchored at t1 and t2 respectively.
    """

    params: ProblemParams
    roots: PolyRoots
    T: float
    K: float
    low: PiecewiseChebyshev
    high: PiecewiseChebyshev

    def _locate(self, u):
        """Split u into (period index, falling flag, upper-half flag, angle)."""
        u = np.asarray(u, dtype=float)
        T = self.T
        j = np.floor(u / T)
        w = u - j * T
        falling = w > 0.5 * T
        w = np.where(falling, T - w, w)
        upper = w > self.low.total(0)
        x = np.empty_like(w)
        if np.any(~upper):
            x[~upper] = self.low.invert(w[~upper], 0)
        if np.any(upper):
            x[upper] = self.high.invert(0.5 * T - w[upper], 0)
        return j, falling, upper, np.clip(x, 0.0, 0.5 * math.pi)

    def _s(self, upper, x):
        t1, t2 = self.roots.t1, self.roots.t2
        d = (t2 - t1) * np.sin(0.5 * x) ** 2
        return np.where(upper, t2 - d, t1 + d)

    def g(self, u):
        _, _, upper, x = self._locate(u)
        return self._s(upper, x)

    def evaluate(self, u) -> ProfileSample:
        p = self.params
        _, falling, upper, x = self._locate(u)
        s = self._s(upper, x)
        t1, t2 = self.roots.t1, self.roots.t2
        root_p = np.sqrt(deflated_xi(s, p, t1, t2))
        gp = 0.5 * (t2 - t1) * np.sin(x) * root_p / s ** (p.n - 1)
        gp = np.where(falling, -gp, gp)
        r = s / math.sqrt(p.C)
        lam = p.H + s ** (-p.n)
        mu = p.H - (p.n - 1) * s ** (-p.n)
        return ProfileSample(s, gp, r, lam, mu)

    def theta(self, u):
        j, falling, upper, x = self._locate(u)
        half_k = np.where(
            upper,
            0.5 * self.K - self.high.cumulative(x, 1),
            self.low.cumulative(x, 1),
        )
        return j * self.K + np.where(falling, self.K - half_k, half_k)

    def one_minus_r2(self, u):
        """1 - r^2 = (C - g^2) / C, accurate near the outer turning point."""
        p = self.params
        _, _, upper, x = self._locate(u)
        s = self._s(upper, x)
        t1, t2 = self.roots.t1, self.roots.t2
        d = (t2 - t1) * np.sin(0.5 * x) ** 2
        below_t2 = np.where(upper, d, (t2 - t1) - d)
        # C - s^2 = (C - t2^2) + (t2 - s)(t2 + s)
        return (gap_at_t2(p, t2) + below_t2 * (t2 + s)) / p.C

    def theta_rate(self, u):
        """d theta / du, i.e. r lambda / (1 - r^2) for the sphere."""
        p = self.params
        smp = self.evaluate(u)
        rl = smp.r * smp.lam
        if p.space is SpaceKind.SPHERICAL:
            return rl / self.one_minus_r2(u)
        if p.space is SpaceKind.HYPERBOLIC:
            return rl / (1.0 + smp.r**2)
        return rl


def build_profile(p: ProblemParams, *, rtol: float = 1e-13) -> ProfileSolution:
    """Construct the T-periodic profile with g(0) = t1 (minimum radius)."""
    roots = roots_general(p)
    check_profile_threshold(p, roots)
    low, high = _tables(p, roots, rtol)
    T = 2.0 * (low.total(0) + high.total(0))
    K = 2.0 * (low.total(1) + high.total(1))
    return ProfileSolution(p, roots, T, K, low, high)


def evaluate(sol: ProfileSolution, u) -> ProfileSample:
    """Return (g, g', r, lambda, mu) at u; g is extended periodically."""
    return sol.evaluate(u)


def theta(sol: ProfileSolution, u):
    return sol.theta(u)


def period_integrals(p: ProblemParams, *, rtol: float = 1e-13, which=("u", "theta")):
    """Full-period integrals (T and/or K) without building a profile."""
    roots = roots_general(p)
    low, high = _tables(p, roots, rtol, which)
    return roots, [2.0 * (low.total(k) + high.total(k)) for k in range(len(which))]


def profile_closed_form_n2(H: float, C: float, u):
    """Closed-form spherical profile for n = 2, phase-shifted so g(0) = t1."""
    disc = C * C - 4.0 * H * C - 4.0
    if disc < 0.0:
        raise BelowThreshold(f"C={C} is below 2(H + sqrt(1 + H^2)) for H={H}")
    kappa = 1.0 + H * H
    # the published form uses sin(2 sqrt(kappa) t); t = u - T/4 puts the minimum at u = 0
    u = np.asarray(u, dtype=float)
    return np.sqrt(((C - 2.0 * H) - math.sqrt(disc) * np.cos(2.0 * math.sqrt(kappa) * u)) / (2.0 * kappa))


def closed_form_period_n2(H: float) -> float:
    return math.pi / math.sqrt(1.0 + H * H)


__all__ = [
    "ProfileSample",
    "ProfileSolution",
    "build_profile",
    "evaluate",
    "theta",
    "period_integrals",
    "profile_closed_form_n2",
    "closed_form_period_n2",
    "roots_n2",
]
