"""Solve K(H, n, C) = 2 k pi / m for the energy constant C."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import Infeasible, NoCrossing, NotMinimal
from .profile_solver import build_profile
from .rotation_number import a1_limit, a2n_limit, rotation_K
from .scalar_core import ProblemParams, SpaceKind, c_for_root, critical_point, spherical

SCAN_POINTS = 512
# lowest scanned energy, relative to c0
SCAN_START = 1e-6
EXTEND_LIMIT = 1e16
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class EmbeddingSolution:
    params: ProblemParams
    m: int
    k: int
    K_achieved: float
    residual: float
    A2_range: tuple[float, float] | None = field(default=None, compare=False)

    @property
    def embedded(self) -> bool:
        return self.k == 1

    @property
    def C(self) -> float:
        return self.params.C

    def as_dict(self) -> dict:
        out = {
            "n": self.params.n,
            "H": self.params.H,
            "C": self.params.C,
            "m": self.m,
            "k": self.k,
            "K": self.K_achieved,
            "residual": self.residual,
            "embedded": self.embedded,
        }
        if self.A2_range is not None:
            out["A2_min"], out["A2_max"] = self.A2_range
        return out


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: str  # "Stable" or "Inconclusive"
    n: int
    A2_min: float
    A2_max: float
    curvature_ok: bool
    dimension_ok: bool

    @property
    def stable(self) -> bool:
        return self.verdict == "Stable"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "n": self.n,
            "A2_min": self.A2_min,
            "A2_max": self.A2_max,
            "sup_A2_bound": self.n + 0.125,
            "curvature_ok": self.curvature_ok,
            "dimension_ok": self.dimension_ok,
        }


def _polish(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=1e-12 * a, rtol=1e-14, maxiter=200)


def _crossings(f, grid: np.ndarray, values: np.ndarray):
    out = []
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            out.append(grid[i])
        elif values[i] * values[i + 1] < 0.0:
            out.append(_polish(f, grid[i], grid[i + 1]))
    return out


def _solution(p: ProblemParams, m: int, k: int, target: float) -> EmbeddingSolution:
    K = rotation_K(p)
    return EmbeddingSolution(p, m, k, K, abs(K - target))


def solve_C(n: int, H: float, m: int, k: int = 1, *, points: int = SCAN_POINTS):
    """Every C in the scan window with K(H, n, C) = 2 k pi / m, ascending."""
    if m < 2 or k < 1:
        raise ValueError("need m >= 2 and k >= 1")
    if math.gcd(k, m) != 1:
        raise ValueError(f"k={k} and m={m} are not coprime")
    target = 2.0 * k * math.pi / m
    a1, a2n = a1_limit(H), a2n_limit(n, H)
    if not a1 < target < a2n:
        raise Infeasible(f"2*{k}*pi/{m} = {target} lies outside (a1, a2n) = ({a1}, {a2n})")
    _, c0, _ = critical_point(n, H)
    f = lambda C: rotation_K(spherical(n, H, C)) - target  # noqa: E731

    lo, hi = c0 * (1.0 + SCAN_START), max(1e6, c0 * 1e6)
    grid = np.geomspace(lo, hi, points)
    values = np.array([f(c) for c in grid])
    roots = _crossings(f, grid, values)
    # K tends to a1 as C grows; when a1 sits just below the target the
    # crossing can lie far beyond the default window
    while not roots and target - a1 < 1e-3 and grid[-1] < EXTEND_LIMIT and values[-1] > 0.0:
        grid = np.geomspace(grid[-1], grid[-1] * 10.0, 9)
        values = np.array([values[-1]] + [f(c) for c in grid[1:]])
        roots = _crossings(f, grid, values)
    if not roots:
        raise NoCrossing(f"K - {target} never changes sign on [{lo}, {grid[-1]}]")
    sols = [_solution(spherical(n, H, c), m, k, target) for c in sorted(roots)]
    for s in sols:
        if s.residual > RESIDUAL_TOL:
            raise NoCrossing(f"polished root at C={s.C} has residual {s.residual}")
    return sols


def A2_from_radius(n: int, H: float, g):
    """||A||^2 = (n - 1) lambda^2 + mu^2 with lambda = H + g^-n, mu = H - (n - 1) g^-n."""
    g = np.asarray(g, dtype=float)
    lam = H + g ** (-n)
    mu = H - (n - 1) * g ** (-n)
    return (n - 1) * lam**2 + mu**2


def profile_A2_range(p: ProblemParams, samples: int = 1000):
    """Extremes of ||A||^2 over the profile, from samples plus both turning points."""
    sol = build_profile(p)
    u = np.linspace(0.0, sol.T, samples, endpoint=False)
    g = np.concatenate([sol.g(u), [sol.roots.t1, sol.roots.t2]])
    a2 = A2_from_radius(p.n, p.H, g)
    return float(a2.min()), float(a2.max())


def _smallest_fraction(x_lo: float, x_hi: float, max_den: int):
    """Fraction k/m in the open interval (x_lo, x_hi) with the least denominator."""
    for m in range(1, max_den + 1):
        k = math.floor(x_lo * m) + 1
        if k / m < x_hi:
            return k, m
    return None


def near_isoparametric_minimal(n: int, eps: float, *, max_den: int = 1000, points: int = 64):
    """Minimal (H = 0) example with ||A||^2 within eps of n and rational rotation number."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    H = 0.0
    _, c0, _ = critical_point(n, H)
    # ||A||^2 = n(n-1) g^-2n is monotone in g, so the band fixes extreme radii
    t_min = (n * (n - 1) / (n + eps)) ** (1.0 / (2 * n))
    t_max = (n * (n - 1) / (n - eps)) ** (1.0 / (2 * n))
    c_max = min(c_for_root(t_min, n, H), c_for_root(t_max, n, H))
    c_lo = c0 * (1.0 + SCAN_START)
    if c_max <= c_lo:
        raise Infeasible(f"eps={eps} leaves no room above the isoparametric threshold")
    grid = np.geomspace(c_lo, c_max, points)
    K = np.array([rotation_K(spherical(n, H, c)) for c in grid])
    x_lo, x_hi = K.min() / (2.0 * math.pi), K.max() / (2.0 * math.pi)
    frac = _smallest_fraction(x_lo, x_hi, max_den)
    if frac is None:
        raise Infeasible(f"no k/m with m <= {max_den} in ({x_lo}, {x_hi})")
    k, m = frac
    target = 2.0 * math.pi * k / m
    f = lambda C: rotation_K(spherical(n, H, C)) - target  # noqa: E731
    roots = _crossings(f, grid, K - target)
    if not roots:
        raise Infeasible("the rational target was not bracketed on the scan grid")
    p = spherical(n, H, roots[0])
    sol = _solution(p, m, k, target)
    return EmbeddingSolution(p, m, k, sol.K_achieved, sol.residual, profile_A2_range(p))


def cone_stability_check(sol: EmbeddingSolution, *, samples: int = 1000) -> StabilityVerdict:
    """Sufficient test for stability of the cone over a minimal example.

    Stable when sup ||A||^2 <= n + 1/8 and ((n - 1)/2)^2 >= n + 1/4, which
    gives lambda_1 + ((n - 1)/2)^2 >= 1/8.  Anything else is inconclusive.
    """
    p = sol.params
    if p.H != 0.0 or p.space is not SpaceKind.SPHERICAL:
        raise NotMinimal(f"cone stability needs a minimal spherical example, got H={p.H}")
    lo, hi = profile_A2_range(p, samples)
    n = p.n
    curvature_ok = hi <= n + 0.125
    dimension_ok = ((n - 1) / 2.0) ** 2 >= n + 0.25
    verdict = "Stable" if curvature_ok and dimension_ok else "Inconclusive"
    return StabilityVerdict(verdict, n, lo, hi, curvature_ok, dimension_ok)
