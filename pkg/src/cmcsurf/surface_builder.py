"""Immersions, profile curves and meshes of the rotational hypersurfaces.

Spherical:   phi(y, u) = (r y, sqrt(1 - r^2) cos(theta), sqrt(1 - r^2) sin(theta))
Hyperbolic:  phi(y, u) = (r y, sqrt(1 + r^2) sinh(theta), sqrt(1 + r^2) cosh(theta))
Euclidean:   phi(y, u) = (r y, R)

with r = g / sqrt(C) and theta (or the height R) accumulated by the profile
solution.  Points are rows; y is a unit vector in R^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .embedding_solver import EmbeddingSolution
from .errors import BelowThreshold, NotClosed, PoleCollision
from .profile_solver import PROFILE_MARGIN, ProfileSolution, build_profile
from .quadrature import PiecewiseChebyshev
from .scalar_core import ProblemParams, SpaceKind, critical_point

CLOSURE_TOL = 1e-6
POLE_TOL = 1e-6


class ImmersionSample(NamedTuple):
    u: np.ndarray
    y: np.ndarray
    point: np.ndarray
    normal: np.ndarray


@dataclass
class SurfaceMesh:
    vertices: np.ndarray
    faces: np.ndarray
    profile: np.ndarray
    params: ProblemParams
    m: int
    k: int
    closure: float = 0.0
    projected: bool = False
    grid_shape: tuple[int, int] = field(default=(0, 0))


def _as_rows(y, n: int) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if y.shape[-1] != n:
        raise ValueError(f"y must have {n} components")
    return y


def profile_frame(sol: ProfileSolution, u):
    """r, r', lambda and theta along the profile (theta is R for Euclidean space)."""
    p = sol.params
    smp = sol.evaluate(u)
    sqrt_c = math.sqrt(p.C)
    return smp.g / sqrt_c, smp.gprime / sqrt_c, smp.lam, sol.theta(u)


def ambient_parts(space: SpaceKind, r, rp, lam, th):
    """Trailing ambient coordinates of phi and nu (everything past the y block)."""
    if space is SpaceKind.EUCLIDEAN:
        return r * lam, rp
    if space is SpaceKind.SPHERICAL:
        s = np.sqrt(1.0 - r * r)
        b2 = np.stack([np.cos(th), np.sin(th)], axis=-1)
        b3 = np.stack([-np.sin(th), np.cos(th)], axis=-1)
        nu_tail = (r * r * lam / s)[:, None] * b2 + (rp / s)[:, None] * b3
    else:
        s = np.sqrt(1.0 + r * r)
        b2 = np.stack([np.sinh(th), np.cosh(th)], axis=-1)
        b3 = np.stack([np.cosh(th), np.sinh(th)], axis=-1)
        nu_tail = -(r * r * lam / s)[:, None] * b2 + (rp / s)[:, None] * b3
    return s[:, None] * b2, nu_tail


def immerse(sol: ProfileSolution, y, u) -> ImmersionSample:
    """phi(y, u) and its Gauss map; y is (n,) or (N, n), u scalar or (N,)."""
    p = sol.params
    y = _as_rows(y, p.n)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if len(u) == 1 and len(y) > 1:
        u = np.repeat(u, len(y))
    if len(y) == 1 and len(u) > 1:
        y = np.repeat(y, len(u), axis=0)
    r, rp, lam, th = profile_frame(sol, u)
    if p.space is SpaceKind.EUCLIDEAN:
        point = np.column_stack([r[:, None] * y, th])
        normal = np.column_stack([-(r * lam)[:, None] * y, rp])
    else:
        tail, nu_tail = ambient_parts(p.space, r, rp, lam, th)
        point = np.hstack([r[:, None] * y, tail])
        normal = np.hstack([-(r * lam)[:, None] * y, nu_tail])
    return ImmersionSample(u, y, point, normal)


def ambient_inner(space: SpaceKind, a, b):
    """Inner product of the ambient space: Minkowski (last sign -) for hyperbolic."""
    prod = a * b
    if SpaceKind(space) is SpaceKind.HYPERBOLIC:
        return prod[..., :-1].sum(axis=-1) - prod[..., -1]
    return prod.sum(axis=-1)


def closure_residual(sol: ProfileSolution, m: int, k: int) -> float:
    return abs(m * sol.K - 2.0 * math.pi * k)


def profile_curve(sol: ProfileSolution, m: int, k: int = 1, samples: int = 256, *,
                  check: bool = True):
    """Sampled profile curve over u in [0, m T]; returns (u, points) with points (N, 2).

    ``samples`` is the number of points per period of g; the last point
    repeats the first when the curve closes.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples per period")
    if check and closure_residual(sol, m, k) > CLOSURE_TOL:
        raise NotClosed(f"m K - 2 k pi = {m * sol.K - 2 * math.pi * k:.3e} for m={m}, k={k}")
    u = np.linspace(0.0, m * sol.T, m * samples + 1)
    r, _, _, th = profile_frame(sol, u)
    p = sol.params
    if p.space is SpaceKind.SPHERICAL:
        s = np.sqrt(1.0 - r * r)
        pts = np.column_stack([s * np.cos(th), s * np.sin(th)])
    elif p.space is SpaceKind.HYPERBOLIC:
        s = np.sqrt(1.0 + r * r)
        pts = np.column_stack([s * np.sinh(th), s * np.cosh(th)])
    else:
        pts = np.column_stack([r, th])
    return u, pts


def isoparametric_radius(n: int, H: float) -> float:
    """Radius sqrt(1 - v0^2 / c0) of the circle the profile collapses to as C -> c0."""
    v0, c0, _ = critical_point(n, H)
    return math.sqrt(1.0 - v0 * v0 / c0)


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def self_intersections(points: np.ndarray, closed: bool = True) -> int:
    """Number of proper crossings between non-adjacent segments of a polyline.

    Sweep over segments sorted by their left end; only pairs whose x-ranges
    overlap are tested.
    """
    pts = np.asarray(points, dtype=float)
    if closed and np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    a = pts
    b = np.roll(pts, -1, axis=0) if closed else pts[1:]
    if not closed:
        a = pts[:-1]
    nseg = len(a)
    xmin = np.minimum(a[:, 0], b[:, 0])
    xmax = np.maximum(a[:, 0], b[:, 0])
    order = np.argsort(xmin)
    count = 0
    active: list[int] = []
    for i in order:
        active = [j for j in active if xmax[j] >= xmin[i]]
        if active:
            js = np.array(active)
            adjacent = (np.abs(js - i) == 1) | (closed & (np.abs(js - i) == nseg - 1))
            js = js[~adjacent]
            if len(js):
                d1 = _orient(a[i], b[i], a[js])
                d2 = _orient(a[i], b[i], b[js])
                d3 = _orient(a[js], b[js], a[i])
                d4 = _orient(a[js], b[js], b[i])
                count += int(np.sum((d1 * d2 < 0) & (d3 * d4 < 0)))
        active.append(i)
    return count


def rotational_symmetry_error(points: np.ndarray, m: int) -> float:
    """Symmetric Hausdorff distance between a point set and its rotation by 2 pi / m."""
    pts = np.asarray(points, dtype=float)
    c, s = math.cos(2 * math.pi / m), math.sin(2 * math.pi / m)
    rot = pts @ np.array([[c, s], [-s, c]])
    tree, tree_rot = cKDTree(pts), cKDTree(rot)
    return float(max(tree.query(rot)[0].max(), tree_rot.query(pts)[0].max()))


def count_local_minima(values: np.ndarray) -> int:
    """Strict local minima of a periodic sequence."""
    v = np.asarray(values, dtype=float)
    return int(np.sum((v < np.roll(v, 1)) & (v < np.roll(v, -1))))


def stereographic(x: np.ndarray, pole_angle: float = 0.0) -> np.ndarray:
    """Project S^3 -> R^3 from (0, 0, 0, 1), after rotating the x3-x4 plane by pole_angle."""
    x = np.asarray(x, dtype=float)
    if pole_angle:
        c, s = math.cos(pole_angle), math.sin(pole_angle)
        x = x.copy()
        x[:, 2], x[:, 3] = c * x[:, 2] - s * x[:, 3], s * x[:, 2] + c * x[:, 3]
    pole = np.array([0.0, 0.0, 0.0, 1.0])
    dist = np.linalg.norm(x - pole, axis=1)
    if np.any(dist < POLE_TOL):
        raise PoleCollision(f"{int(np.sum(dist < POLE_TOL))} vertices lie on the projection pole")
    return x[:, :3] / (1.0 - x[:, 3])[:, None]


def build_mesh_n2(embedding: EmbeddingSolution, res_u: int | None = None, res_v: int = 128,
                  project: bool = True, pole_angle: float = 0.0,
                  sol: ProfileSolution | None = None) -> SurfaceMesh:
    """Quad mesh of the torus-type surface over [0, 2 pi) x [0, m T)."""
    p = embedding.params
    if p.n != 2 or p.space is not SpaceKind.SPHERICAL:
        raise ValueError("meshes are only built for n = 2 in the 3-sphere")
    m, k = embedding.m, embedding.k
    sol = sol or build_profile(p)
    closure = closure_residual(sol, m, k)
    if closure > CLOSURE_TOL:
        raise NotClosed(f"closure residual {closure:.3e}")
    res_u = res_u or 256 * m
    u = np.linspace(0.0, m * sol.T, res_u, endpoint=False)
    v = np.linspace(0.0, 2.0 * math.pi, res_v, endpoint=False)
    r, _, _, th = profile_frame(sol, u)
    s = np.sqrt(1.0 - r * r)
    # vertex index = i * res_v + j for u-index i and v-index j
    verts = np.empty((res_u, res_v, 4))
    verts[..., 0] = r[:, None] * np.cos(v)[None, :]
    verts[..., 1] = r[:, None] * np.sin(v)[None, :]
    verts[..., 2] = (s * np.cos(th))[:, None]
    verts[..., 3] = (s * np.sin(th))[:, None]
    verts = verts.reshape(-1, 4)
    i, j = np.meshgrid(np.arange(res_u), np.arange(res_v), indexing="ij")
    i1, j1 = (i + 1) % res_u, (j + 1) % res_v
    faces = np.stack(
        [i * res_v + j, i1 * res_v + j, i1 * res_v + j1, i * res_v + j1], axis=-1
    ).reshape(-1, 4)
    if project:
        verts = stereographic(verts, pole_angle)
    prof = np.column_stack([s * np.cos(th), s * np.sin(th)])
    return SurfaceMesh(verts, faces, prof, p, m, k, closure, project, (res_u, res_v))


def face_areas(mesh: SurfaceMesh) -> np.ndarray:
    v = mesh.vertices
    f = mesh.faces
    a = np.linalg.norm(np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]]), axis=1)
    b = np.linalg.norm(np.cross(v[f[:, 2]] - v[f[:, 0]], v[f[:, 3]] - v[f[:, 0]]), axis=1)
    return 0.5 * (a + b)


# --- Euclidean n = 2 closed form ---------------------------------------------

def _delaunay_check(H: float, C: float):
    if H == 0.0:
        raise ValueError("the closed form needs H != 0")
    if not C > 0.0 or (H > 0.0 and C <= 4.0 * H * (1.0 + PROFILE_MARGIN)):
        raise BelowThreshold(f"C={C} must exceed 4H={4.0 * H} (and be positive)")


def delaunay_g(H: float, C: float, u):
    """g(u) = sqrt(C) r(u) with r from the closed form; g(0) is the larger radius."""
    _delaunay_check(H, C)
    u = np.asarray(u, dtype=float)
    w = math.sqrt(C * (C - 4.0 * H))
    return np.sqrt(C - 2.0 * H + w * np.cos(2.0 * H * u)) / (math.sqrt(2.0) * abs(H))


def delaunay_gprime(H: float, C: float, u):
    w = math.sqrt(C * (C - 4.0 * H))
    g = delaunay_g(H, C, u)
    return -w * H * np.sin(2.0 * H * np.asarray(u, float)) / (2.0 * H * H * g)


def delaunay_ode_residual(H: float, C: float, u):
    """(g')^2 + g^-2 + H^2 g^2 + 2H - C, scaled by C."""
    g = delaunay_g(H, C, u)
    gp = delaunay_gprime(H, C, u)
    return (gp * gp + g**-2 + H * H * g * g + 2.0 * H - C) / C


def delaunay_n2(H: float, C: float, samples: int = 512, periods: float = 1.0):
    """Euclidean profile (r, R) for n = 2 over ``periods`` periods of r.

    R' = r lambda = sign(H) (C + w cos 2Hu) / (sqrt(2C) sqrt(C - 2H + w cos 2Hu)),
    w = sqrt(C (C - 4H)), integrated by piecewise Chebyshev quadrature.
    Returns (u, r, R).
    """
    _delaunay_check(H, C)
    w = math.sqrt(C * (C - 4.0 * H))
    sgn = math.copysign(1.0, H)

    def rate(u):
        c = np.cos(2.0 * H * u)
        return np.array([sgn * (C + w * c) / (math.sqrt(2.0 * C) * np.sqrt(C - 2.0 * H + w * c))])

    period = math.pi / abs(H)
    span = periods * period
    table = PiecewiseChebyshev.adapt(rate, 0.0, span, 1, rtol=1e-14)
    u = np.linspace(0.0, span, samples)
    r = delaunay_g(H, C, u) / math.sqrt(C)
    R = table.cumulative(u, 0)
    return u, r, R


# --- export -------------------------------------------------------------------

def write_obj(mesh: SurfaceMesh, path) -> Path:
    path = Path(path)
    verts = mesh.vertices if mesh.vertices.shape[1] == 3 else mesh.vertices[:, :3]
    lines = [f"# cmcsurf n=2 H={mesh.params.H:.15g} C={mesh.params.C:.15g} m={mesh.m} k={mesh.k}"]
    lines += ["v " + " ".join(f"{c:.9g}" for c in row) for row in verts]
    lines += ["f " + " ".join(str(i + 1) for i in face) for face in mesh.faces]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_profile_csv(u, points, path) -> Path:
    path = Path(path)
    rows = ["u,x_a,x_b"] + [f"{a:.15g},{b:.15g},{c:.15g}" for a, b, c in zip(u, points[:, 0], points[:, 1])]
    path.write_text("\n".join(rows) + "\n")
    return path


def write_svg(curves, path, *, unit_circle: bool = True, box: float = 1.1) -> Path:
    """Static SVG of one or more planar curves; y is flipped to point up."""
    path = Path(path)
    size = 2.0 * box
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-box} {-box} {size} {size}" '
        'width="600" height="600">'
    ]
    if unit_circle:
        out.append('<circle cx="0" cy="0" r="1" fill="none" stroke="#999" stroke-width="0.004"/>')
    for pts in curves:
        d = " ".join(f"{x:.6f},{-y:.6f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="0.006" points="{d}"/>')
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path
