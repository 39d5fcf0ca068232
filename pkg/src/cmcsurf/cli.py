"""Command-line entry point: ``cmcsurf <subcommand> [flags]``.

JSON and CSV numbers carry 15 significant digits.  Exit codes: 0 success,
1 numerical failure (JSON error object on stderr), 2 usage error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import embedding_solver as es
from . import rotation_number as rn
from . import surface_builder as sb
from . import verifier as vf
from .errors import CMCError
from .profile_solver import build_profile
from .scalar_core import ProblemParams, SpaceKind, roots_general

# published (m, H, C) triples and the Euclidean example
FIGURES = {
    "m2_h0.1": {"m": 2, "H": 0.1, "C": 41.28796038772471},
    "m2_h0.3": {"m": 2, "H": 0.3, "C": 9.129645968138256},
    "m2_h0.57": {"m": 2, "H": 0.57, "C": 3.5313222039296357},
    "m3_h0.5774": {"m": 3, "H": 0.5774, "C": 346879.6632142387},
    "m3_h0.6": {"m": 3, "H": 0.6, "C": 365.3705636110441},
    "m3_h0.8": {"m": 3, "H": 0.8, "C": 22.320379289179478},
    "m3_h1.0": {"m": 3, "H": 1.0, "C": 9.908469426660892},
    "m3_h1.2": {"m": 3, "H": 1.2, "C": 6.084010495710457},
    "m3_h1.237": {"m": 3, "H": 1.237, "C": 5.6615177218839605},
    "delaunay_hm1_c2": {"H": -1.0, "C": 2.0, "space": "euclidean"},
}
GOLDEN_RTOL = 1e-6


class UsageError(Exception):
    pass


def _round(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return float(f"{obj:.15g}")
        return str(obj)
    if isinstance(obj, (np.floating,)):
        return _round(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=False) + "\n"


def csv_text(header, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(f"{float(v):.15g}" for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(a) -> ProblemParams:
    return ProblemParams(SpaceKind(getattr(a, "space", "spherical")), a.n, a.H, a.C)


# --- subcommands ----------------------------------------------------------------

def cmd_roots(a):
    _emit(dumps(roots_general(_params(a)).as_dict()), a.out)
    return 0


def cmd_profile(a):
    sol = build_profile(_params(a))
    u = np.linspace(0.0, a.periods * sol.T, int(a.samples * a.periods), endpoint=False)
    smp = sol.evaluate(u)
    cols = [u, smp.g, smp.gprime, smp.r, smp.lam, smp.mu, sol.theta(u)]
    _emit(csv_text(["u", "g", "gprime", "r", "lambda", "mu", "theta"], cols), a.out)
    return 0


def cmd_rotation(a):
    K = rn.rotation_K(_params(a))
    _emit(dumps({"K": K, "K_over_pi": K / math.pi}), a.out)
    return 0


def cmd_limits(a):
    b = rn.k_limits(a.n, a.H)
    out = {"a1": b.a1, "a2n": b.a2n}
    if a.n == 2:
        out["b2"] = b.b2
    _emit(dumps(out), a.out)
    return 0


def cmd_bounds(a):
    lo, hi = rn.admissible_H_interval(a.n, a.m)
    _emit(dumps({"H_lo": lo, "H_hi": hi}), a.out)
    return 0


def cmd_sweep(a):
    if not 0 < a.c_min < a.c_max or a.points < 2:
        raise UsageError("need 0 < c-min < c-max and at least 2 points")
    cs = np.geomspace(a.c_min, a.c_max, a.points)
    ks = rn.k_sweep(a.n, a.H, cs)
    _emit(csv_text(["C", "K"], [cs, ks]), a.out)
    return 0


def cmd_solve(a):
    sols = es.solve_C(a.n, a.H, a.m, a.k)
    _emit(dumps([s.as_dict() for s in sols]), a.out)
    return 0


def _embedding(n, H, m, k, C=None) -> es.EmbeddingSolution:
    if C is None:
        return es.solve_C(n, H, m, k)[0]
    p = ProblemParams(SpaceKind.SPHERICAL, n, H, C)
    K = rn.rotation_K(p)
    return es.EmbeddingSolution(p, m, k, K, abs(K - 2 * math.pi * k / m))


def cmd_mesh(a):
    emb = _embedding(2, a.H, a.m, a.k, a.C)
    mesh = sb.build_mesh_n2(emb, a.res_u, a.res_v, project=not a.no_project, pole_angle=a.pole_angle)
    if mesh.vertices.shape[1] != 3:
        raise UsageError("unprojected meshes live in R^4; OBJ export needs --pole-angle projection")
    if not a.out:
        raise UsageError("mesh needs --out FILE.obj")
    sb.write_obj(mesh, a.out)
    info = {"C": emb.C, "m": emb.m, "k": emb.k, "vertices": len(mesh.vertices),
            "faces": len(mesh.faces), "closure": mesh.closure, "path": a.out}
    sys.stdout.write(dumps(info))
    return 0


def cmd_delaunay(a):
    u, r, R = sb.delaunay_n2(a.H, a.C, a.samples, a.periods)
    _emit(csv_text(["u", "r", "R"], [u, r, R]), a.out)
    return 0


def cmd_hyperbolic(a):
    p = ProblemParams(SpaceKind.HYPERBOLIC, a.n, a.H, a.C)
    sol = build_profile(p)
    u, pts = sb.profile_curve(sol, 1, 1, a.samples, check=False)
    _emit(csv_text(["u", "x_a", "x_b"], [u, pts[:, 0], pts[:, 1]]), a.out)
    return 0


def cmd_verify(a):
    p = _params(a)
    if p.space is SpaceKind.SPHERICAL and a.m:
        target = _embedding(p.n, p.H, a.m, a.k, p.C)
    else:
        target = p
    rep = vf.verify_surface(target, a.samples)
    _emit(dumps(rep.as_dict()), a.out)
    return 0 if rep.passed else 1


def cmd_stability(a):
    sol = es.near_isoparametric_minimal(a.n, a.eps)
    verdict = es.cone_stability_check(sol)
    _emit(dumps({"solution": sol.as_dict(), **verdict.as_dict()}), a.out)
    return 0


def reproduce_figure(fig: str, outdir: Path, mesh: bool = False) -> dict:
    entry = FIGURES[fig]
    d = outdir / fig
    d.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"figure": fig, **entry}
    if entry.get("space") == "euclidean":
        u, r, R = sb.delaunay_n2(entry["H"], entry["C"], 1024, 2.0)
        (d / "profile.csv").write_text(csv_text(["u", "r", "R"], [u, r, R]))
        ode = float(np.abs(sb.delaunay_ode_residual(entry["H"], entry["C"], u)).max())
        manifest.update({"ode_residual": ode, "R_monotone": bool(np.all(np.diff(R) > 0))})
    else:
        m, H, C_pub = entry["m"], entry["H"], entry["C"]
        sols = es.solve_C(2, H, m)
        best = min(sols, key=lambda s: abs(s.C / C_pub - 1.0))
        K_pub = rn.rotation_K(ProblemParams(SpaceKind.SPHERICAL, 2, H, C_pub))
        sol = build_profile(best.params)
        u, pts = sb.profile_curve(sol, m, 1, 512)
        (d / "profile.csv").write_text(csv_text(["u", "x_a", "x_b"], [u, pts[:, 0], pts[:, 1]]))
        sb.write_svg([pts], d / "profile.svg")
        rep = vf.verify_surface(best, 1000, sol=sol)
        manifest.update({
            "C_solved": best.C,
            "C_rel_diff": best.C / C_pub - 1.0,
            "golden_C_match": abs(best.C / C_pub - 1.0) <= GOLDEN_RTOL,
            "K_at_published_C": K_pub,
            "K_published_residual": abs(K_pub - 2 * math.pi / m),
            "closure_residual": float(np.linalg.norm(pts[0] - pts[-1])),
            "symmetry_error": sb.rotational_symmetry_error(pts[:-1], m),
            "self_intersections": sb.self_intersections(pts),
            "verify_pass": rep.passed,
            "checks": {k: c.max for k, c in rep.checks.items()},
        })
        if mesh:
            m_obj = sb.build_mesh_n2(best, sol=sol)
            sb.write_obj(m_obj, d / "mesh.obj")
            manifest["mesh_vertices"] = len(m_obj.vertices)
    (d / "manifest.json").write_text(dumps(manifest))
    return manifest


def cmd_reproduce(a):
    if bool(a.figure) == bool(a.all):
        raise UsageError("give exactly one of --figure ID or --all")
    figs = sorted(FIGURES) if a.all else [a.figure]
    for f in figs:
        if f not in FIGURES:
            raise UsageError(f"unknown figure {f!r}; known: {', '.join(sorted(FIGURES))}")
    outdir = Path(a.out or "figures")
    results = [reproduce_figure(f, outdir, a.mesh) for f in figs]
    sys.stdout.write(dumps(results if a.all else results[0]))
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmcsurf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="output file (default stdout)")
        return sp

    def nhc(sp, C=True, space=True):
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--H", type=float, required=True)
        if C:
            sp.add_argument("--C", type=float, required=True)
        if space:
            sp.add_argument("--space", choices=[s.value for s in SpaceKind], default="spherical")

    nhc(add("roots", cmd_roots, "roots of the energy polynomial"))
    sp = add("profile", cmd_profile, "sampled profile g(u) as CSV")
    nhc(sp)
    sp.add_argument("--samples", type=int, default=2000, help="samples per period")
    sp.add_argument("--periods", type=float, default=1.0)
    nhc(add("rotation", cmd_rotation, "rotation number K"), space=False)
    nhc(add("limits", cmd_limits, "limits a1 and a2n of K"), C=False, space=False)
    sp = add("bounds", cmd_bounds, "admissible H interval for m")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--m", type=int, required=True)
    sp = add("sweep", cmd_sweep, "K over a geometric range of C as CSV")
    nhc(sp, C=False, space=False)
    sp.add_argument("--c-min", type=float, required=True)
    sp.add_argument("--c-max", type=float, required=True)
    sp.add_argument("--points", type=int, default=64)
    sp = add("solve", cmd_solve, "solve K = 2 k pi / m for C")
    nhc(sp, C=False, space=False)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp = add("mesh", cmd_mesh, "OBJ mesh of an n = 2 example")
    sp.add_argument("--H", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--C", type=float, default=None, help="skip solving and use this C")
    sp.add_argument("--res-u", type=int, default=None)
    sp.add_argument("--res-v", type=int, default=128)
    sp.add_argument("--no-project", action="store_true")
    sp.add_argument("--pole-angle", type=float, default=0.0)
    sp = add("delaunay", cmd_delaunay, "closed-form Euclidean n = 2 profile as CSV")
    sp.add_argument("--H", type=float, required=True)
    sp.add_argument("--C", type=float, required=True)
    sp.add_argument("--samples", type=int, default=512)
    sp.add_argument("--periods", type=float, default=1.0)
    sp = add("hyperbolic", cmd_hyperbolic, "hyperbolic profile curve as CSV")
    nhc(sp, space=False)
    sp.add_argument("--samples", type=int, default=512)
    sp = add("verify", cmd_verify, "residual checks (a)-(i) as JSON")
    nhc(sp)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--samples", type=int, default=1000)
    sp = add("stability", cmd_stability, "near-isoparametric minimal example and cone test")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp = add("reproduce", cmd_reproduce, "regenerate figure data into --out DIR")
    sp.add_argument("--figure", choices=sorted(FIGURES))
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--mesh", action="store_true", help="also write OBJ meshes")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        ap.print_usage(sys.stderr)
        sys.stderr.write(dumps({"error": "usage", "message": str(exc)}))
        return 2
    except CMCError as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
