import math
import time

import pytest

from cmcsurf.embedding_solver import near_isoparametric_minimal
from cmcsurf.scalar_core import ProblemParams, spherical
from cmcsurf.verifier import CHECKS, negative_controls, verify_limits, verify_surface


def test_golden_surface_passes():
    rep = verify_surface(spherical(2, 0.3, 9.129645968138256), m=2, k=1)
    assert set(rep.checks) == set(CHECKS)
    assert rep.passed, rep.failed()


def test_report_shape(m3_h08):
    emb, sol = m3_h08
    d = verify_surface(emb, 200, sol=sol).as_dict()
    assert d["pass"] is True
    assert list(d["checks"]) == list(CHECKS)
    for c in d["checks"].values():
        assert c["max"] <= c["tol"] and c["mean"] <= c["max"]


def test_near_isoparametric_norm_check():
    eps = 0.2
    sol = near_isoparametric_minimal(3, eps)
    rep = verify_surface(sol)
    assert rep.passed, rep.failed()
    lo, hi = sol.A2_range
    assert 3 - eps <= lo <= hi <= 3 + eps


@pytest.mark.parametrize(
    "p",
    [spherical(4, 1.0, 12.0), ProblemParams("hyperbolic", 2, 1.5, 20.0),
     ProblemParams("hyperbolic", 3, 1.3, 10.0), ProblemParams("euclidean", 2, 1.0, 5.0),
     ProblemParams("euclidean", 4, 0.5, 6.0)],
    ids=lambda p: f"{p.space.value}-n{p.n}",
)
def test_other_spaces_pass(p):
    rep = verify_surface(p, 500)
    assert rep.passed, {k: v.max for k, v in rep.checks.items()}


def test_negative_controls(m2_h01):
    emb, sol = m2_h01
    out = negative_controls(emb, sol=sol)
    for name, res in out.items():
        assert res["caught"], (name, res)


def test_negative_controls_large_C(golden_solutions):
    out = negative_controls(golden_solutions[(3, 0.6)])
    assert all(res["caught"] for res in out.values()), out


def test_deterministic(m3_h08):
    emb, sol = m3_h08
    a = verify_surface(emb, 300, sol=sol).as_dict()
    b = verify_surface(emb, 300).as_dict()
    assert a == b


def test_runtime_per_surface(golden_solutions):
    emb = golden_solutions[(2, 0.57)]
    t = time.perf_counter()
    rep = verify_surface(emb)
    assert time.perf_counter() - t < 5.0
    assert rep.passed


@pytest.mark.parametrize("n,H", [(2, 0.5), (4, 0.2), (2, 0.0)])
def test_limits(n, H):
    rep = verify_limits(n, H)
    assert rep.passed, rep.as_dict()
    if H == 0.0:
        assert rep.extra["a1"] == pytest.approx(math.pi)
        assert rep.extra["a2n"] == pytest.approx(math.sqrt(2) * math.pi)
