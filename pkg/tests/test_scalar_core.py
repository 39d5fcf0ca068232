import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmcsurf.errors import BelowThreshold, HyperbolicUnbounded, NoPeriodicSolution
from cmcsurf.scalar_core import (
    ProblemParams,
    SpaceKind,
    c_for_root,
    critical_point,
    deflated_xi,
    q_energy,
    q_energy_prime,
    q_tilde,
    roots_general,
    roots_n2,
    spherical,
    xi,
)


def test_xi_examples():
    assert xi(1.0, spherical(2, 0.0, 2.0)) == 0.0
    assert xi(1.0, spherical(2, 0.0, 3.0)) == 1.0
    assert xi(1e-12, spherical(3, 0.4, 7.0)) == pytest.approx(-1.0, abs=1e-12)


def test_space_coefficients():
    for space, kappa in (("spherical", 1.0 + 0.25), ("hyperbolic", 0.25 - 1.0), ("euclidean", 0.25)):
        p = ProblemParams(space, 2, 0.5, 9.0)
        # xi(s) + kappa s^4 has no kappa dependence
        assert xi(2.0, p) + kappa * 16.0 == pytest.approx(9.0 * 4.0 - 1.0 - 2.0 * 0.5 * 4.0)


def test_q_is_rescaled_xi():
    rng = np.random.default_rng(1)
    v = rng.uniform(0.1, 3.0, 100)
    for p in (spherical(2, 0.3, 9.1), spherical(5, 1.1, 40.0), ProblemParams("hyperbolic", 3, 1.5, 20.0)):
        np.testing.assert_allclose(q_energy(v, p), v ** (2 - 2 * p.n) * xi(v, p), rtol=1e-12, atol=1e-12)


def test_q_tilde_scaling():
    rng = np.random.default_rng(2)
    v = rng.uniform(0.2, 3.0, 100)
    p = spherical(3, 0.7, 11.0)
    np.testing.assert_allclose(q_energy(v, p), p.C * q_tilde(v / math.sqrt(p.C), p), rtol=1e-12, atol=1e-11)


def test_critical_point_n2_h0():
    v0, c0, a = critical_point(2, 0.0)
    assert v0 == pytest.approx(1.0, abs=1e-15)
    assert c0 == pytest.approx(2.0, abs=1e-15)
    p = spherical(2, 0.0, 3.0)
    h = 1e-4
    fd = (q_energy(v0 + h, p) - 2 * q_energy(v0, p) + q_energy(v0 - h, p)) / h**2
    assert a == pytest.approx(-fd / 2.0, abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 10])
def test_critical_point_h0_radius(n):
    v0, _, _ = critical_point(n, 0.0)
    assert v0 == pytest.approx((n - 1) ** (1.0 / (2 * n)), rel=1e-14)


@pytest.mark.parametrize("n,H", [(2, 0.3), (3, 0.0), (4, 1.7), (6, 0.25)])
def test_critical_point_is_maximum(n, H):
    v0, c0, a = critical_point(n, H)
    p = spherical(n, H, 2 * c0)
    assert abs(q_energy_prime(v0, p)) < 1e-8 * p.C
    assert float(q_energy(v0, p)) == pytest.approx(p.C - c0, rel=1e-12)
    h = 1e-4 * v0
    fd2 = (q_energy(v0 + h, p) - 2 * q_energy(v0, p) + q_energy(v0 - h, p)) / h**2
    assert fd2 < 0
    assert a == pytest.approx(-fd2 / 2.0, rel=1e-6)


def test_critical_point_closed_form_a():
    # a written in terms of H and n only
    for n, H in ((2, 0.5), (3, 0.2), (5, 1.3)):
        root = math.sqrt(4 * (n - 1) + H * H * n * n)
        ref = 2 * n * (1 + H * H) * (4 * (n - 1) + H * H * n * n + H * (n - 2) * root) / (H * (n - 2) + root) ** 2
        assert critical_point(n, H)[2] == pytest.approx(ref, rel=1e-13)


def test_hyperbolic_needs_H_above_one():
    with pytest.raises(HyperbolicUnbounded):
        critical_point(2, 0.9, SpaceKind.HYPERBOLIC)
    v0, c0, _ = critical_point(2, 1.5, SpaceKind.HYPERBOLIC)
    assert v0 > 0 and c0 > 0


def test_roots_n2_examples():
    t1, t2 = roots_n2(0.0, 3.0)
    assert t1 == pytest.approx(math.sqrt((3 - math.sqrt(5)) / 2), rel=1e-15)
    assert t2 == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 2), rel=1e-15)
    assert roots_n2(0.0, 2.0) == (1.0, 1.0)
    p = spherical(2, 0.3, 9.129645968138256)
    t1, t2 = roots_n2(p.H, p.C)
    v0 = critical_point(2, 0.3)[0]
    assert t1 < v0 < t2
    assert abs(xi(t1, p)) < 1e-9 and abs(xi(t2, p)) < 1e-9
    with pytest.raises(BelowThreshold):
        roots_n2(0.0, 1.9)


def test_roots_general_examples():
    _, c0, _ = critical_point(3, 0.0)
    r = roots_general(spherical(3, 0.0, 1.5 * c0))
    assert r.t1 < 2 ** (1 / 6) < r.t2
    p = spherical(2, 0.1, 41.28796038772471)
    r = roots_general(p)
    t1, t2 = roots_n2(p.H, p.C)
    assert r.t1 == pytest.approx(t1, rel=1e-12)
    assert r.t2 == pytest.approx(t2, rel=1e-12)
    r = roots_general(spherical(2, 0.0, 2.0 * (1 + 1e-12)))
    assert abs(r.t1 - 1) < 1e-5 and abs(r.t2 - 1) < 1e-5


def test_threshold_guard():
    _, c0, _ = critical_point(3, 0.4)
    with pytest.raises(NoPeriodicSolution):
        roots_general(spherical(3, 0.4, c0))
    with pytest.raises(NoPeriodicSolution):
        roots_general(spherical(3, 0.4, 0.5 * c0))


def test_sign_of_q_around_roots():
    p = spherical(4, 0.6, 25.0)
    r = roots_general(p)
    inside = np.linspace(r.t1, r.t2, 202)[1:-1]
    assert np.all(q_energy(inside, p) > 0)
    for t, d in ((r.t1, -1), (r.t2, 1)):
        assert q_energy(t + d * 1e-6 * t, p) < 0


def test_gap_shrinks_towards_threshold():
    _, c0, _ = critical_point(3, 0.5)
    widths = []
    for d in (1e-1, 1e-2, 1e-4, 1e-6, 1e-8):
        r = roots_general(spherical(3, 0.5, c0 * (1 + d)))
        widths.append(r.t2 - r.t1)
    assert np.all(np.diff(widths) < 0)


def test_deflated_xi_matches_quotient():
    p = spherical(3, 0.4, 12.0)
    r = roots_general(p)
    s = np.linspace(r.t1, r.t2, 41)[5:-5]
    np.testing.assert_allclose(deflated_xi(s, p, r.t1, r.t2), xi(s, p) / ((s - r.t1) * (r.t2 - s)), rtol=1e-10)


def test_deflated_xi_large_C_positive():
    # the naive quotient loses every digit here
    p = spherical(2, 0.0, 1e12)
    r = roots_general(p)
    s = np.linspace(r.t1, r.t2, 101)
    assert np.all(deflated_xi(s, p, r.t1, r.t2) > 0)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 8),
    H=st.floats(0.0, 3.0),
    log_excess=st.floats(-8.0, 6.0),
)
def test_roots_property(n, H, log_excess):
    _, c0, _ = critical_point(n, H)
    p = spherical(n, H, c0 * (1.0 + 10.0**log_excess))
    r = roots_general(p)
    assert 0 < r.t1 < r.v0 < r.t2
    scale = max(1.0, p.C)
    assert abs(float(xi(r.t1, p))) <= 1e-12 * scale * max(1.0, r.t1 ** (2 * n - 2))
    assert abs(float(xi(r.t2, p))) <= 1e-12 * scale * max(1.0, r.t2 ** (2 * n))
    assert c_for_root(r.t1, n, H) == pytest.approx(p.C, rel=1e-10)
    assert c_for_root(r.t2, n, H) == pytest.approx(p.C, rel=1e-10)
