import math

import numpy as np
import pytest
from scipy.integrate import quad

from cmcsurf.errors import BelowThreshold, EmptyInterval, NoRoot
from cmcsurf.rotation_number import (
    a1_limit,
    a2n_limit,
    admissible_H_interval,
    b1_bound,
    b2_bound,
    k_limits,
    k_sweep,
    rotation_K,
    rotation_K_n2_lemma,
    singular_limit_oracle,
)
from cmcsurf.scalar_core import critical_point, spherical

SQRT3 = math.sqrt(3.0)


@pytest.mark.parametrize(
    "H,C,m",
    [(0.1, 41.28796038772471, 2), (0.8, 22.320379289179478, 3), (1.2, 6.084010495710457, 3)],
)
def test_rotation_examples(H, C, m):
    assert rotation_K(spherical(2, H, C)) == pytest.approx(2 * math.pi / m, abs=1e-6)


def test_lemma_examples():
    assert rotation_K_n2_lemma(0.3, 9.129645968138256) == pytest.approx(math.pi, abs=1e-6)
    assert rotation_K_n2_lemma(0.0, 1e8) == pytest.approx(math.pi, abs=1e-3)
    assert rotation_K_n2_lemma(0.0, 2.0 * (1 + 1e-8)) == pytest.approx(math.sqrt(2) * math.pi, abs=1e-3)
    with pytest.raises(BelowThreshold):
        rotation_K_n2_lemma(0.5, 2.0)


def test_lemma_agrees_with_quadrature():
    rng = np.random.default_rng(20240607)
    worst = 0.0
    for _ in range(50):
        H = rng.uniform(0.0, 2.5)
        c0 = critical_point(2, H)[1]
        C = c0 * (1.0 + 10.0 ** rng.uniform(-5.0, 5.0))
        worst = max(worst, abs(rotation_K(spherical(2, H, C)) - rotation_K_n2_lemma(H, C)))
    assert worst <= 1e-8


def test_lemma_denominator_form():
    """The lemma's q2 with denominator 2C(1 + H^2) is the consistent one."""
    H, C = 0.8, 22.320379289179478
    K = rotation_K(spherical(2, H, C))
    q1 = (2 * H - C) / (2 * C * (1 + H * H))
    def lemma(q2):
        def f(t):
            w = -q2 * math.cos(t) - q1
            if w <= 0.0:
                return 0.0
            return (1 / C + H * w) / ((1 + q1 + q2 * math.cos(t)) * math.sqrt(w) * math.sqrt(1 + H * H))

        return quad(f, 0, math.pi, limit=400)[0]

    root = math.sqrt(C * C - 4 * C * H - 4)
    assert lemma(root / (2 * C * (1 + H * H))) == pytest.approx(K, abs=1e-6)
    assert abs(lemma(root / (2 * (C + H * H))) - K) > 1e-2


def test_k_limits_examples():
    b = k_limits(2, 0.0)
    assert b.a1 == pytest.approx(math.pi, abs=1e-15)
    assert b.a2n == pytest.approx(math.sqrt(2) * math.pi, abs=1e-15)
    for n in (3, 5, 9):
        assert a2n_limit(n, 0.0) == pytest.approx(math.sqrt(2) * math.pi, abs=1e-15)
    assert b2_bound(1 / SQRT3) == pytest.approx(math.pi, abs=1e-10)


def test_b2_equals_a2n_for_surfaces():
    for H in np.linspace(0.0, 5.0, 101):
        assert b2_bound(H) == pytest.approx(a2n_limit(2, H), abs=1e-10)


def test_limits_decrease_in_H():
    H = np.linspace(0.0, 4.0, 200)
    for n in (2, 3, 6):
        a1 = np.array([a1_limit(h) for h in H])
        a2 = np.array([a2n_limit(n, h) for h in H])
        assert np.all(np.diff(a1) < 0) and np.all(np.diff(a2) < 0)
        assert np.all(a1 < a2)


def test_b1_at_boundary():
    assert b1_bound(1 / SQRT3) == 2 * math.pi / 3
    assert b1_bound(1 / SQRT3) == a1_limit(1 / SQRT3)


def test_b2_at_seven_over_root_fifteen():
    assert b2_bound(7 / math.sqrt(15)) == pytest.approx(math.pi / 2, abs=1e-12)


def test_b2_at_upper_end_of_m3_interval():
    # the upper end of the m = 3 interval is where b2 reaches 2 pi / 3
    assert b2_bound(7 / (4 * math.sqrt(2))) == pytest.approx(2 * math.pi / 3, abs=1e-12)


def test_admissible_intervals():
    lo, hi = admissible_H_interval(2, 2)
    assert lo == 0.0 and hi == pytest.approx(1 / SQRT3, abs=1e-12)
    lo, hi = admissible_H_interval(2, 3)
    assert lo == pytest.approx(1 / SQRT3, abs=1e-12)
    assert hi == pytest.approx(7 / (4 * math.sqrt(2)), abs=1e-12)
    lo, hi = admissible_H_interval(2, 4)
    assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(7 / math.sqrt(15), abs=1e-12)
    for n in (3, 4, 8):
        lo, hi = admissible_H_interval(n, 2)
        assert lo == 0.0 and hi == pytest.approx(2 * math.sqrt(n - 1) / (n * SQRT3), abs=1e-12)
    with pytest.raises(EmptyInterval):
        admissible_H_interval(50, 10)
    with pytest.raises(ValueError):
        admissible_H_interval(2, 1)


def test_interval_ends_match_limits():
    for n, m in ((2, 2), (2, 3), (3, 3), (5, 4)):
        lo, hi = admissible_H_interval(n, m)
        assert a2n_limit(n, hi) == pytest.approx(2 * math.pi / m, abs=1e-12)
        if m > 2:
            assert a1_limit(lo) == pytest.approx(2 * math.pi / m, abs=1e-12)


@pytest.mark.parametrize("m", range(3, 51))
def test_period_inequality(m):
    assert b2_bound(1.0 / math.tan(math.pi / (m + 1))) > 2 * math.pi / m


def test_K_inside_bounds():
    rng = np.random.default_rng(7)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        H = rng.uniform(0.0, 2.0)
        c0 = critical_point(n, H)[1]
        C = c0 * (1.0 + 10.0 ** rng.uniform(-3.0, 4.0))
        K = rotation_K(spherical(n, H, C))
        assert a1_limit(H) + 1e-9 < K < a2n_limit(n, H) - 1e-9


def test_sweep_matches_pointwise():
    c = np.geomspace(3.0, 300.0, 5)
    K = k_sweep(2, 0.4, c)
    assert K == pytest.approx([rotation_K(spherical(2, 0.4, x)) for x in c], rel=1e-15)


ORACLE_CASES = [
    ("-sin^2", lambda t: -math.sin(t) ** 2, 1.0),
    ("cos-1", lambda t: math.cos(t) - 1.0, 0.5),
    ("-2t^2+t^4", lambda t: -2 * t * t + t**4, 2.0),
]


def test_oracle_pure_quadratic():
    assert singular_limit_oracle(lambda t: -t * t, 0.01) == pytest.approx(math.pi / 2, abs=1e-12)


@pytest.mark.parametrize("name,f,a", ORACLE_CASES, ids=[c[0] for c in ORACLE_CASES])
def test_oracle_limit(name, f, a):
    limit = math.pi / (2 * math.sqrt(a))
    errs = [abs(singular_limit_oracle(f, c) - limit) for c in (1e-2, 1e-4, 1e-6)]
    assert errs[-1] < 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_oracle_cos_example():
    assert singular_limit_oracle(lambda t: math.cos(t) - 1, 1e-4) == pytest.approx(math.pi / math.sqrt(2), abs=1e-3)


def test_oracle_cubic_perturbation():
    # the cubic term makes the approach to pi/2 slow: at c = 1e-6 the excess
    # is 1.001475293e-3 (40-digit reference value)
    val = singular_limit_oracle(lambda t: -t * t + t**3, 1e-6)
    assert val - math.pi / 2 == pytest.approx(1.001475293e-3, rel=1e-8)


def test_oracle_no_root():
    with pytest.raises(NoRoot):
        singular_limit_oracle(lambda t: t * t, 0.1)
