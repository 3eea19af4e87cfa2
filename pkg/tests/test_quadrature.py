import math

import mpmath as mp
import numpy as np
import pytest

from hardy.quadrature import (
    DivergenceError,
    Estimate,
    QuadratureError,
    TruncatedKernel,
    double_singular,
    integrate_1d,
    make_rng,
    pair_samples,
    pv_integral,
    sphere_quad,
    stratified_estimate,
)
from hardy.specfun import angular_factor, gamma_ab_closed

mp.mp.dps = 30


def test_estimate_validation_and_sum():
    with pytest.raises(ValueError):
        Estimate(1.0, -1e-3)
    s = Estimate(1.0, 0.1) + Estimate(2.0, 0.2, "monte_carlo", 5)
    assert s.value == 3.0 and s.error == pytest.approx(0.3) and s.kind == "monte_carlo"
    assert Estimate(2.0, 0.5).scale(-2).error == 1.0


def test_integrate_1d_examples():
    assert integrate_1d(lambda t: t**-0.5, 0.0, 1.0, singular=(True, False)).value == pytest.approx(2.0, abs=1e-10)
    assert integrate_1d(lambda t: 1.0, 0.0, 1.0).value == pytest.approx(1.0, abs=1e-14)
    a, b = 0.5, 0.2
    f = lambda t: (t**b - 1) * (1 - t ** (a - b - 1)) / (1 - t) ** (1 + a)
    est = integrate_1d(f, 0.0, 1.0, singular=(True, True), tol=1e-10)
    assert est.value == pytest.approx(gamma_ab_closed(a, b), abs=1e-9)


def test_integrate_1d_infinite_range():
    est = integrate_1d(lambda t: math.exp(-t) * t**-0.3, 0.0, math.inf, singular=(True, False))
    assert est.value == pytest.approx(math.gamma(0.7), rel=1e-9)


def test_integrate_1d_budget_failure_carries_partial():
    with pytest.raises(QuadratureError) as info:
        integrate_1d(lambda t: math.sin(1.0 / t) / t, 1e-6, 1.0, tol=1e-14, limit=5)
    assert isinstance(info.value.partial, Estimate)


def test_pv_odd():
    est = pv_integral(lambda y: 1.0 / y, -1.0, 1.0, 0.0, tol=1e-10)
    assert abs(est.value) <= 1e-10


def test_pv_constant_weight():
    f = lambda y: (1.0 - 1.0) / abs(1.0 - y) ** 2.5
    assert pv_integral(f, 0.0, math.inf, 1.0).value == 0.0


def _pv_oracle(beta, alpha, x):
    """Symmetric pairing around ``x`` evaluated with mpmath."""
    beta, alpha, x = mp.mpf(beta), mp.mpf(alpha), mp.mpf(x)
    f = lambda y: (y**beta - x**beta) / abs(x - y) ** (1 + alpha)

    def pair(h):
        # (1+s)^β + (1-s)^β - 2 without cancellation for tiny s
        s = h / x
        num = mp.expm1(beta * mp.log1p(s)) + mp.expm1(beta * mp.log1p(-s))
        return x**beta * num / h ** (1 + alpha)

    pair = mp.quad(pair, [0, x / 2, x])
    return pair + mp.quad(f, [2 * x, 4 * x, mp.inf])


@pytest.mark.parametrize("alpha,beta", [(1.5, 0.3), (0.5, -0.2), (1.2, 0.8)])
def test_pv_power_weight(alpha, beta):
    f = lambda y: (y**beta - 1.0) / abs(1.0 - y) ** (1 + alpha)
    est = pv_integral(f, 0.0, math.inf, 1.0, tol=1e-9, order=1.0 - alpha, rtol=1e-10)
    assert est.value == pytest.approx(float(_pv_oracle(beta, alpha, 1.0)), abs=1e-8)
    # Lw_β = γ(α, β) x^{β-α} at x = 1
    assert est.value == pytest.approx(gamma_ab_closed(alpha, beta), abs=1e-8)


def test_pv_interior_point_required():
    with pytest.raises(ValueError):
        pv_integral(lambda y: y, 0.0, 1.0, 1.0)


def test_double_singular_zero():
    est = double_singular(lambda x, y: np.zeros_like(x), [(0.0, 1.0)], 0.5)
    assert est.value == 0.0


def test_double_singular_power():
    # ∬_{[0,1]^2} |x-y|^{-1/2} = 8/3, written as F = |x-y|^2 against |x-y|^{-2.5}
    est = double_singular(lambda x, y: (x - y) ** 2, [(0.0, 1.0)], 1.5)
    assert est.value == pytest.approx(8.0 / 3.0, abs=max(est.error, 1e-9))
    assert abs(est.value - 8.0 / 3.0) < 1e-9


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_double_singular_separated_components(alpha):
    # (x-y)^2 x y over J x J, J = (0,1) u (2,3); the cross blocks are regular
    F = lambda x, y: (x - y) ** 2 * x * y
    J = [(0.0, 1.0), (2.0, 3.0)]
    est = double_singular(F, J, alpha, breakpoints=(0.5, 2.5))
    with mp.workdps(30):
        g = lambda x, y: x * y * abs(x - y) ** (1 - mp.mpf(alpha))
        want = 0
        for a, b in J:
            for c, e in J:
                if a == c:
                    # inner integral over y < x in closed form, t = x - y
                    sa = 1 - mp.mpf(alpha)
                    inner = lambda x: x * (x * (x - a) ** (sa + 1) / (sa + 1) - (x - a) ** (sa + 2) / (sa + 2))
                    want += 2 * mp.quad(inner, [a, b])
                else:
                    want += mp.quad(g, [a, b], [c, e])
    assert abs(est.value - float(want)) <= max(est.error, 1e-10 * float(want))
    assert est.value == pytest.approx(float(want), rel=1e-9)


def test_double_singular_epsilon_monotone():
    F = lambda x, y: (np.sin(3 * x) - np.sin(3 * y)) ** 2
    vals = [double_singular(F, [(0.0, 1.0)], 1.2, epsilon=e).value for e in (0.2, 0.1, 0.05, 0.01, 0.0)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    # the truncated values converge to the ε = 0 value
    assert abs(vals[-2] - vals[-1]) < abs(vals[0] - vals[-1])


def test_double_singular_divergence_detected():
    with pytest.raises(DivergenceError):
        double_singular(lambda x, y: np.abs(x - y), [(0.0, 1.0)], 1.5)


def test_truncated_kernel_monotone():
    x, y = np.zeros(50), np.linspace(0.01, 1, 50)
    ks = [TruncatedKernel(e, 1, 0.7)(x, y) for e in (0.5, 0.2, 0.0)]
    assert np.all(ks[0] <= ks[1]) and np.all(ks[1] <= ks[2])
    assert np.allclose(ks[2], y**-1.7)
    with pytest.raises(ValueError):
        TruncatedKernel(-1.0, 1, 0.5)


def test_sphere_quad_constants():
    assert sphere_quad(lambda om: np.ones(len(om)), 1).value == 2.0
    assert sphere_quad(lambda om: np.ones(len(om)), 2).value == pytest.approx(2 * math.pi, rel=1e-13)
    assert sphere_quad(lambda om: np.ones(len(om)), 3).value == pytest.approx(4 * math.pi, rel=1e-12)
    with pytest.raises(ValueError):
        sphere_quad(lambda om: np.ones(len(om)), 4)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.5])
def test_sphere_identity(d, alpha):
    est = sphere_quad(lambda om: np.abs(om[:, -1]) ** alpha, d, tol=1e-10)
    assert abs(est.value - 2 * angular_factor(d, alpha)) <= 1e-8


def test_rng_reproducible():
    a = make_rng(42).random(5)
    b = make_rng(42).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, make_rng(43).random(5))
    with pytest.raises(ValueError):
        make_rng(-1)


def test_deterministic_bitwise_reproducible():
    F = lambda x, y: (np.cos(x) - np.cos(y)) ** 2
    e1 = double_singular(F, [(0.0, 2.0)], 0.8)
    e2 = double_singular(F, [(0.0, 2.0)], 0.8)
    assert e1 == e2


def _square_pair_exact(alpha):
    """∬_{[0,1]^2 x [0,1]^2} |x-y|^{-α} via polar coordinates on the difference."""

    def inner(theta):
        c, s = math.cos(theta), math.sin(theta)
        R = 1.0 / c
        # ∫_0^R (1 - r c)(1 - r s) r^{1-α} dr
        k = 2.0 - alpha
        return R**k / k - (c + s) * R ** (k + 1) / (k + 1) + c * s * R ** (k + 2) / (k + 2)

    from scipy import integrate

    return 8.0 * integrate.quad(inner, 0.0, math.pi / 4, epsabs=1e-13)[0]


def test_monte_carlo_calibration():
    """The true error is within three reported standard errors in >= 99% of seeded trials."""
    alpha = 1.5
    exact = _square_pair_exact(alpha)
    F = lambda x, y: np.sum((x - y) ** 2, axis=1)
    hits = 0
    trials = 1000
    for seed in range(trials):
        est = double_singular(F, ([0.0, 0.0], [1.0, 1.0]), alpha, d=2, samples=4000, seed=seed, strata=8)
        hits += abs(est.value - exact) <= 3 * est.error
    assert hits >= 0.99 * trials


def test_monte_carlo_seed_reproducible():
    F = lambda x, y: np.sum((x - y) ** 2, axis=1)
    e1 = double_singular(F, ([0, 0], [1, 1]), 1.2, d=2, samples=20000, seed=9)
    e2 = double_singular(F, ([0, 0], [1, 1]), 1.2, d=2, samples=20000, seed=9)
    assert e1 == e2


def test_stratified_estimate_matches_mean():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=4000)
    strata = np.repeat(np.arange(8), 500)
    est = stratified_estimate(vals, strata, 8)
    assert est.value == pytest.approx(vals.mean(), abs=1e-14)
    assert est.error == pytest.approx(vals.std() / math.sqrt(4000), rel=0.1)


def test_pair_samples_radial_law():
    ps = pair_samples(([0.0, 0.0], [1.0, 1.0]), 1.2, 80000, seed=3)
    # r ~ density ∝ r^{1-α} on (0, R): E[r] = R (2-α)/(3-α)
    R = ps.radius
    assert ps.r.mean() == pytest.approx(R * 0.8 / 1.8, rel=0.01)
    assert np.allclose(np.linalg.norm(ps.omega, axis=1), 1.0)
