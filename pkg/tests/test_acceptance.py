"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary and
on stdout with ``-s``) before asserting.
"""

import math
import time

import numpy as np
from _acceptance_log import record

from hardy.bodies import Ball, Box, Interval, Polytope
from hardy.bregman import bregman_f, comparability_ratio, comparability_scan, signed_pow
from hardy.cli import main
from hardy.convex import dist_boundary, m_alpha, verify_convex, verify_interval
from hardy.forms import EngineConfig
from hardy.halfspace import decomposition_residual, extremal_sweep, ground_state_residual, verify_halfspace
from hardy.quadrature import sphere_quad
from hardy.specfun import HardyParams, angular_factor, gamma_ab_closed, gamma_ab_quad, kappa, kappa_bd
from hardy.testfunctions import TestFunction, radial_bump, random_battery

ALPHAS = [round(0.1 * k, 1) for k in range(1, 20) if k != 10]
DIMS = (1, 2, 3)
PS = (1.25, 1.5, 2.0, 3.0, 5.0)


def test_01_constants_cross_check():
    t = time.perf_counter()
    worst = max(abs(kappa(d, 2.0, a) - kappa_bd(d, a)) / (1 + abs(kappa_bd(d, a))) for d in DIMS for a in ALPHAS)
    dt = time.perf_counter() - t
    ok = worst <= 1e-12 and dt < 1.0
    record(1, "kappa(d,2,a) = kappa_bd(d,a)", ok, f"max scaled diff {worst:.2e}, {dt:.3f}s")
    assert ok


def test_02_conjugate_symmetry():
    t = time.perf_counter()
    worst = 0.0
    for d in DIMS:
        for a in ALPHAS:
            for p in PS:
                k, kc = kappa(d, p, a), kappa(d, p / (p - 1.0), a)
                worst = max(worst, abs(k - kc) / (1 + abs(k)))
    dt = time.perf_counter() - t
    ok = worst <= 1e-12 and dt < 1.0
    record(2, "kappa(d,p,a) = kappa(d,p',a)", ok, f"max scaled diff {worst:.2e}, {dt:.3f}s")
    assert ok


def test_03_kappa_limit_at_one():
    t = time.perf_counter()
    hs = (1e-1, 1e-2, 1e-3, 1e-4)
    ok, worst = True, 0.0
    for d in DIMS:
        for p in PS:
            for sgn in (1.0, -1.0):
                vals = [abs(kappa(d, p, 1.0 + sgn * h)) for h in hs]
                worst = max(worst, vals[-1])
                ok &= vals[-1] <= 1e-2 and all(b < a for a, b in zip(vals, vals[1:]))
    dt = time.perf_counter() - t
    ok &= dt < 1.0
    record(3, "kappa -> 0 as alpha -> 1", ok, f"max |kappa| at h=1e-4: {worst:.2e}, {dt:.3f}s")
    assert ok


def test_04_gamma_agreement():
    t = time.perf_counter()
    worst = 0.0
    for a in np.linspace(0.05, 1.95, 20):
        assert abs(a - 1.0) > 1e-9
        for j in range(20):
            b = -1.0 + (a + 1.0) * (j + 0.5) / 20.0
            worst = max(worst, abs(gamma_ab_quad(a, b).value - gamma_ab_closed(a, b)))
    dt = time.perf_counter() - t
    ok = worst <= 1e-8 and dt < 30.0
    record(4, "gamma quadrature = closed form (20x20)", ok, f"max diff {worst:.2e}, {dt:.2f}s")
    assert ok


def test_05_ground_state_identity():
    t = time.perf_counter()
    worst, n = 0.0, 0
    for a in (0.3, 0.7, 1.2, 1.5, 1.8):
        for b in ((a - 1.0) / 2.0, (a - 1.0) / 3.0, -0.5, 0.5 * a, 0.9 * a):
            for x in (0.5, 1.0, 2.0):
                worst = max(worst, ground_state_residual(b, a, x))
                n += 1
    dt = time.perf_counter() - t
    ok = n == 75 and worst <= 1e-6 and dt < 60.0
    record(5, "ground-state identity (5x5x3)", ok, f"max residual {worst:.2e}, {dt:.2f}s")
    assert ok


def test_06_decomposition_identity():
    t = time.perf_counter()
    bumps = random_battery(10, 606, (0.05, 3.0), families=("bump",))
    worst, rem_ok = 0.0, True
    for p in (1.5, 2.0, 3.0):
        for a in (0.5, 1.5):
            beta = (a - 1.0) / p
            for u in bumps:
                r = decomposition_residual(u, HardyParams(1, p, a), beta)
                worst = max(worst, r.gap)
                rem_ok &= r.remainder.value >= -r.remainder.error
    dt = time.perf_counter() - t
    ok = worst <= 1e-4 and rem_ok and dt < 300.0
    record(6, "decomposition identity", ok, f"max gap {worst:.2e}, remainders ok={rem_ok}, {dt:.1f}s")
    assert ok


def test_07_halfspace_hardy():
    t = time.perf_counter()
    fails, worst = 0, math.inf
    for p in (1.5, 2.0, 3.0):
        for a in (0.5, 1.5, 1.9):
            for u in random_battery(50, 700 + int(10 * p + a * 10), (0.05, 3.0)):
                rep = verify_halfspace(u, HardyParams(1, p, a))
                bound = rep.lhs.error + abs(rep.constant) * rep.rhs.error
                fails += rep.margin < -bound
                worst = min(worst, rep.ratio / rep.constant - 1.0)
    dt = time.perf_counter() - t
    ok = fails == 0 and dt < 300.0
    record(7, "half-space Hardy, 50 functions x 9 (p,alpha)", ok, f"failures {fails}, min ratio/kappa-1 {worst:.2e}, {dt:.1f}s")
    assert ok


def test_08_sharpness_trend():
    t = time.perf_counter()
    ok, notes = True, []
    for p in (1.5, 2.0, 3.0):
        for a in (0.75, 1.5):
            rows = extremal_sweep(p, a, 1, (4, 16, 64, 256, 1024))
            gaps = [r.gap for r in rows]
            errs = [r.ratio_error for r in rows]
            band = [r.gap_log_n for r in rows]
            positive = all(g > -e for g, e in zip(gaps, errs)) and all(g > 0 for g in gaps)
            monotone = all(g1 <= g0 + e0 + e1 for g0, g1, e0, e1 in zip(gaps, gaps[1:], errs, errs[1:]))
            spread = max(band) / min(band)
            ok &= positive and monotone and spread <= 3.0
            notes.append(f"({p:g},{a:g}) band x{spread:.2f}")
    dt = time.perf_counter() - t
    ok &= dt < 600.0
    record(8, "extremal gaps shrink, gap*log n in a factor-3 band", ok, ", ".join(notes) + f", {dt:.1f}s")
    assert ok


def _sum(u: TestFunction, v: TestFunction) -> TestFunction:
    lo = np.minimum(u.support_box[0], v.support_box[0])
    hi = np.maximum(u.support_box[1], v.support_box[1])
    return TestFunction(
        lambda x: u(x) + v(x),
        (lo, hi),
        tuple(sorted(set(u.breakpoints) | set(v.breakpoints))),
        None,
        "sum",
        f"{u.name}+{v.name}",
    )


def test_09_interval_hardy():
    t = time.perf_counter()
    one = random_battery(20, 901, (0.0, 1.0))
    other = random_battery(20, 902, (0.0, 1.0))
    two = [_sum(u, v.shifted(2.0)) for u, v in zip(one, other)]
    fails, n = 0, 0
    for a in (1.1, 1.5, 1.9):
        for p in (1.5, 2.0, 3.0):
            for J, battery in (([(0.0, 1.0)], one), ([(0.0, 1.0), (2.0, 3.0)], two)):
                for u in battery:
                    rep = verify_interval(u, J, p, a)
                    fails += not rep.passed
                    n += 1
    dt = time.perf_counter() - t
    ok = fails == 0 and dt < 180.0
    record(9, "interval Hardy on (0,1) and (0,1)u(2,3)", ok, f"{n} runs, failures {fails}, {dt:.1f}s")
    assert ok


def test_10_sphere_identity():
    t = time.perf_counter()
    worst = 0.0
    for d in DIMS:
        for a in (0.25, 0.5, 1.0, 1.5):
            est = sphere_quad(lambda om: np.abs(om[:, -1]) ** a, d, tol=1e-10)
            worst = max(worst, abs(est.value - 2.0 * angular_factor(d, a)))
    dt = time.perf_counter() - t
    ok = worst <= 1e-8 and dt < 10.0
    record(10, "sphere quadrature of |w_d|^a", ok, f"max diff {worst:.2e}, {dt:.2f}s")
    assert ok


def _points(body, n, rng):
    lo, hi = (np.asarray(v, float) for v in body.bounding_box())
    out = np.empty((0, lo.size))
    while len(out) < n:
        x = rng.uniform(lo, hi, size=(2 * n, lo.size))
        out = np.concatenate([out, x[body.contains(x)]])
    return out[:n]


def test_11_m_alpha_below_dist():
    t = time.perf_counter()
    bodies = {
        "interval": Interval(0.0, 1.0),
        "square": Box([0.0, 0.0], [1.0, 1.0]),
        "disk": Ball([0.0, 0.0], 1.0),
        "triangle": Polytope([[0.0, -1.0], [-1.0, 0.0], [1.0, 1.0]], [0.0, 0.0, 1.0]),
    }
    rng = np.random.default_rng(1100)
    worst = 0.0
    for body in bodies.values():
        x = _points(body, 1000, rng)
        d = dist_boundary(x, body)
        for a in (1.1, 1.5, 1.9):
            worst = max(worst, float(np.max(m_alpha(x, body, a) / d - 1.0)))
    eq = max(abs(float(m_alpha([0.5], Interval(0.0, 1.0), a)) - 0.5) for a in (1.1, 1.5, 1.9))
    dt = time.perf_counter() - t
    ok = worst <= 1e-12 and eq <= 1e-12 and dt < 30.0
    record(11, "m_alpha <= dist; interval centre equality", ok, f"max m/dist-1 {worst:.2e}, centre diff {eq:.1e}, {dt:.2f}s")
    assert ok


def test_12_convex_hardy_monte_carlo():
    t = time.perf_counter()
    disk, square = Ball([0.0, 0.0], 1.0), Box([0.0, 0.0], [1.0, 1.0])
    cases = [
        (disk, radial_bump([0.0, 0.0], 0.7)),
        (disk, radial_bump([0.35, -0.2], 0.5)),
        (square, radial_bump([0.5, 0.5], 0.4)),
        (square, radial_bump([0.3, 0.65], 0.25)),
    ]
    cfg = EngineConfig(samples=1_000_000, seed=12)
    fails, dominated, n = 0, True, 0
    for body, u in cases:
        for p in (1.5, 2.0):
            for a in (1.25, 1.75):
                rm = verify_convex(u, body, p, a, True, cfg)
                rd = verify_convex(u, body, p, a, False, cfg)
                for rep in (rm, rd):
                    # sigma = 3 for Monte Carlo estimates
                    fails += rep.margin < -3.0 * (rep.lhs.error + rep.constant * rep.rhs.error)
                    n += 1
                dominated &= rm.rhs.value >= rd.rhs.value - (rm.rhs.error + rd.rhs.error)
    dt = time.perf_counter() - t
    ok = fails == 0 and dominated and dt < 900.0
    record(12, "convex Hardy in disk and square (Monte Carlo)", ok, f"{n} runs, failures {fails}, m-RHS >= dist-RHS {dominated}, {dt:.1f}s")
    assert ok


def test_13_bregman_properties():
    t = time.perf_counter()
    rng = np.random.default_rng(1300)
    n = 100_000
    pv = np.array([1.1, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0])
    p = pv[rng.integers(0, pv.size, n)]
    a = rng.normal(size=n) * 10.0 ** rng.uniform(-2, 2, n)
    b = np.where(rng.random(n) < 0.2, a * (1 + rng.normal(size=n) * 1e-6), rng.normal(size=n) * 10.0 ** rng.uniform(-2, 2, n))
    sym_bad = bracket_bad = 0
    for q in pv:
        m = p == q
        fa, fb = bregman_f(q, a[m], b[m]), bregman_f(q, b[m], a[m])
        want = q * (b[m] - a[m]) * (signed_pow(b[m], q - 1) - signed_pow(a[m], q - 1))
        scale = q * np.abs(b[m] - a[m]) * (np.abs(a[m]) ** (q - 1) + np.abs(b[m]) ** (q - 1))
        sym_bad += int(np.sum(np.abs(fa + fb - want) > 1e-12 * scale))
        scan = comparability_scan(q)
        r = comparability_ratio(q, a[m], b[m])
        bracket_bad += int(np.sum((r < scan.c_lower * (1 - 1e-9)) | (r > scan.c_upper * (1 + 1e-9))))
    one = float(np.max(np.abs(comparability_ratio(2.0, a, b) - 1.0)))
    dt = time.perf_counter() - t
    ok = sym_bad == 0 and bracket_bad == 0 and one <= 1e-12 and dt < 10.0
    record(13, "Bregman symmetrization and two-sided bracket", ok, f"violations {sym_bad}+{bracket_bad}, p=2 max|r-1| {one:.1e}, {dt:.2f}s")
    assert ok


def test_14_cli_reproducible(tmp_path):
    t = time.perf_counter()
    runs = [
        ["verify", "halfspace", "--p", "1.5", "--alpha", "1.2", "--battery", "default", "--seed", "11", "--json"],
        ["verify", "convex", "--p", "2", "--alpha", "1.5", "--body", "ball@0,0,1", "--battery", "smoke", "--samples", "20000", "--seed", "4", "--json"],
        ["sweep", "extremal", "--p", "2", "--alpha", "0.75", "--n", "4,16", "--json"],
    ]
    same = True
    for i, args in enumerate(runs):
        blobs = []
        for k in range(2):
            path = tmp_path / f"run{i}_{k}.json"
            assert main(args + ["--out", str(path)]) in (0, 1)
            blobs.append(path.read_bytes())
        same &= blobs[0] == blobs[1] and len(blobs[0]) > 0
    dt = time.perf_counter() - t
    ok = same and dt < 60.0
    record(14, "seeded CLI runs give byte-identical JSON", ok, f"{len(runs)} commands, {dt:.1f}s")
    assert ok
