"""Sobolev-Bregman forms, weighted norms and the Bregman remainder.

One dimension is handled deterministically on finite unions of intervals;
d >= 2 uses stratified Monte Carlo for the form and tensor Gauss rules for
the norms.

The form is

    E_p[u] = 1/2 ∬_{Ω×Ω} (u(x)-u(y)) (u(x)^{<p-1>} - u(y)^{<p-1>}) |x-y|^{-d-α} dx dy .

Writing ``S`` for the support box of ``u`` it splits into the pair part over
``(S∩Ω)^2`` and ``∫_{S∩Ω} |u|^p k_out`` where ``k_out(x)`` integrates the
kernel over ``Ω \\ S``; the latter is available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .bodies import ConvexBody, IntervalSet
from .bregman import bregman_f
from .quadrature import (
    DETERMINISTIC,
    Estimate,
    double_singular,
    pair_samples,
    stratified_estimate,
    ts_pieces,
)
from .testfunctions import TestFunction

__all__ = [
    "EngineConfig",
    "pair_bracket",
    "form_1d",
    "form_mc",
    "norm_1d",
    "norm_nd",
    "remainder_1d",
    "power_kernel_outside",
]


@dataclass(frozen=True)
class EngineConfig:
    """Numerical knobs shared by the engines.

    ``level`` is the tanh-sinh level (step ``2**-level``), ``cut`` the
    relative size below which the diagonal profile is extrapolated,
    ``samples``/``seed``/``strata`` drive Monte Carlo and ``norm_nodes`` the
    per-axis Gauss order for d >= 2 norms.
    """

    level: int = 4
    cut: float = 1e-7
    tol: float = 1e-8
    samples: int = 1_000_000
    seed: int = 0
    strata: int = 32
    norm_nodes: int = 200

    def as_dict(self) -> dict:
        return asdict(self)


def pair_bracket(p: float, ux, uy):
    """``(a - b)(a^{<p-1>} - b^{<p-1>})``."""
    q = p - 1.0
    return (ux - uy) * (np.sign(ux) * np.abs(ux) ** q - np.sign(uy) * np.abs(uy) ** q)


def _support_1d(u: TestFunction):
    return float(u.support_box[0][0]), float(u.support_box[1][0])


def _panels(inner, points):
    """Split each interval of ``inner`` at the given interior points."""
    lo, hi = [], []
    pts = np.unique(np.asarray(points, dtype=float))
    for a, b in inner:
        cuts = np.concatenate([[a], pts[(pts > a) & (pts < b)], [b]])
        lo.extend(cuts[:-1])
        hi.extend(cuts[1:])
    return np.asarray(lo), np.asarray(hi)


def _integrate_x(g, lo, hi, level):
    fine, crude = ts_pieces(g, lo, hi, level, log_ratio=np.inf)
    return Estimate(float(fine.sum()), float(np.abs(fine - crude).sum()) + 1e-15 * abs(float(fine.sum())))


def _kernel_tail(lower, upper, alpha):
    """``∫_lower^upper r^{-1-α} dr`` (upper may be inf), zero when empty."""
    with np.errstate(divide="ignore", invalid="ignore"):
        far = np.where(np.isinf(upper), 0.0, upper ** (-alpha))
        val = (lower ** (-alpha) - far) / alpha
    return np.where(upper > lower, val, 0.0)


def power_kernel_outside(x, outside, alpha: float, epsilon: float = 0.0):
    """``Σ_I ∫_{I, |y-x|>ε} |x-y|^{-1-α} dy`` over intervals ``I`` not containing ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c, e in outside:
        near = np.where(x <= c, c - x, x - e)
        far = np.where(x <= c, e - x, x - c)
        out = out + _kernel_tail(np.maximum(near, epsilon), far, alpha)
    return out


def _tail_powers(p: float) -> tuple[float, ...]:
    """Exponents of the pair profile near ``z = 0``.

    ``z^2`` from smooth pieces, ``z^3`` from kinks and curvature, ``z^{p+1}``
    from the zeros of ``u`` where ``|u|^{p-2}`` is not smooth.
    """
    e = [2.0, 3.0]
    if min(abs(p + 1.0 - 2.0), abs(p + 1.0 - 3.0)) > 0.05:
        e.append(p + 1.0)
    return tuple(sorted(e))


def form_1d(
    u: TestFunction,
    domain: IntervalSet,
    p: float,
    alpha: float,
    epsilon: float = 0.0,
    config: EngineConfig = EngineConfig(),
) -> Estimate:
    """``E_p[u]`` over a union of intervals (optionally with the kernel cut at ``ε``)."""
    a, b = _support_1d(u)
    inner = domain.clip(a, b)
    if not inner:
        return Estimate(0.0, 0.0)
    outside = domain.outside(a, b)

    def F(x, y):
        return pair_bracket(p, u(x), u(y))

    pair = double_singular(
        F, inner, alpha, breakpoints=u.breakpoints, epsilon=epsilon, level=config.level, cut=config.cut,
        tail_powers=_tail_powers(p),
    ).scale(0.5)
    lo, hi = _panels(inner, u.breakpoints)

    def g(x):
        up = np.abs(u(x)) ** p
        # nodes that round onto a support end see an infinite kernel but u = 0
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(up > 0, up * power_kernel_outside(x, outside, alpha, epsilon), 0.0)

    return pair + _integrate_x(g, lo, hi, config.level)


def norm_1d(
    u: TestFunction,
    p: float,
    weight: Callable[[np.ndarray], np.ndarray],
    kinks=(),
    domain: IntervalSet | None = None,
    level: int = 5,
) -> Estimate:
    """``∫ |u|^p w`` with panel ends at the breakpoints of ``u`` and at ``kinks`` of ``w``."""
    a, b = _support_1d(u)
    inner = domain.clip(a, b) if domain is not None else [(a, b)]
    lo, hi = _panels(inner, [*u.breakpoints, *kinks])
    return _integrate_x(lambda x: np.abs(u(x)) ** p * weight(x), lo, hi, level)


# ---------------------------------------------------------------------------
# remainder (power weights on (0, inf))


def _power_moment(x, c, e, b, alpha, level):
    """``∫_c^e y^b |x-y|^{-1-α} dy`` for ``x`` outside ``[c, e]`` (``e`` may be inf).

    Points sitting exactly on the interval (where the moment is infinite)
    get 0; callers multiply by ``|u|^p`` which vanishes there.
    """
    x = np.asarray(x, dtype=float)
    left = bool(np.all(x >= e))
    if not left and not np.all(x <= c):
        raise ValueError("points must lie on one side of the interval")
    touch = (x <= e) if left else (x >= c)
    # any point at distance 1 stands in for the touching ones
    x = np.where(touch, e + 1.0 if left else c - 1.0, x)
    gap = x - e if left else c - x
    xs = x[..., None]
    if left:
        # r = x - y ∈ (gap, x - c)
        def f(r):
            return np.maximum(xs - r, c) ** b * r ** (-1.0 - alpha)

        fine, crude = ts_pieces(f, gap, x - c, level)
    elif math.isfinite(e):
        def f(r):
            return (xs + r) ** b * r ** (-1.0 - alpha)

        fine, crude = ts_pieces(f, gap, e - x, level)
    else:
        # y = x + gap/s maps (c, inf) onto s ∈ (0, 1)
        knee = np.clip(gap / np.maximum(x, 1e-300), 0.0, 1.0)
        x2, g2 = x[..., None, None], gap[..., None, None]

        def f(s):
            return g2 ** (-alpha) * s ** (alpha - 1.0 - b) * (x2 * s + g2) ** b

        lo = np.stack([np.zeros_like(x), knee], axis=-1)
        hi = np.stack([knee, np.ones_like(x)], axis=-1)
        fine, crude = ts_pieces(f, lo, hi, level)
        fine, crude = fine.sum(-1), crude.sum(-1)
    return np.where(touch, 0.0, fine), np.where(touch, 0.0, np.abs(fine - crude))


def remainder_1d(
    u: TestFunction,
    p: float,
    alpha: float,
    beta: float,
    domain: IntervalSet | None = None,
    config: EngineConfig = EngineConfig(),
) -> Estimate:
    """Bregman remainder ``∬ F_p(u(x)/w(x), u(y)/w(y)) w(x)^{p-1} w(y) |x-y|^{-1-α}`` with ``w = x^β``.

    ``domain`` defaults to ``(0, inf)`` and must lie in it.  The integrand is
    not symmetric, so both orders are integrated.  With ``u(y) = 0`` outside
    the support the off-support parts reduce to moments
    ``∫ y^b |x-y|^{-1-α} dy`` with ``b = β`` and ``b = (p-1)β``.
    """
    domain = domain or IntervalSet([(0.0, math.inf)])
    if domain.intervals[0][0] < 0:
        raise ValueError("power weights need a domain inside (0, inf)")
    a, b = _support_1d(u)
    inner = domain.clip(a, b)
    if not inner:
        return Estimate(0.0, 0.0)
    outside = domain.outside(a, b)
    q = p - 1.0

    def F(x, y):
        wx, wy = x**beta, y**beta
        return bregman_f(p, u(x) / wx, u(y) / wy) * wx**q * wy

    pair = double_singular(
        F, inner, alpha, breakpoints=u.breakpoints, symmetric=False, level=config.level, cut=config.cut,
        tail_powers=_tail_powers(p),
    )
    lo, hi = _panels(inner, u.breakpoints)

    def g(x):
        total = np.zeros_like(x)
        for c, e in outside:
            m1, _ = _power_moment(x, c, e, beta, alpha, config.level)
            m2, _ = _power_moment(x, c, e, q * beta, alpha, config.level)
            total = total + q * x ** (-beta) * m1 + x ** (-q * beta) * m2
        return np.abs(u(x)) ** p * total

    return pair + _integrate_x(g, lo, hi, config.level)


# ---------------------------------------------------------------------------
# d >= 2


def _box_exit(x, omega, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(omega > 0, (hi - x) / omega, np.where(omega < 0, (lo - x) / omega, np.inf))
    return t.min(axis=-1)


def _clip_box(u: TestFunction, body: ConvexBody):
    lo, hi = (np.asarray(v, dtype=float) for v in u.support_box)
    blo, bhi = body.bounding_box()
    lo, hi = np.maximum(lo, blo), np.minimum(hi, bhi)
    if np.any(lo >= hi):
        raise ValueError("support of u misses the body")
    return lo, hi


def form_mc(
    u: TestFunction,
    body: ConvexBody,
    p: float,
    alpha: float,
    epsilon: float = 0.0,
    config: EngineConfig = EngineConfig(),
) -> Estimate:
    """Monte Carlo ``E_p[u]`` on a body in d >= 2 (standard error reported).

    Each sample ``(x, ω, r)`` contributes the pair term for ``y = x + rω``
    and, along the same ray, the closed-form kernel mass of the part of the
    body beyond the support box.
    """
    d = body.d
    if u.d != d:
        raise ValueError("dimension mismatch between u and body")
    lo, hi = _clip_box(u, body)
    ps = pair_samples((lo, hi), alpha, config.samples, config.seed, config.strata)
    x, om, r = ps.x, ps.omega, ps.r
    y = ps.y
    in_x = body.contains(x)
    ux = u(x)
    uy = u(y)
    in_y = np.all((y > lo) & (y < hi), axis=1) & body.contains(y) & (r > epsilon)
    pair = np.where(in_x & in_y, 0.5 * pair_bracket(p, ux, uy) * ps.radial_weight, 0.0)
    r_s = _box_exit(x, om, lo, hi)
    r_b = np.where(in_x, body.ray_exit(x, om), 0.0)
    tail = _kernel_tail(np.maximum(r_s, epsilon), r_b, alpha)
    outer = np.where(in_x, np.abs(ux) ** p * tail * ps.angular_weight, 0.0)
    return stratified_estimate(pair + outer, ps.stratum, ps.strata)


def norm_nd(u: TestFunction, p: float, weight: Callable[[np.ndarray], np.ndarray], nodes: int = 200, chunk: int = 4096):
    """``∫ |u|^p w`` in d = 2 by tensor Gauss-Legendre (polar when ``u`` has a disk support).

    The error is the difference with the rule of half the order.
    """
    if u.d != 2:
        raise ValueError("norm_nd supports d = 2")

    def rule(n):
        t, w = np.polynomial.legendre.leggauss(n)
        t, w = 0.5 * (t + 1.0), 0.5 * w
        if u.disk is not None:
            c, R = (np.asarray(u.disk[0], float), float(u.disk[1]))
            rho, th = R * t, 2 * math.pi * t
            P = np.stack(np.meshgrid(rho, th, indexing="ij"), -1).reshape(-1, 2)
            W = np.outer(R * w * rho, 2 * math.pi * w).ravel()
            pts = c + P[:, :1] * np.hstack([np.cos(P[:, 1:]), np.sin(P[:, 1:])])
        else:
            lo, hi = (np.asarray(v, float) for v in u.support_box)
            gx, gy = lo[0] + (hi[0] - lo[0]) * t, lo[1] + (hi[1] - lo[1]) * t
            pts = np.stack(np.meshgrid(gx, gy, indexing="ij"), -1).reshape(-1, 2)
            W = np.outer((hi[0] - lo[0]) * w, (hi[1] - lo[1]) * w).ravel()
        total = 0.0
        for s in range(0, pts.shape[0], chunk):
            sl = slice(s, s + chunk)
            vals = np.abs(u(pts[sl])) ** p
            live = vals > 0
            if live.any():
                total += float(np.sum(W[sl][live] * vals[live] * weight(pts[sl][live])))
        return total

    fine = rule(nodes)
    crude = rule(nodes // 2)
    return Estimate(fine, abs(fine - crude) + 1e-14 * abs(fine), DETERMINISTIC, nodes * nodes)
