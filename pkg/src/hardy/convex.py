"""Hardy inequalities on general domains.

Directional distances, the pseudo-distance ``m_α``, the Hardy potential
``V_ε`` generated by a power weight, the inequality on unions of intervals
and the convex-body inequality in d = 1, 2.

``m_α(x)^α = ∫_{S^{d-1}} |ω_d|^α dω / ∫_{S^{d-1}} d_ω(x)^{-α} dω`` where
``d_ω(x) = min{|t| : x + tω ∉ Ω}`` uses the whole line through ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import ConvexBody, Interval, IntervalSet
from .forms import EngineConfig, form_1d, form_mc, norm_1d, norm_nd
from .quadrature import Estimate, integrate_1d, pv_integral, sphere_quad, ts_pieces
from .report import HardyReport
from .specfun import DomainError, angular_factor, kappa
from .testfunctions import TestFunction

__all__ = [
    "ConvexAlphaError",
    "PotentialSpec",
    "dir_dist",
    "dist_boundary",
    "m_alpha",
    "potential_v",
    "potential_limit",
    "verify_interval",
    "verify_convex",
    "reflection_split_bound",
    "restrict_to_line",
    "directional_form",
]


class ConvexAlphaError(DomainError):
    """``α <= 1`` on a bounded convex body."""


def dir_dist(x, omega, body: ConvexBody):
    """Two-sided distance from ``x`` to the boundary along ``±ω``."""
    return body.dir_dist(x, omega)


def dist_boundary(x, body: ConvexBody | IntervalSet):
    return body.dist_boundary(x)


def m_alpha(x, body: ConvexBody, alpha: float):
    """Pseudo-distance ``m_α(x)`` (vectorised over points)."""
    if not 0 < alpha < 2:
        raise DomainError("alpha must lie in (0, 2)")
    num = 2.0 * angular_factor(body.d, alpha)
    return (num / body.inv_dist_sphere(x, alpha)) ** (1.0 / alpha)


# ---------------------------------------------------------------------------
# Hardy potential


@dataclass(frozen=True)
class PotentialSpec:
    """Weight ``w(x) = x_d^β``, exponents and kernel cut-off ``ε`` (0 = principal value)."""

    beta: float
    p: float
    alpha: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise DomainError("epsilon must be >= 0")
        if not (self.p > 1 and 0 < self.alpha < 2):
            raise DomainError("need p > 1 and alpha in (0, 2)")


def _bracket(spec: PotentialSpec, wx, wy):
    """``(1/p)(1 - (w_y/w_x)^{p-1}) + ((p-1)/p)(1 - w_y/w_x)``."""
    p = spec.p
    t = wy / wx
    return (-np.expm1((p - 1.0) * np.log(t)) + (p - 1.0) * (1.0 - t)) / p


def potential_v(x, domain, spec: PotentialSpec, config: EngineConfig = EngineConfig()) -> Estimate:
    """``V_ε(x) = ∫_Ω [(1/p)(w(x)^{p-1}-w(y)^{p-1})/w(x)^{p-1} + ((p-1)/p)(w(x)-w(y))/w(x)] k_ε(x,y) dy``.

    ``domain`` is an ``IntervalSet``/``Interval`` (d = 1; ``ε = 0`` gives a
    principal value) or a convex body in d = 2 (``ε > 0`` required).
    """
    if isinstance(domain, Interval):
        domain = domain.as_interval_set()
    if isinstance(domain, IntervalSet):
        return _potential_1d(float(x), domain, spec, config)
    if spec.epsilon <= 0:
        raise DomainError("in d >= 2 only truncated potentials (epsilon > 0) are available")
    return _potential_nd(np.asarray(x, dtype=float), domain, spec, config)


def potential_limit(x, body: ConvexBody, spec: PotentialSpec, config: EngineConfig = EngineConfig()):
    """``ε → 0`` limit of ``V_ε(x)`` in d >= 2 by Richardson extrapolation.

    Uses ``ε, ε/2, ε/4`` from ``spec.epsilon``.  The removed ball contributes
    ``c ε^{2-α} + O(ε^{4-α})`` (the first-order term cancels by symmetry), so
    one elimination step leaves an ``O(ε^{4-α})`` error, estimated from the
    disagreement of the two extrapolants.  Returns ``(limit, [(ε_k, V_k), ...])``.
    """
    if spec.epsilon <= 0:
        raise DomainError("potential_limit needs a starting epsilon > 0")
    eps = [spec.epsilon / 2**k for k in range(3)]
    vals = [
        potential_v(x, body, PotentialSpec(spec.beta, spec.p, spec.alpha, e), config) for e in eps
    ]
    q = 2.0 ** (2.0 - spec.alpha)
    r1 = (q * vals[1].value - vals[0].value) / (q - 1.0)
    r2 = (q * vals[2].value - vals[1].value) / (q - 1.0)
    err = abs(r2 - r1) + vals[2].error * (q + 1.0) / (q - 1.0)
    return Estimate(r2, err), list(zip(eps, vals))


def _potential_1d(x, domain: IntervalSet, spec: PotentialSpec, config):
    beta, alpha, eps = spec.beta, spec.alpha, spec.epsilon
    if domain.intervals[0][0] < 0 and beta != 0:
        raise DomainError("power weights need a domain inside (0, inf)")
    if not domain.contains(x):
        raise DomainError("x must lie in the domain")
    wx = x**beta if beta else 1.0

    def f(y):
        if y <= 0 and beta:
            return 0.0
        wy = y**beta if beta else 1.0
        return float(_bracket(spec, wx, wy)) * abs(x - y) ** (-1.0 - alpha)

    tol = config.tol
    total = Estimate(0.0, 0.0)
    for a, b in domain.intervals:
        pieces = []
        if a < x < b:
            if eps > 0:
                pieces = [(a, x - eps), (x + eps, b)]
            else:
                total = total + pv_integral(f, a, b, x, tol=tol, order=1.0 - alpha, rtol=1e-9)
                continue
        else:
            pieces = [(a, b)]
        for lo, hi in pieces:
            lo, hi = max(lo, a), min(hi, b)
            if lo < hi:
                # ends touching x or 0 may carry integrable singularities
                total = total + integrate_1d(f, lo, hi, singular=(True, math.isfinite(hi)), tol=tol, rtol=1e-9)
    return total


def _potential_nd(x, body: ConvexBody, spec: PotentialSpec, config):
    if not body.contains(x):
        raise DomainError("x must lie in the body")
    beta, alpha, eps = spec.beta, spec.alpha, spec.epsilon
    wx = x[-1] ** beta if beta else 1.0

    def g(omega):
        reach = body.ray_exit(np.broadcast_to(x, omega.shape), omega)
        live = reach > eps
        hi = np.where(live, reach, 2 * eps)
        om = omega[:, None, :]

        def radial(r):
            y = x + r[..., None] * om
            wy = y[..., -1] ** beta if beta else np.ones_like(r)
            return _bracket(spec, wx, wy) * r ** (-1.0 - alpha)

        fine, _ = ts_pieces(radial, np.full(hi.shape, eps), hi, config.level + 1)
        return np.where(live, fine, 0.0)

    breaks = body.kink_angles(x, eps)
    return sphere_quad(g, body.d, tol=0.0, rtol=1e-9, breaks=breaks, max_level=8)


# ---------------------------------------------------------------------------
# interval and convex inequalities


def _as_interval_set(J) -> IntervalSet:
    if isinstance(J, Interval):
        return J.as_interval_set()
    if isinstance(J, IntervalSet):
        return J
    return IntervalSet(J)


def verify_interval(u: TestFunction, J, p: float, alpha: float, config: EngineConfig = EngineConfig()) -> HardyReport:
    """``E_p^J[u] >= κ_{1,p,α} ∫_J |u|^p dist(x, ∂J)^{-α}`` for a finite union of intervals ``J``."""
    if not 1.0 < alpha < 2.0:
        raise DomainError("the interval inequality needs alpha in (1, 2)")
    J = _as_interval_set(J)
    if any(math.isinf(a) or math.isinf(b) for a, b in J.intervals):
        raise DomainError("J must be a finite union of bounded intervals")
    a, b = float(u.support_box[0][0]), float(u.support_box[1][0])
    if not J.clip(a, b):
        raise DomainError("support of u misses J")
    lhs = form_1d(u, J, p, alpha, 0.0, config)

    def weight(x):
        return J.dist_boundary(x) ** (-alpha)

    rhs = norm_1d(u, p, weight, J.kinks(), J)
    return HardyReport.build(u.name, lhs, rhs, kappa(1, p, alpha), {"J": [list(iv) for iv in J.intervals]})


def reflection_split_bound(u: TestFunction, p: float, alpha: float, config: EngineConfig = EngineConfig()):
    """``(∫_0^1 |u|^p min(x,1-x)^{-α}, E_p^{(0,1)}[u] / κ_{1,p,α})``; the first never exceeds the second."""
    J = IntervalSet([(0.0, 1.0)])
    norm = norm_1d(u, p, lambda x: np.minimum(x, 1.0 - x) ** (-alpha), (0.5,), J)
    k = kappa(1, p, alpha)
    return norm, form_1d(u, J, p, alpha, 0.0, config).scale(1.0 / k)


def _convex_weight(body: ConvexBody, alpha: float, use_m_alpha: bool):
    if use_m_alpha:
        num = 2.0 * angular_factor(body.d, alpha)

        def weight(x):
            return body.inv_dist_sphere(x, alpha) / num

    else:

        def weight(x):
            return body.dist_boundary(x) ** (-alpha)

    return weight


def verify_convex(
    u: TestFunction,
    body: ConvexBody,
    p: float,
    alpha: float,
    use_m_alpha: bool = True,
    config: EngineConfig = EngineConfig(),
) -> HardyReport:
    """``E_p^Ω[u] >= κ_{d,p,α} ∫ |u|^p m_α^{-α}`` (or with ``dist``) on a convex body, d in {1, 2}.

    Raises
    ------
    ConvexAlphaError
        For ``α <= 1``: on bounded convex domains the inequality cannot hold
        with a positive constant there.
    """
    if alpha <= 1.0:
        raise ConvexAlphaError(
            f"alpha = {alpha} <= 1: on bounded convex domains no Hardy inequality with a positive constant holds"
        )
    if alpha >= 2.0:
        raise DomainError("alpha must be < 2")
    d = body.d
    lo, hi = (np.asarray(v, dtype=float) for v in u.support_box)
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(d, -1).T
    if u.disk is not None:
        ang = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
        c, r = u.disk
        ring = np.asarray(c) + r * np.stack([np.cos(ang), np.sin(ang)], -1)
        inside = bool(np.all(body.contains(ring * (1 - 1e-12) + np.asarray(c) * 1e-12)))
    else:
        inside = bool(np.all(body.contains(corners * (1 - 1e-12) + 0.5 * (lo + hi) * 1e-12)))
    if not inside:
        raise DomainError("support of u must lie inside the body")
    weight = _convex_weight(body, alpha, use_m_alpha)
    meta = {"body": type(body).__name__, "weight": "m_alpha" if use_m_alpha else "dist", "d": d, "p": p, "alpha": alpha}
    if d == 1:
        J = IntervalSet([(float(body.bounding_box()[0][0]), float(body.bounding_box()[1][0]))])
        lhs = form_1d(u, J, p, alpha, 0.0, config)
        rhs = norm_1d(u, p, lambda x: weight(np.asarray(x)[..., None]), J.kinks(), J)
    elif d == 2:
        lhs = form_mc(u, body, p, alpha, 0.0, config)
        rhs = norm_nd(u, p, weight, config.norm_nodes)
    else:
        raise DomainError("verify_convex supports d in {1, 2}")
    return HardyReport.build(u.name, lhs, rhs, kappa(d, p, alpha), meta)


# ---------------------------------------------------------------------------
# directional reduction (d = 2)


def restrict_to_line(u: TestFunction, point, direction):
    """``s ↦ u(point + s·direction)`` as a 1-D test function, or ``None`` if the line misses the support."""
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if u.disk is not None:
        c, r = np.asarray(u.disk[0], float), float(u.disk[1])
        off = point - c
        b = float(off @ direction)
        disc = b * b - (float(off @ off) - r * r)
        if disc <= 0:
            return None
        s0, s1 = -b - math.sqrt(disc), -b + math.sqrt(disc)
    else:
        lo, hi = (np.asarray(v, float) for v in u.support_box)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (lo - point) / direction
            t2 = (hi - point) / direction
        tmin = np.where(direction != 0, np.minimum(t1, t2), np.where((point > lo) & (point < hi), -np.inf, np.inf))
        tmax = np.where(direction != 0, np.maximum(t1, t2), np.where((point > lo) & (point < hi), np.inf, -np.inf))
        s0, s1 = float(np.max(tmin)), float(np.min(tmax))
        if not s0 < s1:
            return None

    def ev(s):
        s = np.asarray(s, dtype=float)
        return u(point + s[..., None] * direction)

    return TestFunction(ev, (np.array([s0]), np.array([s1])), (s0, s1), u.lipschitz_hint, "user", f"{u.name}|line")


def directional_form(
    u: TestFunction,
    body: ConvexBody,
    p: float,
    alpha: float,
    n_theta: int = 16,
    n_t: int = 24,
    config: EngineConfig = EngineConfig(level=3),
) -> Estimate:
    """``E_p^Ω[u]`` in d = 2 rebuilt from one-dimensional forms on chords.

    ``½∬ = ¼∫_{S^1} dω ∫_{ω⊥} dL ∬_{chord}`` and each chord double integral is
    twice a 1-D form, so ``E = ∫_0^π dθ ∫ E_chord(θ, t) dt``.  The angle uses
    the periodic trapezoid rule (the integrand is π-periodic), the offset a
    Gauss-Legendre rule, which keeps nodes away from the degenerate chords at
    the rim of the support.  The error is the change against half the angular resolution.
    """
    if body.d != 2 or u.d != 2:
        raise DomainError("directional_form is two-dimensional")
    if u.disk is not None:
        centre, radius = np.asarray(u.disk[0], float), float(u.disk[1])
    else:
        lo, hi = (np.asarray(v, float) for v in u.support_box)
        centre, radius = 0.5 * (lo + hi), 0.5 * float(np.linalg.norm(hi - lo))
    xg, wg = np.polynomial.legendre.leggauss(n_t)
    theta = np.arange(n_theta) * math.pi / n_theta
    per_theta = np.zeros(n_theta)
    for i, th in enumerate(theta):
        om = np.array([math.cos(th), math.sin(th)])
        perp = np.array([-om[1], om[0]])
        t0 = float(centre @ perp)
        acc = 0.0
        for t, wt in zip(t0 + radius * xg, radius * wg):
            base = t * perp
            line_u = restrict_to_line(u, base, om)
            if line_u is None:
                continue
            # chord of the body through base along om
            if not body.contains(base + float(np.mean(line_u.support_box)) * om):
                continue
            mid = base + 0.5 * (line_u.support_box[0][0] + line_u.support_box[1][0]) * om
            fwd = float(body.ray_exit(mid, om))
            back = float(body.ray_exit(mid, -om))
            smid = 0.5 * (line_u.support_box[0][0] + line_u.support_box[1][0])
            chord = IntervalSet([(smid - back, smid + fwd)])
            acc += wt * form_1d(line_u, chord, p, alpha, 0.0, config).value
        per_theta[i] = acc
    fine = float(per_theta.mean() * math.pi)
    # the even nodes form the nested half-resolution periodic rule
    coarse = float(per_theta[0::2].mean() * math.pi)
    return Estimate(fine, abs(fine - coarse), n=n_theta * n_t)
