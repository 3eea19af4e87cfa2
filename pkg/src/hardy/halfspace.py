"""Hardy inequalities on the half-space ``D = {x_d > 0}``.

Contents: the form ``E_p`` and weighted norm on ``D``, the ground-state
identity for power weights ``x^β``, the decomposition of ``E_p`` into a
potential term and a nonnegative Bregman remainder, and the extremal
sequence that shows ``κ_{d,p,α}`` cannot be raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import IntervalSet, half_space
from .forms import EngineConfig, form_1d, form_mc, norm_1d, norm_nd, remainder_1d
from .quadrature import Estimate, pv_integral
from .report import HardyReport
from .specfun import DomainError, HardyParams, angular_factor, gamma_ab_closed, gamma_ab_quad, kappa
from .testfunctions import TestFunction

__all__ = [
    "HALF_LINE",
    "WeightProfile",
    "ExtremalSpec",
    "DecompositionResult",
    "SweepRow",
    "form_ep",
    "weighted_norm",
    "verify_halfspace",
    "ground_state_potential",
    "ground_state_residual",
    "potential_constant",
    "decomposition_residual",
    "extremal_profile",
    "extremal_u",
    "extremal_sweep",
]

HALF_LINE = IntervalSet([(0.0, math.inf)])


def _gamma(a: float, b: float) -> float:
    if a == 1.0:
        return gamma_ab_quad(a, b, tol=1e-11).value
    return gamma_ab_closed(a, b)


@dataclass(frozen=True)
class WeightProfile:
    """Power weight ``w_β(x) = x_d^β``."""

    beta: float

    def eval(self, x, d: int = 1) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x if d == 1 else x[..., -1]) ** self.beta

    def admissible(self, p: float, alpha: float) -> bool:
        """``β ∈ (-1, α)`` for ``p < 2``; ``β ∈ (-1/(p-1), α/(p-1))`` for ``p >= 2``."""
        if p < 2:
            return -1.0 < self.beta < alpha
        return -1.0 / (p - 1.0) < self.beta < alpha / (p - 1.0)


def _check_support(u: TestFunction, d: int) -> None:
    if u.d != d:
        raise DomainError(f"test function has dimension {u.d}, expected {d}")
    if not float(np.asarray(u.support_box[0])[-1]) > 0.0:
        raise DomainError("support of u must stay at positive distance from the boundary x_d = 0")


def form_ep(u: TestFunction, params: HardyParams, config: EngineConfig = EngineConfig(), epsilon: float = 0.0) -> Estimate:
    """``E_p[u]`` on the half-space; deterministic in d = 1, Monte Carlo otherwise."""
    _check_support(u, params.d)
    if params.d == 1:
        return form_1d(u, HALF_LINE, params.p, params.alpha, epsilon, config)
    return form_mc(u, half_space(params.d), params.p, params.alpha, epsilon, config)


def weighted_norm(u: TestFunction, p: float, alpha: float, config: EngineConfig = EngineConfig()) -> Estimate:
    """``∫_D |u|^p x_d^{-α} dx`` (d = 1 or 2)."""
    if not float(np.asarray(u.support_box[0])[-1]) > 0.0:
        raise DomainError("support of u must lie in x_d > 0")
    if u.d == 1:
        return norm_1d(u, p, lambda x: x ** (-alpha))
    if u.d == 2:
        return norm_nd(u, p, lambda x: x[..., -1] ** (-alpha), config.norm_nodes)
    raise DomainError("weighted_norm supports d <= 2")


def verify_halfspace(u: TestFunction, params: HardyParams, config: EngineConfig = EngineConfig()) -> HardyReport:
    """Check ``E_p[u] >= κ_{d,p,α} ∫ |u|^p x_d^{-α}`` for one test function."""
    lhs = form_ep(u, params, config)
    rhs = weighted_norm(u, params.p, params.alpha, config)
    return HardyReport.build(
        u.name, lhs, rhs, kappa(params.d, params.p, params.alpha), {"d": params.d, "p": params.p, "alpha": params.alpha}
    )


def ground_state_potential(beta: float, alpha: float, x: float, tol: float = 1e-10, rtol: float = 1e-10) -> Estimate:
    """``P.V. ∫_0^∞ (y^β - x^β) |x-y|^{-1-α} dy``; equals ``γ(α,β) x^{β-α}``."""
    if not (-1.0 < beta < alpha):
        raise DomainError(f"beta must lie in (-1, alpha), got {beta}")
    if not x > 0:
        raise DomainError("x must be positive")
    xb = x**beta

    def f(y: float) -> float:
        return (y**beta - xb) * abs(x - y) ** (-1.0 - alpha) if y > 0 else 0.0

    # the symmetric part vanishes like h^{1-α} (even terms only)
    return pv_integral(f, 0.0, math.inf, x, tol=tol, order=1.0 - alpha, rtol=rtol)


def ground_state_residual(beta: float, alpha: float, x: float, config: EngineConfig = EngineConfig()) -> float:
    """Relative residual of the ground-state identity in d = 1."""
    pv = ground_state_potential(beta, alpha, x, tol=min(config.tol, 1e-9), rtol=1e-9)
    target = _gamma(alpha, beta) * x ** (beta - alpha)
    return abs(pv.value - target) / (1.0 + abs(target))


def potential_constant(p: float, alpha: float, beta: float, d: int = 1) -> float:
    """``c_β = -((p-1)γ(α,β) + γ(α,(p-1)β)) / p`` times the angular factor.

    At ``β = (α-1)/p`` this equals ``κ_{d,p,α}``.
    """
    return -((p - 1.0) * _gamma(alpha, beta) + _gamma(alpha, (p - 1.0) * beta)) / p * angular_factor(d, alpha)


@dataclass(frozen=True)
class DecompositionResult:
    """``E_p[u]`` against ``c_β ∫|u|^p x^{-α} + R/p``.

    ``gap`` is the relative difference and ``error`` its combined numerical
    bound (relative to ``lhs``).
    """

    gap: float
    error: float
    lhs: Estimate
    norm: Estimate
    remainder: Estimate
    c_beta: float

    def __float__(self) -> float:
        return self.gap


def decomposition_residual(
    u: TestFunction, params: HardyParams, beta: float, config: EngineConfig = EngineConfig()
) -> DecompositionResult:
    """Relative gap of the decomposition ``E_p = c_β ∫|u|^p x^{-α} + R_β / p`` (d = 1)."""
    if params.d != 1:
        raise DomainError("the decomposition check is implemented for d = 1")
    if not WeightProfile(beta).admissible(params.p, params.alpha):
        raise DomainError(f"beta = {beta} is not admissible for p = {params.p}, alpha = {params.alpha}")
    _check_support(u, 1)
    p, alpha = params.p, params.alpha
    lhs = form_ep(u, params, config)
    norm = weighted_norm(u, p, alpha, config)
    rem = remainder_1d(u, p, alpha, beta, HALF_LINE, config)
    c = potential_constant(p, alpha, beta)
    scale = abs(lhs.value) or 1.0
    gap = abs(lhs.value - c * norm.value - rem.value / p) / scale
    err = (lhs.error + abs(c) * norm.error + rem.error / p) / scale
    return DecompositionResult(gap, err, lhs, norm, rem, c)


# ---------------------------------------------------------------------------
# extremal sequence


@dataclass(frozen=True)
class ExtremalSpec:
    """Index ``n`` and parameters of the extremal function ``u_n = v_n^{2/p} x^β``."""

    n: int
    regime: str
    p: float
    alpha: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("n must be an integer >= 2")
        want = "alpha_ge_1" if self.alpha >= 1 else "alpha_lt_1"
        if self.regime != want:
            raise DomainError(f"regime {self.regime!r} does not match alpha = {self.alpha}")
        HardyParams(1, self.p, self.alpha)

    @classmethod
    def of(cls, n: int, p: float, alpha: float) -> "ExtremalSpec":
        return cls(n, "alpha_ge_1" if alpha >= 1 else "alpha_lt_1", p, alpha)

    @property
    def beta(self) -> float:
        return (self.alpha - 1.0) / self.p

    @property
    def knots(self) -> tuple[float, float, float, float]:
        n = float(self.n)
        if self.regime == "alpha_ge_1":
            return (0.5 / n, 1.0 / n, 1.0, 2.0)
        return (0.5, 1.0, n, 2.0 * n)


def extremal_profile(spec: ExtremalSpec):
    """The one-dimensional profile ``φ`` of ``v_n`` and its derivative.

    ``α >= 1``: ``log(2nt)/log 2`` on ``[1/(2n), 1/n]``, 1 on ``[1/n, 1]``,
    ``2 - t`` on ``[1, 2]``.  ``α < 1``: ``2t - 1`` on ``[1/2, 1]``, 1 on
    ``[1, n]``, ``log(2n/t)/log 2`` on ``[n, 2n]``.  In both cases
    ``|φ'(t)| <= 2/t``.
    """
    t0, t1, t2, t3 = spec.knots
    n = float(spec.n)
    ln2 = math.log(2.0)
    ge = spec.regime == "alpha_ge_1"

    def phi(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            if ge:
                rise = np.log(2.0 * n * t) / ln2
                fall = 2.0 - t
            else:
                rise = 2.0 * t - 1.0
                fall = np.log(2.0 * n / t) / ln2
        out = np.where(t < t1, rise, np.where(t <= t2, 1.0, fall))
        return np.where((t > t0) & (t < t3), np.clip(out, 0.0, 1.0), 0.0)

    def dphi(t):
        t = np.asarray(t, dtype=float)
        if ge:
            rise, fall = 1.0 / (t * ln2), -np.ones_like(t)
        else:
            rise, fall = 2.0 * np.ones_like(t), -1.0 / (t * ln2)
        out = np.where(t < t1, rise, np.where(t <= t2, 0.0, fall))
        return np.where((t > t0) & (t < t3), out, 0.0)

    return phi, dphi


def extremal_u(spec: ExtremalSpec) -> TestFunction:
    """``u_n(t) = φ(t)^{2/p} t^{(α-1)/p}`` (d = 1)."""
    phi, _ = extremal_profile(spec)
    beta, q = spec.beta, 2.0 / spec.p
    t0, t1, t2, t3 = spec.knots

    def ev(t):
        return phi(t) ** q * np.asarray(t, dtype=float) ** beta

    return TestFunction(
        ev,
        (np.array([t0]), np.array([t3])),
        (t0, t1, t2, t3),
        None,
        "extremal",
        f"extremal(n={spec.n},p={spec.p:g},alpha={spec.alpha:g})",
    )


@dataclass(frozen=True)
class SweepRow:
    n: int
    lhs: Estimate
    rhs: Estimate
    ratio: float
    ratio_error: float
    gap: float

    @property
    def gap_log_n(self) -> float:
        return self.gap * math.log(self.n)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lhs": self.lhs.as_dict(),
            "rhs": self.rhs.as_dict(),
            "ratio": {"value": self.ratio, "error": self.ratio_error},
            "gap": {"value": self.gap, "error": self.ratio_error},
            "gap_log_n": {"value": self.gap_log_n, "error": self.ratio_error * math.log(self.n)},
        }


def extremal_sweep(p: float, alpha: float, d: int = 1, n_list=(4, 16, 64, 256, 1024), config: EngineConfig = EngineConfig()):
    """Ratios ``E_p[u_n] / ∫|u_n|^p x^{-α}`` and gaps to ``κ_{1,p,α}`` along ``n_list``."""
    if d != 1:
        raise DomainError("the extremal sweep is implemented for d = 1")
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise DomainError("empty n list")
    params = HardyParams(1, p, alpha)
    k = kappa(1, p, alpha)
    rows = []
    for n in n_list:
        u = extremal_u(ExtremalSpec.of(n, p, alpha))
        rep = verify_halfspace(u, params, config)
        rows.append(SweepRow(n, rep.lhs, rep.rhs, rep.ratio, rep.ratio_error, rep.ratio - k))
    return rows
