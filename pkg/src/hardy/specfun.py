"""Gamma/Beta with analytic continuation and the closed-form Hardy constants.

Negative arguments go through a (log|Γ|, sign) pair so that poles of Γ are
represented exactly (``1/Γ = 0``) and large intermediate values never
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .quadrature import Estimate, integrate_1d

__all__ = [
    "DomainError",
    "HardyParams",
    "GammaPair",
    "gamma_pair",
    "reciprocal_gamma",
    "beta_c",
    "gamma_ab_closed",
    "gamma_ab_quad",
    "angular_factor",
    "kappa_bd",
    "kappa",
    "a_const",
    "per_t_objective",
]


class DomainError(ValueError):
    """Argument outside the domain of a special function or constant."""


@dataclass(frozen=True)
class HardyParams:
    """Dimension ``d``, integrability exponent ``p`` and kernel order ``alpha``."""

    d: int
    p: float
    alpha: float

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        if not (1.0 < self.p < math.inf):
            raise DomainError(f"p must lie in (1, inf), got {self.p!r}")
        if not (0.0 < self.alpha < 2.0):
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha!r}")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def beta(self) -> float:
        """Optimal ground-state exponent (alpha - 1)/p."""
        return (self.alpha - 1.0) / self.p

    @property
    def beta_conj(self) -> float:
        return (self.p - 1.0) * (self.alpha - 1.0) / self.p

    def conj(self) -> "HardyParams":
        return HardyParams(self.d, self.p_conj, self.alpha)


class GammaPair(NamedTuple):
    """``Γ(x) = sign * exp(log_abs)``; ``sign == 0`` marks a pole."""

    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return math.inf
        return self.sign * math.exp(self.log_abs)


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    # argument reduction keeps sin(pi x) accurate near the integers
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def gamma_pair(x: float) -> GammaPair:
    """Return ``(log|Γ(x)|, sgn Γ(x))`` using reflection for ``x < 1/2``."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"non-finite argument {x!r}")
    if _is_pole(x):
        return GammaPair(math.inf, 0)
    if x >= 0.5:
        return GammaPair(math.lgamma(x), 1)
    # Γ(x) Γ(1-x) = π / sin(πx)
    s = _sinpi(x)
    log_abs = math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x)
    return GammaPair(log_abs, 1 if s > 0 else -1)


def reciprocal_gamma(x: float) -> float:
    """Entire function ``1/Γ(x)``; exactly zero at ``0, -1, -2, ...``."""
    g = gamma_pair(x)
    if g.sign == 0:
        return 0.0
    return g.sign * math.exp(-g.log_abs)


def beta_c(x: float, y: float) -> float:
    """Euler Beta ``Γ(x)Γ(y)/Γ(x+y)`` continued to negative non-integer arguments."""
    if _is_pole(x) or _is_pole(y):
        raise DomainError(f"B({x}, {y}) is undefined at non-positive integers")
    gx, gy, gxy = gamma_pair(x), gamma_pair(y), gamma_pair(x + y)
    if gxy.sign == 0:
        return 0.0
    return gx.sign * gy.sign * gxy.sign * math.exp(gx.log_abs + gy.log_abs - gxy.log_abs)


def gamma_ab_closed(a: float, b: float) -> float:
    """Closed form of γ(a, b) = B(b+1, -a) + B(a-b, -a) + 1/a, valid for a ≠ 1."""
    if a == 1.0:
        raise DomainError("closed form of gamma(a, b) is singular at a = 1; use gamma_ab_quad")
    if not (0.0 < a < 2.0):
        raise DomainError(f"a must lie in (0, 2), got {a}")
    if not (-1.0 < b < a):
        raise DomainError(f"b must lie in (-1, a), got {b}")
    if b == 0.0 or b == a - 1.0:
        # the integrand vanishes identically
        return 0.0
    return beta_c(b + 1.0, -a) + beta_c(a - b, -a) + 1.0 / a


def _pow_minus_one(log_t: float, e: float) -> float:
    # t**e - 1 without cancellation
    return math.expm1(e * log_t)


def gamma_ab_quad(a: float, b: float, tol: float = 1e-10) -> Estimate:
    """γ(a, b) by quadrature of its defining integral over (0, 1).

    The integrand behaves like ``(1-t)**(1-a)`` at ``t = 1`` and like
    ``t**min(b, a-b-1, 0)`` at ``t = 0``.  The interval is split at 1/2; on the
    right half the integrand is written in ``s = 1 - t`` so that both factors
    of the numerator are formed without cancellation.
    """
    if not (0.0 < a < 2.0):
        raise DomainError(f"a must lie in (0, 2), got {a}")
    if not (-1.0 < b < a):
        raise DomainError(f"b must lie in (-1, a), got {b}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = a - b - 1.0

    def left(t: float) -> float:
        if t <= 0.0:
            return 0.0
        lt = math.log(t)
        return -_pow_minus_one(lt, b) * _pow_minus_one(lt, c) / (1.0 - t) ** (1.0 + a)

    def right(s: float) -> float:
        if s <= 0.0:
            return 0.0
        lt = math.log1p(-s)
        return -_pow_minus_one(lt, b) * _pow_minus_one(lt, c) * s ** (-1.0 - a)

    lo = integrate_1d(left, 0.0, 0.5, singular=(True, False), tol=tol / 2)
    hi = integrate_1d(right, 0.0, 0.5, singular=(True, False), tol=tol / 2)
    return lo + hi


def angular_factor(d: int, alpha: float) -> float:
    """``π^{(d-1)/2} Γ((1+α)/2) / Γ((α+d)/2)``; half the sphere integral of ``|ω_d|^α``."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if d == 1:
        return 1.0
    return math.exp(
        0.5 * (d - 1) * math.log(math.pi)
        + math.lgamma(0.5 * (1.0 + alpha))
        - math.lgamma(0.5 * (alpha + d))
    )


def kappa_bd(d: int, alpha: float) -> float:
    """Sharp constant of the quadratic (p = 2) half-space Hardy inequality."""
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    bracket = beta_c(0.5 * (1.0 + alpha), 0.5 * (2.0 - alpha)) - 2.0**alpha
    return angular_factor(d, alpha) * bracket / (alpha * 2.0**alpha)


def kappa(d: int, p: float, alpha: float) -> float:
    """Sharp constant κ_{d,p,α} of the Sobolev-Bregman half-space Hardy inequality.

    At ``alpha == 1`` the value is the limit, 0.
    """
    HardyParams(d, p, alpha)
    if alpha == 1.0:
        return 0.0
    beta = (alpha - 1.0) / p
    return -angular_factor(d, alpha) * gamma_ab_closed(alpha, beta)


def a_const(d: int, alpha: float) -> float:
    """Normalisation ``2^α Γ((d+α)/2) / (π^{d/2} |Γ(-α/2)|)`` of the fractional Laplacian."""
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    g = gamma_pair(-0.5 * alpha)
    return math.exp(
        alpha * math.log(2.0)
        + math.lgamma(0.5 * (d + alpha))
        - 0.5 * d * math.log(math.pi)
        - g.log_abs
    )


def per_t_objective(beta: float, t: float, p: float, alpha: float) -> float:
    """Numerator ``(p-1)(t^β-1)(1-t^{α-β-1}) + (t^{(p-1)β}-1)(1-t^{α-(p-1)β-1})``.

    For fixed ``t`` in (0, 1) this is convex in ``beta`` and minimal at
    ``beta = (alpha-1)/p``.
    """
    lt = math.log(t)
    q = (p - 1.0) * beta
    first = -(p - 1.0) * math.expm1(beta * lt) * math.expm1((alpha - beta - 1.0) * lt)
    second = -math.expm1(q * lt) * math.expm1((alpha - q - 1.0) * lt)
    return first + second
