"""The Bregman divergence of ``|·|^p`` and its two-sided comparability with
``(b^{<p/2>} - a^{<p/2>})^2``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

__all__ = [
    "signed_pow",
    "bregman_f",
    "bregman_naive",
    "comparability_ratio",
    "ComparabilityScan",
    "comparability_scan",
]

# below this |b/a - 1| the brackets are summed as binomial series
SERIES_CUTOFF = 0.05
_SERIES_TERMS = 22
# beyond this b/a the definition is used directly (no cancellation there)
_RATIO_MAX = 1e6


def signed_pow(a, k: float):
    """``a^{<k>} = |a|^k sgn(a)``; ``0^{<k>} = 0`` for ``k > 0``.

    Raises
    ------
    ValueError
        If some ``a == 0`` while ``k <= 0``.
    """
    a = np.asarray(a, dtype=float)
    if k <= 0 and np.any(a == 0):
        raise ValueError("0^<k> is undefined for k <= 0")
    out = np.sign(a) * np.abs(a) ** k
    return out if out.ndim else float(out)


def bregman_naive(p: float, a, b):
    """``|b|^p - |a|^p - p a^{<p-1>} (b - a)`` as written (cancels badly near ``a = b``)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.abs(b) ** p - np.abs(a) ** p - p * np.sign(a) * np.abs(a) ** (p - 1) * (b - a)


def _binom_tail(q: float, r, start: int):
    """``Σ_{k>=start} C(q, k) r^k`` for small ``|r|``."""
    out = np.zeros_like(r)
    rk = r**start
    for k in range(start, start + _SERIES_TERMS):
        out = out + special.binom(q, k) * rk
        rk = rk * r
    return out


def _ratio_r(a, b):
    zero = a == 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = np.where(zero, 0.0, (b - a) / np.where(zero, 1.0, a))
    return zero, r


def bregman_f(p: float, a, b):
    """Bregman divergence ``F_p(a, b)`` of ``|·|^p``, evaluated stably.

    With ``r = (b - a)/a``, ``F_p(a, b) = |a|^p ((1+r)^p - 1 - p r)`` for
    ``1 + r > 0``.  The bracket is summed as ``Σ_{k>=2} C(p, k) r^k`` when
    ``|r| < 0.05`` and formed with ``expm1``/``log1p`` otherwise.  When
    ``a`` and ``b`` have opposite signs, or ``|b| >> |a|``, nothing cancels
    and the definition is used.  Vectorised over ``a`` and ``b``.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    zero, r = _ratio_r(a, b)
    same = (1.0 + r > 0) & (r < _RATIO_MAX)
    small = np.abs(r) < SERIES_CUTOFF
    rs = np.where(same, r, 0.0)
    with np.errstate(all="ignore"):
        direct = np.expm1(p * np.log1p(rs)) - p * rs
        series = _binom_tail(p, np.where(small, r, 0.0), 2)
        bracket = np.where(small, series, direct)
        same_val = np.abs(a) ** p * np.maximum(bracket, 0.0)
        other = bregman_naive(p, a, b)
    out = np.where(zero, np.abs(b) ** p, np.where(same, same_val, other))
    return out if out.ndim else float(out)


def _half_pow_gap(p, a, b):
    """``b^{<p/2>} - a^{<p/2>}`` without cancellation."""
    zero, r = _ratio_r(a, b)
    q = 0.5 * p
    same = (1.0 + r > 0) & (r < _RATIO_MAX)
    small = np.abs(r) < SERIES_CUTOFF
    rs = np.where(same, r, 0.0)
    with np.errstate(all="ignore"):
        bracket = np.where(small, _binom_tail(q, np.where(small, r, 0.0), 1), np.expm1(q * np.log1p(rs)))
        same_val = np.sign(a) * np.abs(a) ** q * bracket
        other = np.sign(b) * np.abs(b) ** q - np.sign(a) * np.abs(a) ** q
    return np.where(zero, np.sign(b) * np.abs(b) ** q, np.where(same, same_val, other))


def comparability_ratio(p: float, a, b):
    """``F_p(a, b) / (b^{<p/2>} - a^{<p/2>})^2``; at ``a = b`` its limit ``2(p-1)/p``."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    den = _half_pow_gap(p, a, b) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = bregman_f(p, a, b) / den
    out = np.where(a == b, 2.0 * (p - 1.0) / p, ratio)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ComparabilityScan:
    """Empirical bracket ``c_lower <= F_p(a,b)/(b^{<p/2>}-a^{<p/2>})^2 <= c_upper``."""

    p: float
    c_lower: float
    c_upper: float
    grid_spec: str
    argmin: tuple[float, float]
    argmax: tuple[float, float]


def comparability_scan(p: float, grid=10_000, polish: bool = True) -> ComparabilityScan:
    """Extremes of the comparability ratio over a sample set.

    Parameters
    ----------
    p : float
        Exponent, ``p > 1``.
    grid : int or (a, b) arrays
        An integer ``n`` scans ``n`` equally spaced directions on the unit
        circle of the ``(a, b)`` plane (the ratio is 0-homogeneous).
        Otherwise the given points are scanned; pairs with ``a == b`` are
        skipped.
    polish : bool
        For circle scans, refine both extremes with a bounded 1-D search
        around the best grid direction.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    circle = np.ndim(grid) == 0
    if circle:
        n = int(grid)
        if n < 3:
            raise ValueError("need at least 3 directions")
        # offset by half a step so that a == b is never sampled
        theta = (np.arange(n) + 0.5) * 2.0 * math.pi / n + 0.25 * math.pi
        a, b = np.cos(theta), np.sin(theta)
        spec = f"unit circle, {n} directions"
    else:
        a, b = (np.asarray(v, dtype=float).ravel() for v in grid)
        keep = a != b
        if not keep.any():
            raise ValueError("degenerate grid: every sample has a == b")
        a, b = a[keep], b[keep]
        spec = f"{a.size} explicit points"
    vals = comparability_ratio(p, a, b)
    out = {}
    for name, sign in (("min", 1.0), ("max", -1.0)):
        i = int(np.argmin(sign * vals))
        best, where = float(vals[i]), (float(a[i]), float(b[i]))
        if circle and polish:
            step = 2.0 * math.pi / a.size
            res = optimize.minimize_scalar(
                lambda t: sign * comparability_ratio(p, math.cos(t), math.sin(t)),
                bounds=(theta[i] - step, theta[i] + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if res.fun < sign * best:
                best, where = sign * float(res.fun), (math.cos(res.x), math.sin(res.x))
        out[name] = (best, where)
    return ComparabilityScan(p, out["min"][0], out["max"][0], spec, out["min"][1], out["max"][1])
