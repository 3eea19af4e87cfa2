"""Integration engines.

* ``integrate_1d`` -- adaptive Gauss-Kronrod (QUADPACK) with endpoint
  substitutions for algebraic singularities.
* ``ts_pieces`` -- vectorised, nested tanh-sinh rules on many panels at once.
  Endpoint singularities of any integrable algebraic order are harmless.
* ``pv_integral`` -- Cauchy principal values by symmetric pairing.
* ``double_singular`` -- ``∬ F(x,y) |x-y|^{-d-α}`` with a diagonal
  singularity: deterministic in d = 1, stratified Monte Carlo for d >= 2.
* ``sphere_quad`` -- integrals over S^{d-1} for d <= 3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "Estimate",
    "QuadratureError",
    "DivergenceError",
    "TruncatedKernel",
    "RNG_NAME",
    "make_rng",
    "integrate_1d",
    "ts_rule",
    "ts_pieces",
    "pv_integral",
    "double_singular",
    "pair_samples",
    "stratified_estimate",
    "sphere_quad",
    "sphere_area",
]

DETERMINISTIC = "deterministic"
MONTE_CARLO = "monte_carlo"

RNG_NAME = "philox4x64"


@dataclass(frozen=True)
class Estimate:
    """A numerical value with an error bound (or a standard error for Monte Carlo)."""

    value: float
    error: float
    kind: str = DETERMINISTIC
    n: int = 0

    def __post_init__(self) -> None:
        if not self.error >= 0:
            raise ValueError(f"error must be non-negative, got {self.error}")

    def __add__(self, other: "Estimate") -> "Estimate":
        if not isinstance(other, Estimate):
            return NotImplemented
        kind = MONTE_CARLO if MONTE_CARLO in (self.kind, other.kind) else DETERMINISTIC
        return Estimate(self.value + other.value, self.error + other.error, kind, self.n + other.n)

    def scale(self, c: float) -> "Estimate":
        return Estimate(c * self.value, abs(c) * self.error, self.kind, self.n)

    def as_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "kind": self.kind, "n": self.n}


class QuadratureError(RuntimeError):
    """Error budget could not be met; ``partial`` holds the best estimate found."""

    def __init__(self, message: str, partial: Estimate | None = None):
        super().__init__(message)
        self.partial = partial


class DivergenceError(QuadratureError):
    """The integral does not exist (a singularity fails to cancel or integrate)."""


@dataclass(frozen=True)
class TruncatedKernel:
    """``1{|x-y| > ε} |x-y|^{-d-α}``."""

    epsilon: float
    d: int
    alpha: float

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.d == 1 and x.ndim <= 1:
            r = np.abs(x - y)
        else:
            r = np.linalg.norm(x - y, axis=-1)
        with np.errstate(divide="ignore"):
            k = r ** (-self.d - self.alpha)
        return np.where(r > self.epsilon, k, 0.0)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed))


# ---------------------------------------------------------------------------
# adaptive 1-D quadrature


def _quad(f, a, b, tol, rtol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, epsabs=tol / 4, epsrel=rtol, limit=limit, full_output=1)
    value, err, info = out[0], out[1], out[2]
    return value, err, info["neval"]


def integrate_1d(
    f: Callable[[float], float],
    a: float,
    b: float,
    singular: tuple[bool, bool] = (False, False),
    tol: float = 1e-10,
    rtol: float = 0.0,
    limit: int = 400,
) -> Estimate:
    """Integrate a scalar function over ``(a, b)``; ``b`` may be ``inf``.

    ``singular`` flags endpoints carrying an algebraic singularity of order
    greater than -1.  A flagged finite end is treated with ``t = a + h s^2``
    which halves the singularity order before QUADPACK's extrapolation kicks
    in.

    Raises
    ------
    QuadratureError
        If the reported error exceeds ``max(tol, rtol*|value|)``.
    """
    if not a < b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    left, right = singular
    pieces: list[tuple[Callable, float, float]] = []
    if math.isinf(b) or math.isinf(a):
        if left and not math.isinf(a):
            h = 1.0
            pieces.append((lambda s, a=a, h=h: 2 * h * s * f(a + h * s * s), 0.0, 1.0))
            pieces.append((f, a + 1.0, b))
        else:
            pieces.append((f, a, b))
    else:
        m = 0.5 * (a + b)
        if left:
            h = m - a
            pieces.append((lambda s: 2 * h * s * f(a + h * s * s), 0.0, 1.0))
        else:
            pieces.append((f, a, m))
        if right:
            h = b - m
            pieces.append((lambda s: 2 * h * s * f(b - h * s * s), 0.0, 1.0))
        else:
            pieces.append((f, m, b))
    value = err = 0.0
    neval = 0
    for g, lo, hi in pieces:
        v, e, n = _quad(g, lo, hi, tol / len(pieces), rtol, limit)
        value += v
        err += e
        neval += n
    est = Estimate(value, err, DETERMINISTIC, neval)
    if not math.isfinite(value) or err > max(tol, rtol * abs(value)):
        raise QuadratureError(f"integrate_1d: error {err:.3g} exceeds tolerance {tol:.3g}", est)
    return est


# ---------------------------------------------------------------------------
# tanh-sinh panels


@lru_cache(maxsize=16)
def ts_rule(level: int, tmax: float = 5.0):
    """Nested tanh-sinh rule on (0, 1) with step ``2**-level``.

    Returns ``(s, sc, w, coarse)`` where ``sc = 1 - s`` is formed without
    cancellation and ``coarse`` flags the nodes of the rule one level down.
    At ``tmax = 5`` the outermost nodes sit ~1e-101 from the ends.
    """
    h = 2.0**-level
    k = np.arange(-int(round(tmax / h)), int(round(tmax / h)) + 1)
    t = k * h
    q = 0.5 * math.pi * np.sinh(t)
    s = 1.0 / (1.0 + np.exp(-2.0 * q))
    sc = 1.0 / (1.0 + np.exp(2.0 * q))
    w = h * 0.25 * math.pi * np.cosh(t) / np.cosh(q) ** 2
    coarse = (k % 2) == 0
    for arr in (s, sc, w, coarse):
        arr.setflags(write=False)
    return s, sc, w, coarse


def ts_pieces(f, lo, hi, level: int = 4, log_ratio: float = 4.0):
    """Integrate ``f`` over every panel ``[lo, hi]`` (broadcast arrays).

    Panels with ``0 < lo`` and ``hi/lo > log_ratio`` are mapped
    geometrically, which resolves power-law structure anchored at the origin.
    ``f`` receives node arrays of shape ``lo.shape + (n,)``.

    Returns ``(fine, coarse)`` panel integrals; their difference is a
    (pessimistic) error indicator for ``fine``.
    """
    s, sc, w, coarse = ts_rule(level)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    length = hi - lo
    if math.isfinite(log_ratio):
        use_log = (lo > 0) & (hi > log_ratio * lo)
    else:
        use_log = np.zeros(np.broadcast(lo, hi).shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        lr = np.where(use_log, np.log(np.where(use_log, hi / lo, 2.0)), 0.0)
        left_half = s <= 0.5
        x_lin = np.where(left_half, lo + length * s, hi - length * sc)
        x_log = np.where(left_half, lo * np.exp(s * lr), hi * np.exp(-sc * lr))
    x = np.where(use_log, x_log, x_lin)
    jac = np.where(use_log, x * lr, length)
    with np.errstate(all="ignore"):
        vals = np.asarray(f(x), dtype=float) * jac * w
    bad = ~np.isfinite(vals)
    if bad.any():
        # nodes that rounded onto a panel end; their true weight is negligible
        near_end = np.minimum(s, sc) < 1e-12
        if (bad & ~near_end).any():
            raise QuadratureError("non-finite integrand value inside a panel")
        vals = np.where(bad, 0.0, vals)
    fine = vals.sum(axis=-1)
    crude = 2.0 * vals[..., coarse].sum(axis=-1)
    return fine, crude


# ---------------------------------------------------------------------------
# principal values


def pv_integral(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    x0: float,
    tol: float = 1e-10,
    order: float | None = None,
    rtol: float = 0.0,
) -> Estimate:
    """Cauchy principal value of ``∫_lo^hi f`` around the interior point ``x0``.

    ``f`` is integrable away from ``x0``; near ``x0`` its symmetric part
    ``S(h) = f(x0+h) + f(x0-h)`` must be integrable.  The window
    ``(x0-δ, x0+δ)`` is paired symmetrically and integrated down to
    ``h_c = δ/100``.  The sliver ``(0, h_c)`` is extrapolated from ``S`` at
    ``h_c, 2h_c, 4h_c``: with a known leading exponent ``order`` by Richardson
    in ``h^2`` (``S = h^order (c0 + c1 h^2 + c2 h^4)``), otherwise by a fitted
    power law.
    """
    if not lo < x0 < hi:
        raise ValueError("x0 must be interior")
    if math.isinf(lo) and math.isinf(hi):
        raise ValueError("at least one end must be finite")
    delta = 0.5 * min(x0 - lo, hi - x0)
    h_c = 1e-2 * delta

    def pair(h: float) -> float:
        return f(x0 + h) + f(x0 - h)

    parts = [
        integrate_1d(f, lo, x0 - delta, singular=(True, False), tol=tol / 4, rtol=rtol / 4),
        integrate_1d(f, x0 + delta, hi, singular=(False, math.isfinite(hi)), tol=tol / 4, rtol=rtol / 4),
        integrate_1d(pair, h_c, delta, tol=tol / 4, rtol=rtol / 4),
    ]
    s = [pair(h_c), pair(2 * h_c), pair(4 * h_c)]
    if not all(map(math.isfinite, s)):
        raise DivergenceError("principal value: non-finite symmetric part near x0")
    tail = _pv_tail(s, h_c, order)
    total = parts[0] + parts[1] + parts[2] + tail
    if total.error > max(tol, rtol * abs(total.value)):
        raise QuadratureError(f"principal value error {total.error:.3g} exceeds {tol:.3g}", total)
    return total


def _pv_tail(s, h, order):
    s1, s2, s4 = s
    scale = max(abs(s1), abs(s2), abs(s4))
    if scale == 0.0:
        return Estimate(0.0, 0.0)
    if order is not None:
        if order <= -1.0:
            raise DivergenceError(f"symmetric part of order h^{order} is not integrable")
        # S(h) h^-q = c0 + c1 h^2 + c2 h^4 through the three samples
        t = np.array([1.0, 4.0, 16.0]) * h * h
        rhs = np.array(s) * np.array([1.0, 2.0, 4.0]) ** (-order) * h ** (-order)
        c = np.linalg.solve(np.vander(t, 3, increasing=True), rhs)
        powers = order + 1.0 + 2.0 * np.arange(3)
        terms = c * h**powers / powers
        c_two = np.linalg.solve(np.vander(t[:2], 2, increasing=True), rhs[:2])
        two = float(np.sum(c_two * h ** powers[:2] / powers[:2]))
        value = float(terms.sum())
        return Estimate(value, abs(value - two) + 1e-13 * abs(value))
    if s1 * s2 <= 0 or s2 * s4 <= 0:
        return Estimate(0.0, scale * h)
    q = math.log2(s2 / s1)
    q_far = math.log2(s4 / s2)
    if q <= -1.0 + 1e-3:
        raise DivergenceError(f"principal value diverges: symmetric part ~ h^{q:.3f}")
    value = s1 * h / (q + 1.0)
    far = s1 * h / (q_far + 1.0) if q_far > -1.0 else 2 * value
    return Estimate(value, abs(value - far) + 1e-13 * abs(value))


# ---------------------------------------------------------------------------
# diagonal-singular double integrals


def _merge_points(pts, rel=1e-13):
    pts = np.unique(np.asarray(pts, dtype=float))
    if pts.size < 2:
        return pts
    span = max(abs(pts[0]), abs(pts[-1]), 1.0)
    keep = np.concatenate([[True], np.diff(pts) > rel * span])
    return pts[keep]


def _in_intervals(x, intervals):
    inside = np.zeros(np.shape(x), dtype=bool)
    for a, b in intervals:
        inside |= (x > a) & (x < b)
    return inside


def _pair_profile(F, z, P, order, intervals, hull, level, symmetric):
    """``H(z) = ∫ F(x, x+z) dx`` over ``{x : x, x+z ∈ region}`` for an array ``z``.

    ``order`` is the sorting permutation of ``concat(P, P - z)`` which is
    constant between consecutive kinks.
    """
    A, B = hull
    z = np.asarray(z, dtype=float)[:, None]
    cand = np.concatenate([np.broadcast_to(P, (z.shape[0], P.size)), P[None, :] - z], axis=1)
    cand = cand[:, order]
    ends = np.clip(cand, A, B - z)
    ends = np.concatenate([np.full_like(z, A), ends, B - z], axis=1)
    ends = np.maximum.accumulate(ends, axis=1)
    lo, hi = ends[:, :-1], ends[:, 1:]
    mid = 0.5 * (lo + hi)
    live = (hi > lo) & _in_intervals(mid, intervals) & _in_intervals(mid + z, intervals)
    zz = z[:, :, None]

    def g(x):
        if symmetric:
            return F(x, x + zz)
        return F(x, x + zz) + F(x + zz, x)

    fine, crude = ts_pieces(g, np.where(live, lo, 0.0), np.where(live, hi, 1.0), level)
    fine = np.where(live, fine, 0.0).sum(axis=1)
    crude = np.where(live, crude, 0.0).sum(axis=1)
    if symmetric:
        fine, crude = 2.0 * fine, 2.0 * crude
    return fine, crude


def _order_at(P, z):
    return np.argsort(np.concatenate([P, P - z]), kind="stable")


def double_singular(
    F: Callable,
    region,
    alpha: float,
    d: int = 1,
    breakpoints: Sequence[float] = (),
    symmetric: bool = True,
    epsilon: float = 0.0,
    level: int = 4,
    cut: float = 1e-7,
    samples: int = 1_000_000,
    seed: int = 0,
    strata: int = 32,
    tail_powers: Sequence[float] | None = None,
) -> Estimate:
    """``∬_{R×R, |x-y|>ε} F(x, y) |x-y|^{-d-α} dx dy`` for a diagonal-singular pair integrand.

    ``F(x, y)`` must be ``O(|x-y|^2)`` near the diagonal.

    d = 1
        ``region`` is a list of disjoint intervals.  With ``z = y - x`` the
        integral becomes ``∫ z^{-1-α} H(z) dz`` where ``H`` is smooth between
        the pairwise differences of ``breakpoints``.  Both layers use nested
        tanh-sinh panels; below ``cut`` times the smallest panel length the
        profile ``H`` is extrapolated by a fitted power law, or, when
        ``tail_powers`` lists the exponents of its expansion at ``z = 0``,
        by a least-squares fit of that expansion.
    d >= 2
        ``region`` is a box ``(lo, hi)``, optionally with an ``inside``
        membership callable as third entry.  Stratified Monte Carlo with the
        radial variable importance-sampled from ``r^{1-α}``.
    """
    if d == 1:
        return _double_singular_1d(F, region, alpha, breakpoints, symmetric, epsilon, level, cut, tail_powers)
    return _double_singular_mc(F, region, alpha, d, symmetric, epsilon, samples, seed, strata)


def _double_singular_1d(F, intervals, alpha, breakpoints, symmetric, epsilon, level, cut, tail_powers=None):
    intervals = [(float(a), float(b)) for a, b in intervals]
    if not intervals:
        return Estimate(0.0, 0.0)
    if any(math.isinf(a) or math.isinf(b) for a, b in intervals):
        raise ValueError("double_singular (d=1) needs bounded intervals")
    A = min(a for a, _ in intervals)
    B = max(b for _, b in intervals)
    intervals.sort()
    gaps = [c - b for (_, b), (c, _) in zip(intervals[:-1], intervals[1:])]
    if gaps and min(gaps) > max(epsilon, 0.01 * (B - A)):
        # well separated components: the singular part lives on each diagonal
        # block; off-diagonal blocks are regular and use a product rule
        pts = np.asarray(breakpoints, dtype=float)
        total = Estimate(0.0, 0.0, DETERMINISTIC, 0)
        for k, (a, b) in enumerate(intervals):
            inner = pts[(pts > a) & (pts < b)]
            total = total + _double_singular_1d(F, [(a, b)], alpha, inner, symmetric, epsilon, level, cut, tail_powers)
            for c, e in intervals[k + 1 :]:
                total = total + _cross_block(F, (a, b), (c, e), pts, alpha, level, symmetric)
        return total
    P = _merge_points([A, B, *[e for iv in intervals for e in iv], *breakpoints])
    P = P[(P >= A) & (P <= B)]
    L = B - A
    kinks = _merge_points(np.abs(P[:, None] - P[None, :]).ravel())
    kinks = kinks[kinks > 0]
    # tiny panels would push z0 into the range where u(x) - u(y) is rounding noise
    ell = max(float(np.min(np.diff(P))), 1e-3 * L)
    z0 = max(epsilon, cut * ell)
    if z0 >= L:
        return Estimate(0.0, 0.0, DETERMINISTIC, 0)
    edges = _merge_points([z0, *kinks[(kinks > z0) & (kinks < L)], L])
    value = err = 0.0
    n_nodes = 0
    for zl, zr in zip(edges[:-1], edges[1:]):
        order = _order_at(P, 0.5 * (zl + zr))
        s, sc, w, coarse = ts_rule(level)
        use_log = zr > 4 * zl
        if use_log:
            lr = math.log(zr / zl)
            z = np.where(s <= 0.5, zl * np.exp(s * lr), zr * np.exp(-sc * lr))
            jac = z * lr
        else:
            z = np.where(s <= 0.5, zl + (zr - zl) * s, zr - (zr - zl) * sc)
            jac = np.full_like(z, zr - zl)
        z = np.clip(z, zl, zr)
        Hf, Hc = _pair_profile(F, z, P, order, intervals, (A, B), level, symmetric)
        kz = z ** (-1.0 - alpha) * jac * w
        I_ff = float(np.sum(kz * Hf))
        I_fc = float(np.sum(kz * Hc))
        I_cf = 2.0 * float(np.sum((kz * Hf)[coarse]))
        value += I_ff
        err += abs(I_ff - I_fc) + abs(I_ff - I_cf)
        n_nodes += z.size * (2 * P.size + 1) * w.size
    if epsilon <= 0.0:
        order = _order_at(P, 0.5 * z0)
        if tail_powers:
            zs = z0 * 2.0 ** np.arange(len(tail_powers) + 1)
            H, _ = _pair_profile(F, zs, P, order, intervals, (A, B), level, symmetric)
            tv, te = _series_tail(H, zs, z0, alpha, tail_powers)
        else:
            zs = np.array([z0, 2 * z0, 4 * z0])
            H, _ = _pair_profile(F, zs, P, order, intervals, (A, B), level, symmetric)
            tv, te = _power_tail(H, z0, alpha)
        value += tv
        err += te
    # near the diagonal u(x) - u(y) keeps only ~ z/L of its digits; integrated
    # against z^{-1-α} this rounding floor grows like (L/z0)^{α-1}
    amp = max(math.log(L / z0), (L / z0) ** (alpha - 1.0))
    err += 4.0 * np.finfo(float).eps * amp * abs(value)
    return Estimate(value, err, DETERMINISTIC, n_nodes)


def _cross_block(F, I, K, pts, alpha, level, symmetric):
    """Both orderings of ``∫_I ∫_K F(x, y) |x-y|^{-1-α} dy dx`` for separated ``I < K``."""

    def panels(a, b):
        cuts = np.concatenate([[a], pts[(pts > a) & (pts < b)], [b]])
        return cuts[:-1], cuts[1:]

    xl, xh = panels(*I)
    yl, yh = panels(*K)
    inner_err = np.zeros(1)

    def outer(x):
        xx = x[..., None, None]

        def g(y):
            v = F(xx, y) if symmetric else F(xx, y) + F(y, xx)
            return v * (y - xx) ** (-1.0 - alpha)

        shape = x.shape + yl.shape
        fine, crude = ts_pieces(g, np.broadcast_to(yl, shape), np.broadcast_to(yh, shape), level, log_ratio=np.inf)
        inner_err[0] = float(np.max(np.abs(fine - crude).sum(axis=-1)))
        return fine.sum(axis=-1)

    fine, crude = ts_pieces(outer, xl, xh, level, log_ratio=np.inf)
    factor = 2.0 if symmetric else 1.0
    value = factor * float(fine.sum())
    err = factor * (float(np.abs(fine - crude).sum()) + inner_err[0] * float(np.sum(xh - xl)))
    err += 4.0 * np.finfo(float).eps * abs(value)
    n = xl.size * yl.size * ts_rule(level)[0].size ** 2
    return Estimate(value, err, DETERMINISTIC, n)


def _series_tail(H, zs, z0, alpha, powers):
    """``∫_0^{z0} H(z) z^{-1-α} dz`` for ``H(z) = Σ c_k z^{e_k}`` with known exponents.

    The coefficients are fitted on ``zs[:-1]`` and on ``zs[1:]``; the change
    between the two fits is the error.
    """
    H = np.asarray(H, dtype=float)
    e = np.asarray(powers, dtype=float)
    if np.any(e <= alpha):
        raise DivergenceError(f"pair integrand exponents {powers} are not integrable against order {alpha}")
    # work in u = z / z0 so the system is well scaled
    u = zs / z0
    vals = []
    for sl in (slice(0, -1), slice(1, None)):
        M = u[sl, None] ** e[None, :]
        c = np.linalg.solve(M, H[sl])
        vals.append(float(np.sum(c / (e - alpha))) * z0 ** (-alpha))
    return vals[0], abs(vals[0] - vals[1]) + 1e-12 * abs(vals[0])


def _power_tail(H, z0, alpha):
    """``∫_0^{z0} H(z) z^{-1-α} dz`` from ``H`` sampled at ``z0, 2z0, 4z0``."""
    h1, h2, h4 = (float(v) for v in H)
    scale = max(abs(h1), abs(h2), abs(h4))
    if scale == 0.0:
        return 0.0, 0.0
    if h1 * h2 <= 0 or h2 * h4 <= 0:
        q = q_far = 2.0
    else:
        q = math.log2(h2 / h1)
        q_far = math.log2(h4 / h2)
    if q - alpha < 0.05:
        raise DivergenceError(
            f"pair integrand ~ |x-y|^{q:.3f} near the diagonal is not integrable against order {alpha}"
        )
    tv = h1 * z0 ** (-alpha) / (q - alpha)
    tf = h1 * z0 ** (-alpha) / (q_far - alpha) if q_far - alpha > 0.05 else 2 * tv
    return tv, abs(tv - tf) + 1e-12 * abs(tv)


# ---------------------------------------------------------------------------
# Monte Carlo machinery (d >= 2)


def sphere_area(d: int) -> float:
    """Surface measure of S^{d-1}."""
    return 2.0 * math.pi ** (0.5 * d) / math.gamma(0.5 * d)


@dataclass
class PairSamples:
    """Stratified samples ``x ~ U(box)``, ``ω ~ U(S^{d-1})``, ``r ~ r^{1-α}`` on ``(0, R)``."""

    x: np.ndarray
    omega: np.ndarray
    r: np.ndarray
    stratum: np.ndarray
    strata: int
    volume: float
    radius: float
    alpha: float
    d: int
    seed: int
    meta: dict = field(default_factory=dict)

    @property
    def y(self) -> np.ndarray:
        return self.x + self.r[:, None] * self.omega

    @property
    def radial_weight(self) -> np.ndarray:
        """``|box| |S^{d-1}| r^{-1-α} / pdf(r)``; multiply by the pair integrand."""
        a = self.alpha
        pdf = (2.0 - a) * self.r ** (1.0 - a) / self.radius ** (2.0 - a)
        return self.volume * sphere_area(self.d) * self.r ** (-1.0 - a) / pdf

    @property
    def angular_weight(self) -> float:
        return self.volume * sphere_area(self.d)


def pair_samples(box, alpha: float, samples: int, seed: int, strata: int = 32, radius=None) -> PairSamples:
    """Draw stratified pair samples; strata split the first coordinate of the box."""
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    d = lo.size
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    per = max(samples // strata, 2)
    n = per * strata
    rng = make_rng(seed)
    u = rng.random((n, d))
    stratum = np.repeat(np.arange(strata), per)
    u[:, 0] = (stratum + u[:, 0]) / strata
    x = lo + (hi - lo) * u
    g = rng.standard_normal((n, d))
    omega = g / np.linalg.norm(g, axis=1, keepdims=True)
    R = float(np.linalg.norm(hi - lo)) if radius is None else float(radius)
    r = R * rng.random(n) ** (1.0 / (2.0 - alpha))
    return PairSamples(x, omega, r, stratum, strata, float(np.prod(hi - lo)), R, alpha, d, seed)


def stratified_estimate(values: np.ndarray, stratum: np.ndarray, strata: int) -> Estimate:
    """Mean over equal-probability strata with the stratified standard error."""
    values = np.asarray(values, dtype=float)
    counts = np.bincount(stratum, minlength=strata)
    sums = np.bincount(stratum, weights=values, minlength=strata)
    sq = np.bincount(stratum, weights=values * values, minlength=strata)
    means = sums / counts
    var = np.maximum(sq / counts - means**2, 0.0) * counts / np.maximum(counts - 1, 1)
    value = float(means.mean())
    se = float(math.sqrt(np.sum(var / counts)) / strata)
    return Estimate(value, se, MONTE_CARLO, int(values.size))


def _double_singular_mc(F, region, alpha, d, symmetric, epsilon, samples, seed, strata):
    lo, hi = np.asarray(region[0], float), np.asarray(region[1], float)
    inside = region[2] if len(region) > 2 else None
    if lo.size != d:
        raise ValueError("box dimension does not match d")
    ps = pair_samples((lo, hi), alpha, samples, seed, strata)
    x, y = ps.x, ps.y
    ok = np.all((y > lo) & (y < hi), axis=1) & (ps.r > epsilon)
    if inside is not None:
        ok &= inside(x) & inside(y)
    vals = F(x, y) if symmetric else 0.5 * (F(x, y) + F(y, x))
    vals = np.where(ok, vals * ps.radial_weight, 0.0)
    return stratified_estimate(vals, ps.stratum, ps.strata)


# ---------------------------------------------------------------------------
# sphere quadrature


def sphere_quad(
    g: Callable[[np.ndarray], np.ndarray],
    d: int,
    tol: float = 1e-10,
    breaks: Sequence[float] = (),
    max_level: int = 7,
    rtol: float = 0.0,
) -> Estimate:
    """``∫_{S^{d-1}} g(ω) dω`` for d in {1, 2, 3}.

    ``g`` maps an ``(n, d)`` array of unit vectors to ``n`` values.  Arcs are
    split where ``ω_d = 0`` (and, for d = 2, at the extra polar angles in
    ``breaks``) so that algebraic singularities sit at panel ends.
    """
    if d == 1:
        vals = np.asarray(g(np.array([[1.0], [-1.0]])), dtype=float)
        return Estimate(float(vals.sum()), 0.0, DETERMINISTIC, 2)
    if d == 2:
        cuts = np.unique(np.mod(np.concatenate([[0.0, math.pi], np.asarray(breaks, float)]), 2 * math.pi))
        lo = cuts
        hi = np.append(cuts[1:], cuts[0] + 2 * math.pi)

        def fd2(theta):
            om = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
            return np.asarray(g(om.reshape(-1, 2)), float).reshape(theta.shape)

        prev = None
        for level in range(3, max_level + 1):
            fine, crude = ts_pieces(fd2, lo, hi, level, log_ratio=np.inf)
            val = float(fine.sum())
            err = float(abs(fine.sum() - crude.sum()))
            if prev is not None:
                err = min(err, abs(val - prev))
            if err <= max(tol, rtol * abs(val)):
                return Estimate(val, err, DETERMINISTIC, int(lo.size * ts_rule(level)[0].size))
            prev = val
        raise QuadratureError("sphere_quad (d=2) did not converge", Estimate(val, err))
    if d == 3:
        prev = None
        for level in range(3, max_level + 1):
            m = 16 * 2 ** (level - 3)
            phi = 2 * math.pi * np.arange(m) / m

            def fd3(mu):
                st = np.sqrt(np.clip(1 - mu * mu, 0, None))[..., None]
                om = np.stack(
                    np.broadcast_arrays(st * np.cos(phi), st * np.sin(phi), mu[..., None]), axis=-1
                )
                vals = np.asarray(g(om.reshape(-1, 3)), float).reshape(om.shape[:-1])
                return vals.mean(axis=-1) * 2 * math.pi

            fine, crude = ts_pieces(fd3, np.array([-1.0, 0.0]), np.array([0.0, 1.0]), level, log_ratio=np.inf)
            val = float(fine.sum())
            err = float(abs(fine.sum() - crude.sum()))
            if prev is not None:
                err = min(err, abs(val - prev))
            if err <= max(tol, rtol * abs(val)):
                return Estimate(val, err, DETERMINISTIC, int(2 * m * ts_rule(level)[0].size))
            prev = val
        raise QuadratureError("sphere_quad (d=3) did not converge", Estimate(val, err))
    raise ValueError(f"sphere_quad supports d in {{1, 2, 3}}, got {d}")
