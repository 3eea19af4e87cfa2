"""Domains with closed-form ray distances.

Points are arrays of shape ``(..., d)``; directions likewise (unit vectors).
``dir_dist`` is the two-sided distance ``min{|t| : x + tω ∉ Ω}`` along the
full line through ``x``; ``ray_exit`` is the one-sided (forward) one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .quadrature import sphere_quad, ts_pieces

__all__ = [
    "OutsideError",
    "ConvexBody",
    "Interval",
    "Box",
    "Ball",
    "Polytope",
    "IntervalSet",
    "half_space",
    "parse_body",
]


class OutsideError(ValueError):
    """A point that must be interior is not."""


def _pts(x, d):
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {x.shape}")
    return x


class ConvexBody:
    """Base class; subclasses implement ``ray_exit``, ``contains`` and ``dist_boundary``."""

    d: int

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def ray_exit(self, x, omega) -> np.ndarray:
        raise NotImplementedError

    def dist_boundary(self, x) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def kink_angles(self, x, radius: float = 0.0) -> list[float]:
        """d = 2: polar angles at which ``ω ↦ ray_exit(x, ω)`` has a kink or equals ``radius``."""
        return []

    def _check_inside(self, x):
        if not np.all(self.contains(x)):
            raise OutsideError("point(s) outside the open body")

    def dir_dist(self, x, omega) -> np.ndarray:
        x = _pts(x, self.d)
        self._check_inside(x)
        omega = _pts(omega, self.d)
        return np.minimum(self.ray_exit(x, omega), self.ray_exit(x, -omega))

    def inv_dist_sphere(self, x, alpha: float) -> np.ndarray:
        """``∫_{S^{d-1}} d_{ω}(x)^{-α} dω`` for each point."""
        x = _pts(x, self.d)
        self._check_inside(x)
        flat = x.reshape(-1, self.d)
        out = np.empty(flat.shape[0])
        for i, xi in enumerate(flat):
            est = sphere_quad(
                lambda om: np.minimum(self.ray_exit(xi, om), self.ray_exit(xi, -om)) ** (-alpha),
                self.d,
                tol=0.0,
                rtol=1e-7,
                max_level=9,
            )
            out[i] = est.value
        return out.reshape(x.shape[:-1])


@dataclass(frozen=True)
class Interval(ConvexBody):
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("empty interval")

    d = 1

    def contains(self, x):
        x = _pts(x, 1)[..., 0]
        return (x > self.a) & (x < self.b)

    def ray_exit(self, x, omega):
        x = _pts(x, 1)[..., 0]
        om = _pts(omega, 1)[..., 0]
        with np.errstate(divide="ignore"):
            return np.where(om > 0, (self.b - x) / np.where(om > 0, om, 1), (x - self.a) / np.where(om < 0, -om, 1))

    def dist_boundary(self, x):
        x = _pts(x, 1)
        self._check_inside(x)
        x = x[..., 0]
        return np.minimum(x - self.a, self.b - x)

    def inv_dist_sphere(self, x, alpha):
        # both directions see the same two-sided distance
        return 2.0 * self.dist_boundary(x) ** (-alpha)

    def bounding_box(self):
        return np.array([self.a]), np.array([self.b])

    def as_interval_set(self) -> "IntervalSet":
        return IntervalSet([(self.a, self.b)])


@dataclass(frozen=True, eq=False)
class Polytope(ConvexBody):
    """Intersection of open half-spaces ``n_i · x < c_i`` (normals are normalised)."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        n = np.atleast_2d(np.asarray(self.normals, dtype=float))
        c = np.asarray(self.offsets, dtype=float).ravel()
        norm = np.linalg.norm(n, axis=1)
        if np.any(norm == 0) or n.shape[0] != c.size:
            raise ValueError("bad half-space description")
        object.__setattr__(self, "normals", n / norm[:, None])
        object.__setattr__(self, "offsets", c / norm)

    @property
    def d(self) -> int:
        return self.normals.shape[1]

    def _heights(self, x):
        return self.offsets - _pts(x, self.d) @ self.normals.T

    def contains(self, x):
        return np.all(self._heights(x) > 0, axis=-1)

    def ray_exit(self, x, omega):
        h = self._heights(x)
        rate = _pts(omega, self.d) @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(rate > 0, h / np.where(rate > 0, rate, 1.0), np.inf)
        return t.min(axis=-1)

    def dist_boundary(self, x):
        x = _pts(x, self.d)
        self._check_inside(x)
        return self._heights(x).min(axis=-1)

    def bounding_box(self):
        from scipy.optimize import linprog

        lo, hi = np.empty(self.d), np.empty(self.d)
        for k in range(self.d):
            c = np.zeros(self.d)
            c[k] = 1.0
            r1 = linprog(c, A_ub=self.normals, b_ub=self.offsets, bounds=[(None, None)] * self.d)
            r2 = linprog(-c, A_ub=self.normals, b_ub=self.offsets, bounds=[(None, None)] * self.d)
            lo[k] = r1.x[k] if r1.status == 0 else -np.inf
            hi[k] = r2.x[k] if r2.status == 0 else np.inf
        return lo, hi

    def kink_angles(self, x, radius: float = 0.0) -> list[float]:
        if self.d != 2:
            return []
        x = np.asarray(x, dtype=float)
        h = self._heights(x)
        out = []
        n = self.normals
        # vertices: pairwise line intersections that satisfy every constraint
        for i in range(len(n)):
            for j in range(i + 1, len(n)):
                m = np.array([n[i], n[j]])
                if abs(np.linalg.det(m)) < 1e-14:
                    continue
                v = np.linalg.solve(m, h[[i, j]])
                if np.all(v @ n.T <= h + 1e-12 * (1 + np.abs(h))):
                    out.append(math.atan2(v[1], v[0]))
        # points of each edge line at distance ``radius``
        for ni, hi in zip(n, h):
            if 0 < hi < radius:
                phi = math.atan2(ni[1], ni[0])
                dphi = math.acos(hi / radius)
                out += [phi - dphi, phi + dphi]
        return out

    def inv_dist_sphere(self, x, alpha):
        if self.d != 2:
            return super().inv_dist_sphere(x, alpha)
        x = _pts(x, 2)
        self._check_inside(x)
        return _polygon_inv_dist(self.normals, self._heights(x), alpha)


def _cos_power_primitive(psi, alpha):
    """``∫_0^ψ cos(t)^α dt`` for ψ in [-π/2, π/2]."""
    a, b = 0.5, 0.5 * (alpha + 1.0)
    full = 0.5 * special.beta(a, b)
    return np.sign(psi) * full * special.betainc(a, b, np.sin(psi) ** 2)


def _polygon_inv_dist(normals, heights, alpha):
    """``∫_{S^1} (max_i |n_i·ω| / h_i)^α dω`` exactly, piecewise in closed form.

    ``1/d_ω = max_i |n_i·ω|/h_i`` for a polygon, so on each arc between the
    switching angles the integrand is ``(|cos(θ-φ_i)| / h_i)^α``.
    """
    shp = heights.shape[:-1]
    h = heights.reshape(-1, normals.shape[0])
    npts, m = h.shape
    phi = np.arctan2(normals[:, 1], normals[:, 0])
    # vectors m_i = n_i / h_i; switches where (m_i ± m_j) ⊥ ω and where m_i ⊥ ω
    mv = normals[None, :, :] / h[:, :, None]
    cand = [np.mod(phi + 0.5 * np.pi, np.pi)[None, :].repeat(npts, 0)]
    for i in range(m):
        for j in range(i + 1, m):
            for sgn in (1.0, -1.0):
                v = mv[:, i] - sgn * mv[:, j]
                cand.append(np.mod(np.arctan2(v[:, 1], v[:, 0]) + 0.5 * np.pi, np.pi)[:, None])
    th = np.sort(np.concatenate([np.zeros((npts, 1)), *cand, np.full((npts, 1), np.pi)], axis=1), axis=1)
    lo, hi = th[:, :-1], th[:, 1:]
    mid = 0.5 * (lo + hi)
    om = np.stack([np.cos(mid), np.sin(mid)], axis=-1)
    score = np.abs(np.einsum("pkd,pmd->pkm", om, mv))
    best = np.argmax(score, axis=-1)
    hb = np.take_along_axis(h, best, axis=1)
    pb = phi[best]
    # shift so that the arc lies inside (-π/2, π/2) around the chosen normal
    psi_mid = np.mod(mid - pb + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    half = 0.5 * (hi - lo)
    p1 = np.clip(psi_mid - half, -0.5 * np.pi, 0.5 * np.pi)
    p2 = np.clip(psi_mid + half, -0.5 * np.pi, 0.5 * np.pi)
    arcs = (_cos_power_primitive(p2, alpha) - _cos_power_primitive(p1, alpha)) * hb ** (-alpha)
    # θ ∈ [0, π) covers half the circle; d_ω is even in ω
    return (2.0 * arcs.sum(axis=1)).reshape(shp)


@dataclass(frozen=True, eq=False)
class Box(ConvexBody):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("box needs lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return self.lo.size

    def contains(self, x):
        x = _pts(x, self.d)
        return np.all((x > self.lo) & (x < self.hi), axis=-1)

    def ray_exit(self, x, omega):
        x = _pts(x, self.d)
        om = _pts(omega, self.d)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(om > 0, (self.hi - x) / om, np.where(om < 0, (self.lo - x) / om, np.inf))
        return t.min(axis=-1)

    def dist_boundary(self, x):
        x = _pts(x, self.d)
        self._check_inside(x)
        return np.minimum(x - self.lo, self.hi - x).min(axis=-1)

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def as_polytope(self) -> Polytope:
        eye = np.eye(self.d)
        return Polytope(np.vstack([eye, -eye]), np.concatenate([self.hi, -self.lo]))

    def kink_angles(self, x, radius: float = 0.0) -> list[float]:
        return self.as_polytope().kink_angles(x, radius)

    def inv_dist_sphere(self, x, alpha):
        if self.d == 2:
            return self.as_polytope().inv_dist_sphere(x, alpha)
        if self.d == 1:
            return 2.0 * self.dist_boundary(x) ** (-alpha)
        return super().inv_dist_sphere(x, alpha)


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", c)

    @property
    def d(self) -> int:
        return self.center.size

    def contains(self, x):
        x = _pts(x, self.d)
        return np.linalg.norm(x - self.center, axis=-1) < self.radius

    def ray_exit(self, x, omega):
        x = _pts(x, self.d) - self.center
        om = _pts(omega, self.d)
        b = np.sum(x * om, axis=-1)
        c = np.sum(x * x, axis=-1) - self.radius**2
        # NaN where the line misses the ball (only possible for outside points)
        with np.errstate(invalid="ignore"):
            return -b + np.sqrt(b * b - c)

    def dist_boundary(self, x):
        x = _pts(x, self.d)
        self._check_inside(x)
        return self.radius - np.linalg.norm(x - self.center, axis=-1)

    def kink_angles(self, x, radius: float = 0.0) -> list[float]:
        if self.d != 2 or radius <= 0:
            return []
        v = np.asarray(x, dtype=float) - self.center
        rho = float(np.linalg.norm(v))
        # |v + r ω| = R  <=>  ω · v = (R² - ρ² - r²) / (2r)
        if rho == 0:
            return []
        cos_psi = (self.radius**2 - rho**2 - radius**2) / (2 * radius * rho)
        if abs(cos_psi) >= 1:
            return []
        phi, dphi = math.atan2(v[1], v[0]), math.acos(cos_psi)
        return [phi - dphi, phi + dphi]

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def inv_dist_sphere(self, x, alpha, level: int = 4):
        # 1/d_ω = (sqrt(R² - ρ² sin²ψ) + ρ|cos ψ|) / (R² - ρ²), ψ = angle(ω, x - c)
        x = _pts(x, self.d)
        self._check_inside(x)
        rho = np.linalg.norm(x - self.center, axis=-1)
        R = self.radius
        d = self.d
        if d == 1:
            return 2.0 * (R - rho) ** (-alpha)
        r = rho[..., None, None]

        def f(psi):
            s, c = np.sin(psi), np.cos(psi)
            inv = (np.sqrt(R * R - (r * s) ** 2) + r * np.abs(c)) / (R * R - r * r)
            return inv**alpha * s ** (d - 2)

        lo = np.broadcast_to(np.array([0.0, 0.5 * np.pi]), rho.shape + (2,))
        hi = np.broadcast_to(np.array([0.5 * np.pi, np.pi]), rho.shape + (2,))
        fine, _ = ts_pieces(f, lo, hi, level, log_ratio=np.inf)
        area_sub = 2.0 * math.pi ** (0.5 * (d - 1)) / math.gamma(0.5 * (d - 1))
        return area_sub * fine.sum(axis=-1)


def half_space(d: int) -> Polytope:
    """``{x : x_d > 0}`` as a one-face polytope."""
    n = np.zeros((1, d))
    n[0, -1] = -1.0
    return Polytope(n, np.zeros(1))


class IntervalSet:
    """Finite union of disjoint open intervals (ends may be infinite)."""

    def __init__(self, intervals: Sequence[tuple[float, float]]):
        ivs = sorted((float(a), float(b)) for a, b in intervals)
        for (a, b), (c, _) in zip(ivs, ivs[1:]):
            if b > c:
                raise ValueError("intervals overlap")
        if any(a >= b for a, b in ivs):
            raise ValueError("empty interval")
        self.intervals = ivs

    def __repr__(self):
        return f"IntervalSet({self.intervals})"

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (x > a) & (x < b)
        return out

    def dist_boundary(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        for a, b in self.intervals:
            inside = (x > a) & (x < b)
            out = np.where(inside, np.minimum(x - a, b - x), out)
        return out

    def kinks(self) -> list[float]:
        """Finite endpoints and the midpoints where ``dist`` switches side."""
        pts = []
        for a, b in self.intervals:
            pts += [v for v in (a, b) if math.isfinite(v)]
            if math.isfinite(a) and math.isfinite(b):
                pts.append(0.5 * (a + b))
        return pts

    def clip(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Intersection with ``[lo, hi]``."""
        out = []
        for a, b in self.intervals:
            l, r = max(a, lo), min(b, hi)
            if l < r:
                out.append((l, r))
        return out

    def outside(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Parts of the set lying outside ``[lo, hi]``."""
        out = []
        for a, b in self.intervals:
            if a < lo:
                out.append((a, min(b, lo)))
            if b > hi:
                out.append((max(a, hi), b))
        return [(a, b) for a, b in out if a < b]

    def scaled(self, c: float) -> "IntervalSet":
        return IntervalSet([(c * a, c * b) for a, b in self.intervals])


def parse_body(text: str) -> ConvexBody:
    """Parse ``kind@numbers``: ``interval@a,b``, ``box@x0,y0,x1,y1``,
    ``ball@cx,cy,R`` or ``polytope@nx,ny,c;nx,ny,c;...``."""
    kind, _, rest = text.partition("@")
    kind = kind.strip().lower()
    try:
        if kind == "interval":
            a, b = (float(v) for v in rest.split(","))
            return Interval(a, b)
        if kind == "box":
            vals = [float(v) for v in rest.split(",")]
            k = len(vals) // 2
            if len(vals) != 2 * k or k == 0:
                raise ValueError
            return Box(vals[:k], vals[k:])
        if kind == "ball":
            vals = [float(v) for v in rest.split(",")]
            return Ball(vals[:-1], vals[-1])
        if kind == "polytope":
            rows = [[float(v) for v in r.split(",")] for r in rest.split(";") if r.strip()]
            arr = np.array(rows)
            return Polytope(arr[:, :-1], arr[:, -1])
    except (ValueError, IndexError) as exc:
        raise ValueError(f"cannot parse body {text!r}") from exc
    raise ValueError(f"unknown body kind {kind!r}")
