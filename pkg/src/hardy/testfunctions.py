"""Compactly supported test functions with the metadata the engines need.

A ``TestFunction`` carries its support box and, in one dimension, every point
where it fails to be smooth.  The quadrature rules put panel ends exactly on
those points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TestFunction",
    "hat",
    "bump",
    "plateau",
    "wave",
    "product",
    "radial_bump",
    "box_bump",
    "random_battery",
    "random_battery_2d",
]


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Vectorised real function with compact support.

    Attributes
    ----------
    eval : callable
        Maps an array of points (shape ``(...,)`` for d = 1, ``(..., d)``
        otherwise) to values.  It is only called inside ``support_box``.
    support_box : (lo, hi)
        Closed box containing the support.
    breakpoints : tuple of float
        d = 1 only: support ends and interior kinks / non-smooth points.
    lipschitz_hint : float or None
        Upper bound on ``|∇u|``, if known.
    kind, name : str
        Family and a human-readable label.
    disk : (center, radius) or None
        Set for radially supported functions in d >= 2.
    """

    __test__ = False  # not a pytest class

    eval: Callable[[np.ndarray], np.ndarray]
    support_box: tuple[np.ndarray, np.ndarray]
    breakpoints: tuple[float, ...] = ()
    lipschitz_hint: float | None = None
    kind: str = "custom"
    name: str = "u"
    disk: tuple[np.ndarray, float] | None = field(default=None)

    @property
    def d(self) -> int:
        return int(np.size(self.support_box[0]))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = (np.asarray(v, dtype=float) for v in self.support_box)
        if self.d == 1:
            inside = (x > lo[0]) & (x < hi[0])
            xs = np.where(inside, x, 0.5 * (lo[0] + hi[0]))
        else:
            inside = np.all((x > lo) & (x < hi), axis=-1)
            xs = np.where(inside[..., None], x, 0.5 * (lo + hi))
        with np.errstate(all="ignore"):
            vals = np.asarray(self.eval(xs), dtype=float)
        return np.where(inside, vals, 0.0)

    def scaled(self, c: float) -> "TestFunction":
        """``x ↦ u(x / c)`` (support stretched by ``c > 0``)."""
        if c <= 0:
            raise ValueError("scale must be positive")
        lo, hi = (np.asarray(v, dtype=float) for v in self.support_box)
        lip = None if self.lipschitz_hint is None else self.lipschitz_hint / c
        disk = None if self.disk is None else (c * np.asarray(self.disk[0]), c * self.disk[1])
        return TestFunction(
            lambda x: self.eval(np.asarray(x) / c),
            (c * lo, c * hi),
            tuple(c * b for b in self.breakpoints),
            lip,
            self.kind,
            f"{self.name}@x{c:g}",
            disk,
        )

    def times(self, k: float) -> "TestFunction":
        """``k u``."""
        lip = None if self.lipschitz_hint is None else abs(k) * self.lipschitz_hint
        return TestFunction(
            lambda x: k * self.eval(x), self.support_box, self.breakpoints, lip, self.kind, f"{k:g}*{self.name}", self.disk
        )

    def shifted(self, s) -> "TestFunction":
        """``x ↦ u(x - s)``."""
        s_arr = np.asarray(s, dtype=float)
        lo, hi = (np.asarray(v, dtype=float) for v in self.support_box)
        disk = None if self.disk is None else (np.asarray(self.disk[0]) + s_arr, self.disk[1])
        bps = tuple(b + float(s_arr) for b in self.breakpoints) if self.d == 1 else ()
        return TestFunction(
            lambda x: self.eval(np.asarray(x) - s_arr),
            (lo + s_arr, hi + s_arr),
            bps,
            self.lipschitz_hint,
            self.kind,
            f"{self.name}+{s}",
            disk,
        )


def _box1(a, b):
    return (np.array([float(a)]), np.array([float(b)]))


def hat(c: float, r: float, height: float = 1.0) -> TestFunction:
    """Piecewise-linear tent on ``[c-r, c+r]``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return TestFunction(
        lambda x: height * (1.0 - np.abs(x - c) / r),
        _box1(c - r, c + r),
        (c - r, c, c + r),
        abs(height) / r,
        "hat",
        f"hat({c:g},{r:g})",
    )


def bump(c: float, r: float, k: int = 2, height: float = 1.0) -> TestFunction:
    """``height (1 - ((x-c)/r)^2)^k`` on ``[c-r, c+r]``."""
    if r <= 0 or k < 1:
        raise ValueError("need r > 0 and k >= 1")
    # max of |d/dx (1-s^2)^k| over s in [-1, 1]
    s = 1.0 / math.sqrt(2 * k - 1) if k > 1 else 1.0
    lip = abs(height) * 2 * k * s * (1 - s * s) ** (k - 1) / r
    return TestFunction(
        lambda x: height * (1.0 - ((x - c) / r) ** 2) ** k,
        _box1(c - r, c + r),
        (c - r, c + r),
        lip,
        "bump",
        f"bump({c:g},{r:g},{k})",
    )


def plateau(a: float, b: float, ramp: float, height: float = 1.0) -> TestFunction:
    """Trapezoid: linear ramps of width ``ramp`` at both ends of ``[a, b]``."""
    if not (ramp > 0 and b - a > 2 * ramp):
        raise ValueError("need b - a > 2 ramp > 0")

    def fn(x):
        return height * np.minimum(1.0, np.minimum(x - a, b - x) / ramp)

    return TestFunction(
        fn, _box1(a, b), (a, a + ramp, b - ramp, b), abs(height) / ramp, "plateau", f"plateau({a:g},{b:g},{ramp:g})"
    )


def wave(c: float, r: float, m: int, height: float = 1.0) -> TestFunction:
    """Sign-changing ``(1 - s^2)^2 sin(mπ(s+1)/2)`` with ``s = (x-c)/r``."""
    if r <= 0 or m < 1:
        raise ValueError("need r > 0 and m >= 1")

    def fn(x):
        s = (x - c) / r
        return height * (1.0 - s * s) ** 2 * np.sin(0.5 * m * math.pi * (s + 1.0))

    lip = abs(height) * (2.0 + 0.5 * m * math.pi) / r
    # sign changes are kinks of |u|^p
    zeros = tuple(c - r + 2.0 * r * j / m for j in range(m + 1))
    return TestFunction(fn, _box1(c - r, c + r), zeros, lip, "wave", f"wave({c:g},{r:g},{m})")


def product(f: TestFunction, g: TestFunction) -> TestFunction:
    """Pointwise product of two one-dimensional test functions."""
    if f.d != 1 or g.d != 1:
        raise ValueError("product is defined for d = 1")
    lo = max(float(f.support_box[0][0]), float(g.support_box[0][0]))
    hi = min(float(f.support_box[1][0]), float(g.support_box[1][0]))
    if not lo < hi:
        raise ValueError("supports do not overlap")
    bps = sorted({lo, hi, *(b for b in (*f.breakpoints, *g.breakpoints) if lo < b < hi)})
    lip = None
    if f.lipschitz_hint is not None and g.lipschitz_hint is not None:
        # crude: sup|f| sup|g'| + sup|g| sup|f'| with sup over the support
        xs = np.linspace(lo, hi, 2001)
        lip = float(np.max(np.abs(f(xs)))) * g.lipschitz_hint + float(np.max(np.abs(g(xs)))) * f.lipschitz_hint
    return TestFunction(
        lambda x: f(x) * g(x), _box1(lo, hi), tuple(bps), lip, "product", f"{f.name}*{g.name}"
    )


def radial_bump(center, r: float, k: int = 2, height: float = 1.0) -> TestFunction:
    """``height (1 - |x-c|^2/r^2)_+^k`` in any dimension."""
    c = np.asarray(center, dtype=float)
    if r <= 0:
        raise ValueError("radius must be positive")

    def fn(x):
        q = np.sum((x - c) ** 2, axis=-1) / (r * r)
        return height * np.clip(1.0 - q, 0.0, None) ** k

    s = 1.0 / math.sqrt(2 * k - 1) if k > 1 else 1.0
    lip = abs(height) * 2 * k * s * (1 - s * s) ** (k - 1) / r
    return TestFunction(fn, (c - r, c + r), (), lip, "radial", f"radial({c.tolist()},{r:g})", (c, r))


def box_bump(lo, hi, k: int = 2) -> TestFunction:
    """Tensor product of one-dimensional bumps filling the box ``[lo, hi]``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def fn(x):
        s = (x - c) / h
        return np.prod(np.clip(1.0 - s * s, 0.0, None) ** k, axis=-1)

    return TestFunction(fn, (lo, hi), (), None, "box", f"box({lo.tolist()},{hi.tolist()})")


def random_battery(n: int, seed: int, window: tuple[float, float], families: Sequence[str] | None = None):
    """``n`` seeded one-dimensional test functions supported inside ``window``.

    Families cycle through hats, bumps, plateaus, waves and products; centres,
    radii and heights are drawn from a Philox stream keyed by ``seed``.
    """
    from .quadrature import make_rng

    a, b = (float(v) for v in window)
    if not a < b:
        raise ValueError("empty window")
    rng = make_rng(seed)
    fams = list(families or ("hat", "bump", "plateau", "wave", "product"))
    out: list[TestFunction] = []
    for i in range(n):
        fam = fams[i % len(fams)]
        # support [c - r, c + r] inside the window, not too thin
        width = b - a
        r = width * rng.uniform(0.08, 0.45)
        c = rng.uniform(a + r, b - r)
        h = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        if fam == "hat":
            f = hat(c, r, h)
        elif fam == "bump":
            f = bump(c, r, int(rng.integers(1, 4)), h)
        elif fam == "plateau":
            f = plateau(c - r, c + r, r * rng.uniform(0.15, 0.45), h)
        elif fam == "wave":
            f = wave(c, r, int(rng.integers(1, 4)), h)
        elif fam == "product":
            shift = r * rng.uniform(-0.5, 0.5)
            f = product(bump(c, r, 1, h), hat(c + shift, r))
        else:
            raise ValueError(f"unknown family {fam!r}")
        out.append(f)
    return out


def random_battery_2d(n: int, seed: int, box: tuple[Sequence[float], Sequence[float]], inside=None):
    """``n`` seeded radial bumps with support inside ``box`` (and ``inside``, if given)."""
    from .quadrature import make_rng

    lo, hi = (np.asarray(v, dtype=float) for v in box)
    rng = make_rng(seed)
    out = []
    while len(out) < n:
        r = float(np.min(hi - lo)) * rng.uniform(0.1, 0.45)
        c = rng.uniform(lo + r, hi - r)
        if inside is not None:
            ang = np.linspace(0, 2 * math.pi, 64, endpoint=False)
            ring = c + r * np.stack([np.cos(ang), np.sin(ang)], -1)
            if not np.all(inside(ring)):
                continue
        out.append(radial_bump(c, r, int(rng.integers(1, 4)), rng.uniform(0.5, 2.0)))
    return out
