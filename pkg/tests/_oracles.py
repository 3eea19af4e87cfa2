"""Independent reference computations used by the tests.

The outer integrals use scipy's QUADPACK (with algebraic end weights); the
inner ones a geometrically graded composite Gauss-Legendre rule.  Neither
shares code or nodes with the package's tanh-sinh engines.
"""

import math
import warnings

import numpy as np
from scipy import integrate


def _quad(f, a, b, points=None, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if points is not None and not (math.isinf(a) or math.isinf(b)):
            pts = sorted({float(p) for p in points if a < p < b})
            return integrate.quad(f, a, b, points=pts or None, limit=400, **kw)[0]
        return integrate.quad(f, a, b, limit=400, **kw)[0]


_XG, _WG = np.polynomial.legendre.leggauss(24)


def _graded_cells(a, b, ratio=0.15, depth=24):
    """Cells of ``[a, b]`` refined geometrically toward both ends."""
    m = 0.5 * (a + b)
    h = m - a
    cuts = h * ratio ** np.arange(depth + 1)
    left = np.concatenate([[a], a + cuts[::-1]])
    right = np.concatenate([b - cuts, [b]])
    return np.concatenate([left, right[1:]])


def graded_quad(f, points):
    """``∫ f`` over ``[points[0], points[-1]]``, smooth between consecutive points
    up to algebraic end singularities.  ``f`` is vectorised."""
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        if b - a <= 0:
            continue
        e = _graded_cells(a, b)
        lo, hi = e[:-1], e[1:]
        x = 0.5 * (lo + hi)[:, None] + 0.5 * (hi - lo)[:, None] * _XG[None, :]
        total += float(np.sum(0.5 * (hi - lo)[:, None] * _WG[None, :] * f(x)))
    return total


def _in_vec(x, intervals):
    out = np.zeros(x.shape, dtype=bool)
    for a, b in intervals:
        out |= (x > a) & (x < b)
    return out


def _in(x, intervals):
    return any(a < x < b for a, b in intervals)


def pair_n(p, ux, uy):
    sp = lambda v: math.copysign(abs(v) ** (p - 1), v) if v else 0.0
    return (ux - uy) * (sp(ux) - sp(uy))


def form_1d_oracle(u, intervals, p, alpha, epsabs=1e-12):
    """``E_p[u]`` on a union of intervals as ``∫_0^∞ z^{-1-α} H(z) dz`` with
    ``H(z) = ∫ N(u(x), u(x+z)) 1_J(x) 1_J(x+z) dx``.

    Rounding in ``u(x) - u(x+z)`` at tiny ``z`` limits this to about 1e-8
    relative accuracy.
    """
    s0, s1 = float(u.support_box[0][0]), float(u.support_box[1][0])
    bps = list(u.breakpoints)
    ends = [e for iv in intervals for e in iv if math.isfinite(e)]

    sp = lambda v: np.sign(v) * np.abs(v) ** (p - 1)

    def H(z):
        lo, hi = s0 - z, s1
        pts = bps + [b - z for b in bps] + ends + [e - z for e in ends]
        pts = np.unique(np.clip(np.array(pts + [lo, hi]), lo, hi))

        def g(x):
            ux, uy = u(x), u(x + z)
            live = _in_vec(x, intervals) & _in_vec(x + z, intervals)
            return np.where(live, (ux - uy) * (sp(ux) - sp(uy)), 0.0)

        return graded_quad(g, pts)

    L = s1 - s0
    kinks = sorted({abs(a - b) for a in bps + ends for b in bps + ends if abs(a - b) > 1e-14})
    edges = [0.0] + kinks + [math.inf]
    # H(z) = O(z^2) near 0 (zeros of u add a z^{p+1} term), so H / z^2 is bounded
    z1 = edges[1]

    def h(z):
        z = max(z, 1e-9 * z1)
        return H(z) / (z * z)

    near = _quad(h, 0.0, z1, weight="alg", wvar=(1.0 - alpha, 0.0), epsabs=epsabs)
    far = 0.0
    for a, b in zip(edges[1:-1], edges[2:]):
        far += _quad(lambda z: H(z) * z ** (-1.0 - alpha), a, b, epsabs=epsabs)
    return near + far


def weighted_norm_oracle(u, p, weight, extra_points=()):
    s0, s1 = float(u.support_box[0][0]), float(u.support_box[1][0])
    f = lambda x: abs(float(u(np.array([x]))[0])) ** p * weight(x)
    return _quad(f, s0, s1, list(u.breakpoints) + list(extra_points), epsabs=1e-13, epsrel=1e-12)


def hat_form_p2_exact(c, r, A, B, alpha, dps=40):
    """``E_2`` of the hat ``max(0, 1 - |x-c|/r)`` on ``(A, B)`` in extended precision.

    ``H(z)`` is a piecewise cubic in ``z`` with breaks at the pairwise
    differences of ``{A, c-r, c, c+r, B}``; each piece is recovered exactly
    from four samples and integrated against ``z^{-1-α}`` in closed form.
    """
    import mpmath as mp

    with mp.workdps(dps):
        c, r, A, B, a = (mp.mpf(v) for v in (c, r, A, B, alpha))
        bps = [A, c - r, c, c + r, B]
        u = lambda x: max(1 - abs(x - c) / r, mp.mpf(0))
        g3 = mp.sqrt(mp.mpf(3) / 5)
        xs, ws = [-g3, mp.mpf(0), g3], [mp.mpf(5) / 9, mp.mpf(8) / 9, mp.mpf(5) / 9]

        def H(z):
            # piecewise quadratic in x: three-point Gauss is exact on each piece
            pts = sorted({A, B - z, *[b for b in bps if A <= b <= B - z], *[b - z for b in bps if A <= b - z <= B - z]})
            t = mp.mpf(0)
            for lo, hi in zip(pts[:-1], pts[1:]):
                for xg, wg in zip(xs, ws):
                    x = (lo + hi) / 2 + (hi - lo) / 2 * xg
                    t += wg * (hi - lo) / 2 * (u(x) - u(x + z)) ** 2
            return t

        ks = []
        for k in sorted({abs(p - q) for p in bps for q in bps if p != q}):
            if k < B - A and (not ks or k - ks[-1] > mp.mpf(10) ** (-dps + 10)):
                ks.append(k)
        edges = [mp.mpf(0), *ks, B - A]
        total = mp.mpf(0)
        for lo, hi in zip(edges[:-1], edges[1:]):
            zs = [lo + (hi - lo) * mp.mpf(k + 1) / 5 for k in range(4)]
            V = mp.matrix([[z**j for j in range(4)] for z in zs])
            coef = mp.lu_solve(V, mp.matrix([H(z) for z in zs]))
            for j in range(4):
                if lo == 0 and j < 2:
                    continue  # H(0) = H'(0) = 0
                e = j - a
                total += coef[j] * (hi**e - (lo**e if lo > 0 else 0)) / e
        return float(total)
