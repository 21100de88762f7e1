"""Adaptive composite Simpson quadrature.

The integrand is called with a 1-D array of abscissae and must return an
array of the same length.  All panels that still need refinement are bisected
together, one level at a time, so an expensive vectorised integrand (matrix
evolution plus eigendecomposition) is called once per level rather than once
per node.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import QuadratureError

ABS_TOL = 1e-10
MAX_PANELS = 1 << 20
MIN_WIDTH = 1e-13

Integrand = Callable[[np.ndarray], np.ndarray]


def _segment_panels(points: np.ndarray, panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    widths = np.diff(points)
    span = points[-1] - points[0]
    counts = np.maximum(1, np.ceil(panels * widths / span).astype(int))
    a, b, seg = [], [], []
    for i, (lo, hi, n) in enumerate(zip(points[:-1], points[1:], counts)):
        edges = np.linspace(lo, hi, n + 1)
        a.append(edges[:-1])
        b.append(edges[1:])
        seg.append(np.full(n, i))
    return np.concatenate(a), np.concatenate(b), np.concatenate(seg)


def segment_integrals(
    f: Integrand,
    points,
    tol: float = ABS_TOL,
    panels: int = 64,
    max_panels: int = MAX_PANELS,
) -> np.ndarray:
    """Integrals of ``f`` over each consecutive interval of ``points``.

    ``panels`` initial panels are spread over the whole range (at least one per
    interval) and each is refined until the Simpson error estimate falls below
    its share of ``tol``, proportional to its width.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 1 or points.size < 2:
        raise ValueError("need at least two integration points")
    if np.any(np.diff(points) <= 0):
        raise ValueError("integration points must be strictly increasing")
    span = points[-1] - points[0]
    a, b, seg = _segment_panels(points, panels)
    m = 0.5 * (a + b)
    vals = np.asarray(f(np.concatenate([a, m, b])), dtype=float)
    n = a.size
    fa, fm, fb = vals[:n], vals[n : 2 * n], vals[2 * n :]
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = tol * (b - a) / span

    result = np.zeros(points.size - 1)
    used = n
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        fv = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        k = a.size
        flm, frm = fv[:k], fv[k:]
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = left + right - whole
        if not np.all(np.isfinite(err)):
            raise QuadratureError("integrand returned non-finite values")
        done = (np.abs(err) <= 15.0 * eps) | ((b - a) <= MIN_WIDTH * max(span, 1.0))
        np.add.at(result, seg[done], (left + right + err / 15.0)[done])
        keep = ~done
        used += int(np.count_nonzero(keep))
        if used > max_panels:
            raise QuadratureError(f"adaptive Simpson exceeded {max_panels} panels")
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb = fa[keep], fm[keep], fb[keep]
        flm, frm = flm[keep], frm[keep]
        left, right, seg, eps = left[keep], right[keep], seg[keep], eps[keep]
        # children: [a, m] and [m, b]
        a, m, b, fa, fm, fb, whole, seg, eps = (
            np.concatenate([a, m]),
            np.concatenate([lm[keep], rm[keep]]),
            np.concatenate([m, b]),
            np.concatenate([fa, fm]),
            np.concatenate([flm, frm]),
            np.concatenate([fm, fb]),
            np.concatenate([left, right]),
            np.concatenate([seg, seg]),
            np.concatenate([eps, eps]) * 0.5,
        )
    return result


def adaptive_simpson(f: Integrand, a: float, b: float, tol: float = ABS_TOL, panels: int = 16, max_panels: int = MAX_PANELS) -> float:
    """Integral of ``f`` over ``[a, b]`` to absolute tolerance ``tol``."""
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, panels, max_panels)
    return float(segment_integrals(f, [a, b], tol, panels, max_panels)[0])


def cumulative_integrals(f: Integrand, points, tol: float = ABS_TOL, panels: int = 64, max_panels: int = MAX_PANELS) -> np.ndarray:
    """Integrals of ``f`` from ``points[0]`` to each point (first entry is 0)."""
    seg = segment_integrals(f, points, tol, panels, max_panels)
    return np.concatenate([[0.0], np.cumsum(seg)])
