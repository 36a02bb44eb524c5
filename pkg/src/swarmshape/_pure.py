"""Vectorized numpy batch kernels; the fallback when the compiled extension
is unavailable.

Same call signatures as ``_kernel``.  Positions are absolute; the shape sits
at centre ``(cx, cy)``, encoded via ``shapes.shape_code``.  ``dirs`` holds one
unit fallback direction per agent, used only for rows exactly at the centre.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import COINCIDENCE_EPS
from .shapes import (
    CODE_CIRCLE,
    CODE_ELLIPSE,
    CODE_LINE,
    CODE_SQUARE,
    ELLIPSE_DISTANCE_TOL,
)

_QUARTER_PI = math.pi / 4.0
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

NAME = "python"


def _golden_iters(tol: float) -> int:
    w = math.pi / 2.0
    n = 0
    while w > tol:
        w *= _INV_PHI
        n += 1
    return n


#: Fixed golden-section iteration count; the compiled kernel derives the same
#: number the same way, so both backends evaluate the same bracket sequence.
GOLDEN_ITERS = _golden_iters(ELLIPSE_DISTANCE_TOL)


def _targets_rel(rel: np.ndarray, dirs: np.ndarray, code: int, s0: float, s1: float) -> np.ndarray:
    """Shape targets in the centre frame, one row per agent."""
    if code == CODE_LINE:
        m, c = s0, s1
        x, y = rel[:, 0], rel[:, 1]
        denom = 1.0 + m * m
        return np.stack(
            [(x + m * y - m * c) / denom, (m * x + m * m * y + c) / denom], axis=1
        )

    x = rel[:, 0].copy()
    y = rel[:, 1].copy()
    deg = (x == 0.0) & (y == 0.0)
    if deg.any():
        x[deg] = dirs[deg, 0]
        y[deg] = dirs[deg, 1]

    if code in (CODE_ELLIPSE, CODE_CIRCLE):
        a = s0
        b = s1 if code == CODE_ELLIPSE else s0
        t = np.arctan2(a * y, b * x)
        return np.stack([a * np.cos(t), b * np.sin(t)], axis=1)

    if code == CODE_SQUARE:
        a = s0
        phi = np.arctan2(y, x)
        out = np.empty_like(rel)
        right = (phi >= -_QUARTER_PI) & (phi < _QUARTER_PI)
        top = (phi >= _QUARTER_PI) & (phi < 3.0 * _QUARTER_PI)
        bottom = (phi >= -3.0 * _QUARTER_PI) & (phi < -_QUARTER_PI)
        left = ~(right | top | bottom)
        out[right, 0] = a
        out[right, 1] = a * y[right] / x[right]
        out[top, 0] = a * x[top] / y[top]
        out[top, 1] = a
        out[bottom, 0] = -a * x[bottom] / y[bottom]
        out[bottom, 1] = -a
        out[left, 0] = -a
        out[left, 1] = -a * y[left] / x[left]
        return out

    raise ValueError(f"unknown shape code {code}")


def shape_targets(
    P: np.ndarray,
    dirs: np.ndarray,
    code: int,
    s0: float,
    s1: float,
    cx: float,
    cy: float,
) -> np.ndarray:
    """Absolute-frame shape targets for every agent."""
    center = np.array([cx, cy])
    return _targets_rel(P - center, dirs, code, s0, s1) + center


def shape_distances(
    P: np.ndarray, code: int, s0: float, s1: float, cx: float, cy: float
) -> np.ndarray:
    """Exact distance from every agent to the shape."""
    rel = P - np.array([cx, cy])
    x, y = rel[:, 0], rel[:, 1]

    if code == CODE_LINE:
        m, c = s0, s1
        return np.abs(y - m * x - c) / math.sqrt(1.0 + m * m)

    if code == CODE_CIRCLE:
        return np.abs(np.sqrt(x * x + y * y) - s0)

    if code == CODE_SQUARE:
        a = s0
        u = np.maximum(np.abs(x), np.abs(y))
        v = np.minimum(np.abs(x), np.abs(y))
        inside = u <= a
        beside = (~inside) & (v <= a)
        corner = ~(inside | beside)
        out = np.empty_like(u)
        out[inside] = a - u[inside]
        out[beside] = u[beside] - a
        out[corner] = np.sqrt(
            (u[corner] - a) ** 2 + (v[corner] - a) ** 2
        )
        return out

    if code == CODE_ELLIPSE:
        a, b = s0, s1
        px = np.abs(x)
        py = np.abs(y)

        def f(t):
            dx = a * np.cos(t) - px
            dy = b * np.sin(t) - py
            return dx * dx + dy * dy

        lo = np.zeros_like(px)
        hi = np.full_like(px, math.pi / 2.0)
        c = hi - _INV_PHI * (hi - lo)
        d = lo + _INV_PHI * (hi - lo)
        fc, fd = f(c), f(d)
        for _ in range(GOLDEN_ITERS - 1):
            upd = fc < fd
            hi = np.where(upd, d, hi)
            lo = np.where(upd, lo, c)
            span = hi - lo
            cn = hi - _INV_PHI * span
            dn = lo + _INV_PHI * span
            fcn, fdn = f(cn), f(dn)
            c, d = np.where(upd, cn, d), np.where(upd, c, dn)
            fc, fd = np.where(upd, fcn, fd), np.where(upd, fc, fdn)
        upd = fc < fd
        hi = np.where(upd, d, hi)
        lo = np.where(upd, lo, c)
        return np.sqrt(f(0.5 * (lo + hi)))

    raise ValueError(f"unknown shape code {code}")


def velocity_field(
    P: np.ndarray,
    dirs: np.ndarray,
    k1: float,
    k2: float,
    sigma: float,
    beta: float,
    r: float,
    code: int,
    s0: float,
    s1: float,
    cx: float,
    cy: float,
) -> tuple[np.ndarray, int]:
    """Steering velocities for all agents plus the coincident-pair count.

    Coincidences (nearest-neighbour pairs closer than ``COINCIDENCE_EPS``,
    whose repulsion direction is undefined and therefore dropped) are only
    detected when ``r > 0``; with repulsion disabled the term never runs.
    """
    m = P.shape[0]
    s2 = sigma * sigma

    diff = P[None, :, :] - P[:, None, :]  # diff[i, j] = x_j - x_i
    d2 = (diff**2).sum(axis=2)
    w = (s2 + d2) ** (-beta)
    v = k1 * (w[:, :, None] * diff).sum(axis=1)  # diagonal contributes 0

    targets = shape_targets(P, dirs, code, s0, s1, cx, cy)
    tdiff = targets - P
    td2 = (tdiff**2).sum(axis=1)
    v += k2 * tdiff / ((s2 + td2) ** beta)[:, None]

    events = 0
    if m >= 2 and r > 0.0:
        d2nn = d2.copy()
        np.fill_diagonal(d2nn, np.inf)
        nn = d2nn.argmin(axis=1)
        away = P - P[nn]
        dn = np.sqrt((away**2).sum(axis=1))
        ok = dn >= COINCIDENCE_EPS
        events = int(m - np.count_nonzero(ok))
        v[ok] += r * away[ok] / dn[ok, None]
    return v, events
