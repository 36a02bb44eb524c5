# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batch kernels; same call signatures and semantics as ``_pure``.

Scalar C loops instead of numpy broadcasting, so the O(M^2) field evaluation
has no temporaries.  Each function is deterministic: identical inputs give
bit-identical outputs.  Results agree with the numpy backend only to
rounding (summation order differs), which is why runs never mix backends.
"""

from libc.math cimport M_PI, atan2, cos, fabs, pow, sin, sqrt

import numpy as np

NAME = "compiled"

# Must match dynamics.COINCIDENCE_EPS and shapes.ELLIPSE_DISTANCE_TOL; a
# backend test pins them together.
COINCIDENCE_EPS = 1e-9
ELLIPSE_TOL = 1e-10

cdef double _EPS = COINCIDENCE_EPS
cdef double QUARTER_PI = M_PI / 4.0
cdef double HALF_PI = M_PI / 2.0
cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0

cdef int CODE_LINE = 0
cdef int CODE_ELLIPSE = 1
cdef int CODE_CIRCLE = 2
cdef int CODE_SQUARE = 3


def _golden_iters(double tol):
    # same derivation as the numpy backend, so both run the same bracket count
    cdef double w = HALF_PI
    cdef int n = 0
    while w > tol:
        w *= INV_PHI
        n += 1
    return n


GOLDEN_ITERS = _golden_iters(ELLIPSE_TOL)
cdef int _GOLDEN_ITERS_C = GOLDEN_ITERS


cdef inline void _target_rel(
    double x, double y, double dx_fb, double dy_fb,
    int code, double s0, double s1, double* tx, double* ty
) noexcept:
    """Shape target in the centre frame for one agent."""
    cdef double m, c, denom, a, b, t, phi
    if code == CODE_LINE:
        m = s0
        c = s1
        denom = 1.0 + m * m
        tx[0] = (x + m * y - m * c) / denom
        ty[0] = (m * x + m * m * y + c) / denom
        return
    if x == 0.0 and y == 0.0:
        x = dx_fb
        y = dy_fb
    if code == CODE_ELLIPSE or code == CODE_CIRCLE:
        a = s0
        b = s1 if code == CODE_ELLIPSE else s0
        t = atan2(a * y, b * x)
        tx[0] = a * cos(t)
        ty[0] = b * sin(t)
        return
    # square
    a = s0
    phi = atan2(y, x)
    if -QUARTER_PI <= phi < QUARTER_PI:
        tx[0] = a
        ty[0] = a * y / x
    elif QUARTER_PI <= phi < 3.0 * QUARTER_PI:
        tx[0] = a * x / y
        ty[0] = a
    elif -3.0 * QUARTER_PI <= phi < -QUARTER_PI:
        tx[0] = -a * x / y
        ty[0] = -a
    else:
        tx[0] = -a
        ty[0] = -a * y / x


cdef inline double _distance_rel(double x, double y, int code, double s0, double s1) noexcept:
    cdef double m, c, a, b, u, v, px, py
    cdef double lo, hi, cc, dd, fc, fd, span, mid, ddx, ddy
    cdef int it
    if code == CODE_LINE:
        m = s0
        c = s1
        return fabs(y - m * x - c) / sqrt(1.0 + m * m)
    if code == CODE_CIRCLE:
        return fabs(sqrt(x * x + y * y) - s0)
    if code == CODE_SQUARE:
        a = s0
        u = fabs(x)
        v = fabs(y)
        if u < v:
            u, v = v, u
        if u <= a:
            return a - u
        if v <= a:
            return u - a
        return sqrt((u - a) * (u - a) + (v - a) * (v - a))
    # ellipse: golden-section on the first-quadrant arc angle
    a = s0
    b = s1
    px = fabs(x)
    py = fabs(y)
    lo = 0.0
    hi = HALF_PI
    cc = hi - INV_PHI * (hi - lo)
    dd = lo + INV_PHI * (hi - lo)
    ddx = a * cos(cc) - px
    ddy = b * sin(cc) - py
    fc = ddx * ddx + ddy * ddy
    ddx = a * cos(dd) - px
    ddy = b * sin(dd) - py
    fd = ddx * ddx + ddy * ddy
    for it in range(_GOLDEN_ITERS_C - 1):
        if fc < fd:
            hi = dd
            dd = cc
            fd = fc
            cc = hi - INV_PHI * (hi - lo)
            ddx = a * cos(cc) - px
            ddy = b * sin(cc) - py
            fc = ddx * ddx + ddy * ddy
        else:
            lo = cc
            cc = dd
            fc = fd
            dd = lo + INV_PHI * (hi - lo)
            ddx = a * cos(dd) - px
            ddy = b * sin(dd) - py
            fd = ddx * ddx + ddy * ddy
    if fc < fd:
        hi = dd
    else:
        lo = cc
    mid = 0.5 * (lo + hi)
    ddx = a * cos(mid) - px
    ddy = b * sin(mid) - py
    return sqrt(ddx * ddx + ddy * ddy)


def shape_targets(const double[:, ::1] P, const double[:, ::1] dirs, int code, double s0, double s1,
                  double cx, double cy):
    """Absolute-frame shape targets for every agent."""
    cdef Py_ssize_t m = P.shape[0]
    out = np.empty((m, 2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i
    cdef double tx = 0.0, ty = 0.0
    for i in range(m):
        _target_rel(P[i, 0] - cx, P[i, 1] - cy, dirs[i, 0], dirs[i, 1],
                    code, s0, s1, &tx, &ty)
        o[i, 0] = tx + cx
        o[i, 1] = ty + cy
    return out


def shape_distances(const double[:, ::1] P, int code, double s0, double s1,
                    double cx, double cy):
    """Exact distance from every agent to the shape."""
    cdef Py_ssize_t m = P.shape[0]
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    for i in range(m):
        o[i] = _distance_rel(P[i, 0] - cx, P[i, 1] - cy, code, s0, s1)
    return out


def velocity_field(const double[:, ::1] P, const double[:, ::1] dirs,
                   double k1, double k2, double sigma, double beta, double r,
                   int code, double s0, double s1, double cx, double cy):
    """Steering velocities for all agents plus the coincident-pair count."""
    cdef Py_ssize_t m = P.shape[0]
    out = np.empty((m, 2), dtype=np.float64)
    cdef double[:, ::1] v = out
    cdef double s2 = sigma * sigma
    cdef Py_ssize_t i, j, nn
    cdef double xi, yi, dx, dy, d2, w, sx, sy
    cdef double tx = 0.0, ty = 0.0
    cdef double best, dn
    cdef int events = 0

    for i in range(m):
        xi = P[i, 0]
        yi = P[i, 1]

        sx = 0.0
        sy = 0.0
        for j in range(m):
            if j == i:
                continue
            dx = P[j, 0] - xi
            dy = P[j, 1] - yi
            d2 = dx * dx + dy * dy
            w = pow(s2 + d2, -beta)
            sx += w * dx
            sy += w * dy
        v[i, 0] = k1 * sx
        v[i, 1] = k1 * sy

        _target_rel(xi - cx, yi - cy, dirs[i, 0], dirs[i, 1], code, s0, s1, &tx, &ty)
        dx = (tx + cx) - xi
        dy = (ty + cy) - yi
        d2 = dx * dx + dy * dy
        w = pow(s2 + d2, beta)
        v[i, 0] += k2 * dx / w
        v[i, 1] += k2 * dy / w

        if m >= 2 and r > 0.0:
            nn = 0 if i != 0 else 1
            best = -1.0
            for j in range(m):
                if j == i:
                    continue
                dx = P[j, 0] - xi
                dy = P[j, 1] - yi
                d2 = dx * dx + dy * dy
                if best < 0.0 or d2 < best:
                    best = d2
                    nn = j
            dx = xi - P[nn, 0]
            dy = yi - P[nn, 1]
            dn = sqrt(dx * dx + dy * dy)
            if dn < _EPS:
                events += 1
            else:
                v[i, 0] += r * dx / dn
                v[i, 1] += r * dy / dn
    return out, events
