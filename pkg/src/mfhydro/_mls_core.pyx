# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled degree-1 MLS table construction (hot kernel).

Mirrors the math of _mls_numpy.mls_table for degree 1: Wendland C4
weights with support radius 2h, basis shifted/scaled per evaluation
point, 2x2 moment system solved in closed form, exact analytic
gradients, quadrature volumes.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

from .errors import IllPosedGeometryError

cnp.import_array()

DEF DET_TOL = 1e-13


cdef inline double _wend(double q) noexcept nogil:
    cdef double t
    if q >= 1.0:
        return 0.0
    t = 1.0 - q
    t = t * t * t * t * (1.0 - q)
    return t * (8.0 * q * q + 5.0 * q + 1.0)


cdef inline double _wend_d(double q) noexcept nogil:
    cdef double t
    if q >= 1.0:
        return 0.0
    t = 1.0 - q
    t = t * t
    t = t * t
    return -14.0 * q * t * (4.0 * q + 1.0)


cdef int _eval_row(double[::1] x, double[::1] h, double y,
                   Py_ssize_t lo, Py_ssize_t hi,
                   double* phi, double* dphi, bint need_grad) noexcept nogil:
    """Fill phi/dphi for nodes lo..hi-1 at point y. Returns 0, or -1 if
    the moment matrix is singular."""
    cdef Py_ssize_t j, k, nwin = hi - lo
    cdef double s = 0.0
    cdef double r, q, wgt, u
    cdef double m00 = 0.0, m01 = 0.0, m11 = 0.0
    cdef double dm00 = 0.0, dm01 = 0.0, dm11 = 0.0
    cdef double det, c0, c1, d0, d1, pc, wd, du, rhs0, rhs1, sgn

    for j in range(lo, hi):
        s += h[j]
    s /= nwin

    for j in range(lo, hi):
        r = y - x[j]
        q = fabs(r) / (2.0 * h[j])
        wgt = _wend(q)
        u = (x[j] - y) / s
        m00 += wgt
        m01 += wgt * u
        m11 += wgt * u * u
        if need_grad:
            sgn = 0.0 if r == 0.0 else (1.0 if r > 0.0 else -1.0)
            wd = _wend_d(q) * sgn / (2.0 * h[j])
            du = -1.0 / s
            dm00 += wd
            dm01 += wd * u + wgt * du
            dm11 += wd * u * u + 2.0 * wgt * u * du

    det = m00 * m11 - m01 * m01
    if not (fabs(det) > DET_TOL * fabs(m00 * m11)):
        return -1
    c0 = m11 / det
    c1 = -m01 / det

    if need_grad:
        rhs0 = dm00 * c0 + dm01 * c1
        rhs1 = dm01 * c0 + dm11 * c1
        d0 = (m11 * rhs0 - m01 * rhs1) / det
        d1 = (m00 * rhs1 - m01 * rhs0) / det

    for k in range(nwin):
        j = lo + k
        r = y - x[j]
        q = fabs(r) / (2.0 * h[j])
        wgt = _wend(q)
        u = (x[j] - y) / s
        pc = c0 + u * c1
        phi[k] = wgt * pc
        if need_grad:
            sgn = 0.0 if r == 0.0 else (1.0 if r > 0.0 else -1.0)
            wd = _wend_d(q) * sgn / (2.0 * h[j])
            du = -1.0 / s
            dphi[k] = wd * pc + wgt * du * c1 - wgt * (d0 + u * d1)
    return 0


def mls_table_deg1(x_nodes, h_nodes, quad_y, quad_w):
    """Dense degree-1 MLS table: (values, gradients, volumes)."""
    cdef double[::1] x = np.ascontiguousarray(x_nodes, dtype=np.float64)
    cdef double[::1] h = np.ascontiguousarray(h_nodes, dtype=np.float64)
    cdef double[::1] qy = np.ascontiguousarray(quad_y, dtype=np.float64)
    cdef double[::1] qw = np.ascontiguousarray(quad_w, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], nq = qy.shape[0]
    cdef double reach = 0.0
    cdef Py_ssize_t i, k, lo, hi

    # weight support radius is 2h (SPH kernel convention)
    for i in range(n):
        if 2.0 * h[i] > reach:
            reach = 2.0 * h[i]

    xs = np.asarray(x)
    los = np.searchsorted(xs, np.asarray(x_nodes, dtype=np.float64) - reach,
                          side="left")
    his = np.searchsorted(xs, np.asarray(x_nodes, dtype=np.float64) + reach,
                          side="right")
    qlos = np.searchsorted(xs, np.asarray(quad_y, dtype=np.float64) - reach,
                           side="left")
    qhis = np.searchsorted(xs, np.asarray(quad_y, dtype=np.float64) + reach,
                           side="right")
    cdef long[::1] lo_v = np.ascontiguousarray(los, dtype=np.int64)
    cdef long[::1] hi_v = np.ascontiguousarray(his, dtype=np.int64)
    cdef long[::1] qlo_v = np.ascontiguousarray(qlos, dtype=np.int64)
    cdef long[::1] qhi_v = np.ascontiguousarray(qhis, dtype=np.int64)

    values = np.zeros((n, n))
    gradients = np.zeros((n, n))
    volumes = np.zeros(n)
    cdef double[:, ::1] val_v = values
    cdef double[:, ::1] grad_v = gradients
    cdef double[::1] vol_v = volumes

    cdef Py_ssize_t kmax = 0
    for i in range(n):
        if hi_v[i] - lo_v[i] > kmax:
            kmax = hi_v[i] - lo_v[i]
    for i in range(nq):
        if qhi_v[i] - qlo_v[i] > kmax:
            kmax = qhi_v[i] - qlo_v[i]

    buf = np.empty(kmax)
    dbuf = np.empty(kmax)
    cdef double[::1] phi = buf
    cdef double[::1] dphi = dbuf
    cdef int status

    for i in range(n):
        lo = lo_v[i]
        hi = hi_v[i]
        status = _eval_row(x, h, x[i], lo, hi, &phi[0], &dphi[0], True)
        if status != 0:
            raise IllPosedGeometryError(
                f"singular MLS moment matrix at node {i}", node_index=i)
        for k in range(hi - lo):
            val_v[i, lo + k] = phi[k]
            grad_v[i, lo + k] = dphi[k]

    cdef Py_ssize_t near
    for i in range(nq):
        lo = qlo_v[i]
        hi = qhi_v[i]
        status = _eval_row(x, h, qy[i], lo, hi, &phi[0], &dphi[0], False)
        if status != 0:
            # quadrature point in a particle void: its share of the hull
            # belongs to the nearest node, so the volume integrals still
            # tile the hull exactly and a starved node regains volume
            near = np.searchsorted(xs, qy[i])
            if near >= n:
                near = n - 1
            elif near > 0 and qy[i] - x[near - 1] <= x[near] - qy[i]:
                near = near - 1
            vol_v[near] += qw[i]
            continue
        for k in range(hi - lo):
            vol_v[lo + k] += qw[i] * phi[k]

    return values, gradients, volumes
