"""Pure-numpy backend for moving least-squares shape tables.

Batched Backus-Gilbert construction: at every evaluation point the
(degree+1)x(degree+1) moment system is assembled in a basis shifted and
scaled to the evaluation point and solved for all points at once.  Used
when the compiled extension is unavailable, and for degrees the compiled
kernel does not cover.
"""

from __future__ import annotations

import numpy as np

from .errors import IllPosedGeometryError
from .kernels import wendland_c4, wendland_c4_d

# residual of M c = e0 above which the geometry is declared singular
_SINGULAR_TOL = 1e-8


def _windows(x_nodes, h_nodes, y):
    """Index windows of nodes whose weight support can reach each y."""
    reach = 2.0 * float(np.max(h_nodes))
    lo = np.searchsorted(x_nodes, y - reach, side="left")
    hi = np.searchsorted(x_nodes, y + reach, side="right")
    width = int(np.max(hi - lo)) if len(y) else 0
    cols = lo[:, None] + np.arange(width)[None, :]
    valid = cols < hi[:, None]
    cols = np.clip(cols, 0, len(x_nodes) - 1)
    return cols, valid


def mls_point_eval(x_nodes, h_nodes, y, degree, need_grad=True,
                   drop_singular=False):
    """Evaluate MLS shapes and exact gradients at arbitrary points.

    Returns (phi, dphi, cols, valid, singular): windowed (len(y), K)
    arrays where phi[m, k] is the shape of node cols[m, k] at y[m].
    dphi is None when need_grad is false.  With drop_singular, points
    whose moment matrix is singular (too few covering weights, e.g.
    inside a particle void) yield zero rows and are flagged in the
    boolean mask `singular` instead of raising.
    """
    x_nodes = np.asarray(x_nodes, dtype=float)
    h_nodes = np.asarray(h_nodes, dtype=float)
    y = np.asarray(y, dtype=float)
    nb = degree + 1

    cols, valid = _windows(x_nodes, h_nodes, y)
    xj = x_nodes[cols]
    hj = h_nodes[cols]
    r = y[:, None] - xj
    # weight support radius is 2h, the same convention as the SPH kernel
    q = np.abs(r) / (2.0 * hj)
    w = wendland_c4(q) * valid

    # local scale for the shifted basis; any fixed-per-point value works
    counts = np.maximum(valid.sum(axis=1), 1)
    scale = (hj * valid).sum(axis=1) / counts

    u = (xj - y[:, None]) / scale[:, None]
    powers = np.arange(nb)
    basis = u[:, :, None] ** powers  # (M, K, nb)

    moment = np.einsum("mk,mka,mkb->mab", w, basis, basis)
    diag_scale = np.abs(
        np.prod(moment[:, np.arange(nb), np.arange(nb)], axis=1))
    singular = ~(np.abs(np.linalg.det(moment)) > 1e-13 * diag_scale)
    if np.any(singular):
        if not drop_singular:
            bad = int(np.argmax(singular))
            raise IllPosedGeometryError(
                f"singular MLS moment matrix at evaluation point {bad}"
                " (too few neighbours)", node_index=bad)
        moment[singular] = np.eye(nb)
        w[singular] = 0.0

    e0 = np.zeros((len(y), nb))
    e0[:, 0] = 1.0
    coef = np.linalg.solve(moment, e0[:, :, None])[:, :, 0]
    resid = np.abs(np.einsum("mab,mb->ma", moment, coef) - e0).max(axis=1)
    if np.any(resid > _SINGULAR_TOL):
        bad = int(np.argmax(resid))
        raise IllPosedGeometryError(
            f"ill-conditioned MLS moment matrix at evaluation point {bad}",
            node_index=bad)

    pc = np.einsum("mka,ma->mk", basis, coef)
    phi = w * pc
    if not need_grad:
        return phi, None, cols, valid, singular

    dw = wendland_c4_d(q) * np.sign(r) / (2.0 * hj) * valid
    if np.any(singular):
        dw[singular] = 0.0
    dbasis = np.zeros_like(basis)
    if nb > 1:
        dbasis[:, :, 1:] = powers[1:] * u[:, :, None] ** (powers[1:] - 1)
    dbasis *= -1.0 / scale[:, None, None]  # du/dy = -1/scale

    dmoment = np.einsum("mk,mka,mkb->mab", dw, basis, basis)
    dmoment += np.einsum("mk,mka,mkb->mab", w, dbasis, basis)
    dmoment += np.einsum("mk,mka,mkb->mab", w, basis, dbasis)
    rhs = np.einsum("mab,mb->ma", dmoment, coef)
    dcoef = np.linalg.solve(moment, rhs[:, :, None])[:, :, 0]
    dphi = dw * pc + w * np.einsum("mka,ma->mk", dbasis, coef)
    dphi -= w * np.einsum("mka,ma->mk", basis, dcoef)

    return phi, dphi, cols, valid, singular


def mls_table(x_nodes, h_nodes, degree, quad_y, quad_w):
    """Dense MLS shape table plus quadrature volumes.

    quad_y/quad_w are precomputed Gauss-Legendre abscissae/weights
    covering the node hull with panels split at weight-support kinks.
    Returns (values, gradients, volumes) with values[i, j] = phi_j(x_i).
    """
    n = len(x_nodes)
    phi, dphi, cols, _, _ = mls_point_eval(x_nodes, h_nodes, x_nodes, degree)
    rows = np.broadcast_to(np.arange(n)[:, None], cols.shape)
    values = np.zeros((n, n))
    gradients = np.zeros((n, n))
    np.add.at(values, (rows.ravel(), cols.ravel()), phi.ravel())
    np.add.at(gradients, (rows.ravel(), cols.ravel()), dphi.ravel())

    qphi, _, qcols, _, qsing = mls_point_eval(
        x_nodes, h_nodes, quad_y, degree, need_grad=False,
        drop_singular=True)
    volumes = np.bincount(
        qcols.ravel(), weights=(qphi * quad_w[:, None]).ravel(), minlength=n)
    if np.any(qsing):
        # a quadrature point covered by no weight sits in a particle void;
        # its share of the hull belongs to the nearest node, so the volume
        # integrals still tile the hull exactly and a starved node regains
        # volume (and with it support) instead of collapsing
        yv = quad_y[qsing]
        right = np.searchsorted(x_nodes, yv)
        left = np.clip(right - 1, 0, n - 1)
        right = np.clip(right, 0, n - 1)
        nearest = np.where(
            np.abs(yv - x_nodes[left]) <= np.abs(x_nodes[right] - yv),
            left, right)
        volumes += np.bincount(nearest, weights=quad_w[qsing], minlength=n)
    return values, gradients, volumes
