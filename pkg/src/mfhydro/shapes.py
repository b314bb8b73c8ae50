"""Shape-function tables for the three quasi-interpolation backends.

A ShapeTable holds phi_j(x_i), its spatial gradient, and the shape
integrals used as reference particle volumes.  The MLS and B-spline
families are partitions of unity; SPH kernel shapes are not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from . import backend
from .errors import DomainError, UsageError
from .kernels import cubic_spline_dw, cubic_spline_w

GAUSS_PANEL_ORDER = 5


@dataclass(frozen=True)
class ShapeTable:
    """Dense shape-function table for one particle configuration."""

    values: np.ndarray     # (N, N), values[i, j] = phi_j(x_i)
    gradients: np.ndarray  # (N, N), gradients[i, j] = phi_j'(x_i)
    volumes: np.ndarray    # (N,), integral of phi_j over the node hull
    backend: str

    @property
    def n(self):
        return self.values.shape[0]


def _check_nodes(x, h=None, minimum=1):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < minimum:
        raise DomainError(f"need at least {minimum} nodes")
    if np.any(np.diff(x) <= 0.0):
        raise DomainError("node positions must be strictly increasing")
    if h is not None:
        h = np.asarray(h, dtype=float)
        if h.shape != x.shape:
            raise UsageError("smoothing lengths must match node count")
        if np.any(h <= 0.0):
            raise DomainError("smoothing lengths must be positive")
    return x, h


def quadrature_points(x, h):
    """Gauss-Legendre points/weights over the node hull.

    Panels are split at every node and at every weight-support endpoint
    x_j +- h_j, so the integrand is smooth on each panel; panel width is
    therefore bounded by the local node spacing.
    """
    cuts = np.concatenate([x, x - h, x + h])
    cuts = np.unique(np.clip(cuts, x[0], x[-1]))
    widths = np.diff(cuts)
    keep = widths > 1e-14 * (x[-1] - x[0])
    a = cuts[:-1][keep]
    wdt = widths[keep]
    gn, gw = np.polynomial.legendre.leggauss(GAUSS_PANEL_ORDER)
    y = a[:, None] + 0.5 * wdt[:, None] * (1.0 + gn[None, :])
    w = 0.5 * wdt[:, None] * gw[None, :]
    return y.ravel(), w.ravel()


def sph_shapes(x, h, masses, densities):
    """SPH kernel shape table: phi_j(x_i) = (m_j/rho_j) W(|x_i-x_j|, h_i)."""
    x, h = _check_nodes(x, h)
    masses = np.asarray(masses, dtype=float)
    densities = np.asarray(densities, dtype=float)
    if masses.shape != x.shape or densities.shape != x.shape:
        raise UsageError("masses/densities must match node count")
    if np.any(densities <= 0.0):
        raise DomainError("densities must be positive")

    dx = x[:, None] - x[None, :]
    r = np.abs(dx)
    vol = masses / densities
    wmat = cubic_spline_w(r, h[:, None])
    gmat = cubic_spline_dw(r, h[:, None]) * np.sign(dx)
    values = vol[None, :] * wmat
    gradients = vol[None, :] * gmat
    return ShapeTable(values, gradients, vol.copy(), "sph")


def mls_shapes(x, h, degree=1):
    """Backus-Gilbert MLS shape table with exact analytic gradients."""
    x, h = _check_nodes(x, h, minimum=degree + 1)
    if degree < 0:
        raise DomainError("polynomial degree must be >= 0")
    # Wendland weight support radius is 2h (SPH kernel convention)
    qy, qw = quadrature_points(x, 2.0 * h)
    values, gradients, volumes = backend.mls_table(x, h, degree, qy, qw)
    return ShapeTable(values, gradients, volumes, "mls")


def _bspline_knots(x):
    return np.concatenate([[x[0]] * 3, x, [x[-1]] * 3])


def bspline_shapes(x):
    """Cubic B-spline shape table on clamped knots.

    The full clamped basis on knots equal to the nodes has N+2 members;
    the two extreme boundary splines are lumped into the end-node shapes
    so the table stays N x N while keeping the exact partition of unity.
    """
    x, _ = _check_nodes(x, minimum=5)
    n = len(x)
    t = _bspline_knots(x)
    full = BSpline(t, np.eye(n + 2), 3, extrapolate=False)
    values_full = full(x)
    gradients_full = full.derivative()(x)
    # clamped evaluation at the right endpoint returns nan rows
    values_full = np.nan_to_num(values_full)
    gradients_full = np.nan_to_num(gradients_full)
    # right-endpoint derivative needs the one-sided limit
    gradients_full[-1] = full.derivative()(x[-1] - 1e-12 * (x[-1] - x[0]))
    volumes_full = (t[4:] - t[:-4]) / 4.0

    def lump(a):
        out = np.empty(a.shape[:-1] + (n,))
        out[..., 0] = a[..., 0] + a[..., 1]
        out[..., 1:-1] = a[..., 2:-2]
        out[..., -1] = a[..., -2] + a[..., -1]
        return out

    return ShapeTable(lump(values_full), lump(gradients_full),
                      lump(volumes_full), "bspline")


def quasi_interpolate(table, nodal_values, row=None):
    """Sf(x_i) = sum_j f(x_j) phi_j(x_i) using row(s) of the table."""
    nodal_values = np.asarray(nodal_values, dtype=float)
    if nodal_values.shape != (table.n,):
        raise UsageError("nodal values must match table size")
    if row is None:
        return table.values @ nodal_values
    return table.values[row] @ nodal_values
