"""Univariate kernel and weight functions with exact derivatives.

Two families are provided: the compactly supported cubic spline kernel
(support ``2h``, normalised to unit integral in 1D) and the C4-smooth
Wendland weight on [0, 1) (left unnormalised; moving least-squares shape
functions are invariant under positive scaling of the weight).
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

# support radii in units of h / of the dimensionless argument
CUBIC_SPLINE_SUPPORT_IN_H = 2.0
WENDLAND_C4_SUPPORT = 1.0


def cubic_spline_w(r, h):
    """Cubic spline kernel W(r, h), 1D normalisation sigma = 2/(3h)."""
    r = np.asarray(r, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0.0):
        raise DomainError("smoothing length h must be positive")
    q = r / h
    sigma = 2.0 / (3.0 * h)
    inner = 1.0 - 1.5 * q * q + 0.75 * q * q * q
    t = 2.0 - q
    outer = 0.25 * t * t * t
    out = np.where(q < 1.0, inner, np.where(q < 2.0, outer, 0.0))
    return sigma * out


def cubic_spline_dw(r, h):
    """Radial derivative dW/dr of the cubic spline kernel."""
    r = np.asarray(r, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0.0):
        raise DomainError("smoothing length h must be positive")
    q = r / h
    sigma = 2.0 / (3.0 * h)
    inner = -3.0 * q + 2.25 * q * q
    t = 2.0 - q
    outer = -0.75 * t * t
    out = np.where(q < 1.0, inner, np.where(q < 2.0, outer, 0.0))
    return sigma * out / h


def wendland_c4(q):
    """Wendland C4 weight (1 - q)^5 (8q^2 + 5q + 1), zero for q >= 1."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0.0):
        raise DomainError("weight argument q must be non-negative")
    t = np.maximum(1.0 - q, 0.0)
    t2 = t * t
    return t2 * t2 * t * (8.0 * q * q + 5.0 * q + 1.0)


def wendland_c4_d(q):
    """Derivative of the Wendland C4 weight: -14 q (1 - q)^4 (4q + 1)."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0.0):
        raise DomainError("weight argument q must be non-negative")
    t = np.maximum(1.0 - q, 0.0)
    t2 = t * t
    return -14.0 * q * t2 * t2 * (4.0 * q + 1.0)
