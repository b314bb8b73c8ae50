"""Exact solution of the 1D ideal-gas Riemann problem.

Used as the analytical reference for the shock-tube runs: star-region
state from a safeguarded root find on the pressure function, then
self-similar sampling across rarefaction fan / contact / shock.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import VacuumError

PRESSURE_TOL = 1e-14


@dataclass(frozen=True)
class RiemannState:
    P: float
    rho: float
    v: float

    def __post_init__(self):
        if self.P <= 0.0 or self.rho <= 0.0:
            raise ValueError("Riemann states need positive pressure/density")

    def sound_speed(self, gamma):
        return np.sqrt(gamma * self.P / self.rho)


@dataclass(frozen=True)
class RiemannSolution:
    left: RiemannState
    right: RiemannState
    gamma: float
    p_star: float
    v_star: float
    rho_star_left: float
    rho_star_right: float
    # similarity speeds (x/t) of the wave features
    left_head: float
    left_tail: float
    contact: float
    right_head: float
    right_tail: float

    @property
    def wave_speeds(self):
        return (self.left_head, self.left_tail, self.contact,
                self.right_tail, self.right_head)


def _branch(p, side, gamma):
    """Shock / rarefaction pressure function f_K(p) and its derivative."""
    pk, rhok = side.P, side.rho
    ck = side.sound_speed(gamma)
    if p > pk:  # shock
        a = 2.0 / ((gamma + 1.0) * rhok)
        b = (gamma - 1.0) / (gamma + 1.0) * pk
        root = np.sqrt(a / (p + b))
        return (p - pk) * root
    # rarefaction
    return 2.0 * ck / (gamma - 1.0) * ((p / pk) ** ((gamma - 1.0) / (2.0 * gamma)) - 1.0)


def solve_riemann(left, right, gamma=1.4) -> RiemannSolution:
    """Exact star state; raises VacuumError for cavitating data."""
    cl = left.sound_speed(gamma)
    cr = right.sound_speed(gamma)
    dv = right.v - left.v
    if 2.0 * (cl + cr) / (gamma - 1.0) <= dv:
        raise VacuumError("initial states generate a vacuum region")

    def pressure_function(p):
        return _branch(p, left, gamma) + _branch(p, right, gamma) + dv

    p_lo = 1e-14 * min(left.P, right.P)
    p_hi = max(left.P, right.P)
    while pressure_function(p_hi) < 0.0:
        p_hi *= 4.0
    if left.P == right.P and left.v == right.v:
        p_star = left.P
    else:
        p_star = brentq(pressure_function, p_lo, p_hi, xtol=1e-15,
                        rtol=8.9e-16, maxiter=200)
    v_star = 0.5 * (left.v + right.v) + 0.5 * (
        _branch(p_star, right, gamma) - _branch(p_star, left, gamma))

    gm = (gamma - 1.0) / (gamma + 1.0)
    if p_star > left.P:  # left shock
        rho_sl = left.rho * (p_star / left.P + gm) / (gm * p_star / left.P + 1.0)
        ql = np.sqrt((gamma + 1.0) / (2.0 * gamma) * p_star / left.P
                     + (gamma - 1.0) / (2.0 * gamma))
        left_head = left_tail = left.v - cl * ql
    else:  # left rarefaction
        rho_sl = left.rho * (p_star / left.P) ** (1.0 / gamma)
        c_sl = cl * (p_star / left.P) ** ((gamma - 1.0) / (2.0 * gamma))
        left_head = left.v - cl
        left_tail = v_star - c_sl

    if p_star > right.P:  # right shock
        rho_sr = right.rho * (p_star / right.P + gm) / (gm * p_star / right.P + 1.0)
        qr = np.sqrt((gamma + 1.0) / (2.0 * gamma) * p_star / right.P
                     + (gamma - 1.0) / (2.0 * gamma))
        right_head = right_tail = right.v + cr * qr
    else:  # right rarefaction
        rho_sr = right.rho * (p_star / right.P) ** (1.0 / gamma)
        c_sr = cr * (p_star / right.P) ** ((gamma - 1.0) / (2.0 * gamma))
        right_head = right.v + cr
        right_tail = v_star + c_sr

    return RiemannSolution(
        left=left, right=right, gamma=gamma, p_star=p_star, v_star=v_star,
        rho_star_left=rho_sl, rho_star_right=rho_sr,
        left_head=left_head, left_tail=left_tail, contact=v_star,
        right_head=right_head, right_tail=right_tail)


def pressure_residual(sol):
    """Residual of the star-pressure equation (diagnostic)."""
    return (_branch(sol.p_star, sol.left, sol.gamma)
            + _branch(sol.p_star, sol.right, sol.gamma)
            + (sol.right.v - sol.left.v))


def sample(sol, xi):
    """State at similarity coordinate xi = x/t (vectorized)."""
    xi = np.asarray(xi, dtype=float)
    gamma = sol.gamma
    left, right = sol.left, sol.right
    cl = left.sound_speed(gamma)
    cr = right.sound_speed(gamma)

    p = np.empty_like(xi)
    rho = np.empty_like(xi)
    v = np.empty_like(xi)

    # left of contact
    in_left = xi < sol.contact
    lfan = in_left & (xi > sol.left_head) & (xi < sol.left_tail)
    lout = in_left & (xi <= sol.left_head)
    lstar = in_left & (xi >= sol.left_tail)
    rho[lout], p[lout], v[lout] = left.rho, left.P, left.v
    rho[lstar], p[lstar], v[lstar] = sol.rho_star_left, sol.p_star, sol.v_star
    if np.any(lfan):
        u = xi[lfan]
        fac = (2.0 + (gamma - 1.0) / cl * (left.v - u)) / (gamma + 1.0)
        rho[lfan] = left.rho * fac ** (2.0 / (gamma - 1.0))
        p[lfan] = left.P * fac ** (2.0 * gamma / (gamma - 1.0))
        v[lfan] = 2.0 / (gamma + 1.0) * (cl + (gamma - 1.0) / 2.0 * left.v + u)

    # right of contact
    in_right = ~in_left
    rfan = in_right & (xi < sol.right_head) & (xi > sol.right_tail)
    rout = in_right & (xi >= sol.right_head)
    rstar = in_right & (xi <= sol.right_tail)
    rho[rout], p[rout], v[rout] = right.rho, right.P, right.v
    rho[rstar], p[rstar], v[rstar] = sol.rho_star_right, sol.p_star, sol.v_star
    if np.any(rfan):
        u = xi[rfan]
        fac = (2.0 - (gamma - 1.0) / cr * (right.v - u)) / (gamma + 1.0)
        rho[rfan] = right.rho * fac ** (2.0 / (gamma - 1.0))
        p[rfan] = right.P * fac ** (2.0 * gamma / (gamma - 1.0))
        v[rfan] = 2.0 / (gamma + 1.0) * (-cr + (gamma - 1.0) / 2.0 * right.v + u)

    return p, rho, v


def wave_positions(sol, t):
    """Positions (head, tail, contact, right wave) at time t > 0."""
    return (sol.left_head * t, sol.left_tail * t, sol.contact * t,
            sol.right_head * t)


def write_reference_csv(path, sol, t, n_samples, x_span=(-0.5, 0.5)):
    """Reference profile CSV with the particle-snapshot column schema."""
    x = np.linspace(x_span[0], x_span[1], n_samples)
    p, rho, v = sample(sol, x / t)
    e = p / ((sol.gamma - 1.0) * rho)
    with open(path, "w") as f:
        f.write("x,rho,v,P,e,h,V\n")
        for k in range(n_samples):
            f.write(",".join(f"{val:.17g}" for val in
                             (x[k], rho[k], v[k], p[k], e[k], 0.0, 0.0)) + "\n")
