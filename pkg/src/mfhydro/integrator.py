"""Predictor-corrector stepping, timestep control, volume resync."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import build_table, compute_derivatives
from .errors import IllPosedGeometryError, StepFailureError
from .shapes import ShapeTable
from .state import ParticleSystem, sound_speed

MAX_STEP_RETRIES = 8


@dataclass(frozen=True)
class StepControls:
    cfl: float = 0.3
    resync_tolerance: float = 1.0e-3
    t_end: float = 0.2
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if self.resync_tolerance <= 0.0:
            raise ValueError("resync tolerance must be positive")


@dataclass
class StepDiagnostics:
    dt: float
    resync_count: int
    retries: int
    table: ShapeTable | None   # reusable table at the new configuration
    wall_impulse: float = 0.0  # momentum absorbed by fixed particles
    wall_work: float = 0.0     # total energy absorbed by fixed particles


def timestep(state, scheme, controls):
    """CFL timestep from sound speed, bulk speed and pairwise signal margin."""
    from .dynamics import resolution_length

    cs = sound_speed(state.rho, state.e, scheme.eos)
    ell = resolution_length(state, scheme)
    reach = 2.0 * float(np.max(state.h))
    lo = np.searchsorted(state.x, state.x - reach, side="left")
    hi = np.searchsorted(state.x, state.x + reach, side="right")
    width = int(np.max(hi - lo))
    cols = np.clip(lo[:, None] + np.arange(width)[None, :], 0, state.n - 1)
    valid = (lo[:, None] + np.arange(width)[None, :]) < hi[:, None]
    margin = 3.0 * np.max(
        np.abs(state.v[:, None] - state.v[cols]) * valid, axis=1)
    dt = controls.cfl * float(np.min(ell / (cs + np.abs(state.v) + margin)))
    if dt < 1e-12 * controls.t_end:
        raise StepFailureError(f"timestep underflow: dt = {dt:.3e}")
    return dt


def _freeze(new, state):
    """Fixed particles drift at constant velocity; all other fields hold."""
    fz = state.fixed
    if np.any(fz):
        for name in ("v", "e", "h", "alpha", "V"):
            arr = getattr(new, name)
            setattr(new, name, np.where(fz, getattr(state, name), arr))
    return new


def _advance(state, deriv, dt, scheme) -> ParticleSystem:
    new = state.copy()
    new.x = state.x + dt * deriv.dx
    new.v = state.v + dt * deriv.dv
    new.e = state.e + dt * deriv.de
    new.h = state.h + dt * deriv.dh
    new.alpha = np.clip(state.alpha + dt * deriv.dalpha,
                        scheme.alpha_min, scheme.alpha_max)
    if scheme.backend == "sph":
        rho = state.rho + dt * deriv.dprim
        with np.errstate(divide="ignore", invalid="ignore"):
            new.V = np.where(rho > 0.0, state.m / np.where(rho > 0, rho, 1.0),
                             -1.0)
    else:
        new.V = state.V + dt * deriv.dprim
    new.t = state.t + dt
    return _freeze(new, state)


def _combine(state, d0, d1, dt, scheme) -> ParticleSystem:
    """Corrector: trapezoidal average of initial and predicted rates."""
    new = state.copy()
    half = 0.5 * dt
    new.x = state.x + half * (d0.dx + d1.dx)
    new.v = state.v + half * (d0.dv + d1.dv)
    new.e = state.e + half * (d0.de + d1.de)
    new.h = state.h + half * (d0.dh + d1.dh)
    new.alpha = np.clip(state.alpha + half * (d0.dalpha + d1.dalpha),
                        scheme.alpha_min, scheme.alpha_max)
    if scheme.backend == "sph":
        rho = state.rho + half * (d0.dprim + d1.dprim)
        with np.errstate(divide="ignore", invalid="ignore"):
            new.V = np.where(rho > 0.0, state.m / np.where(rho > 0, rho, 1.0),
                             -1.0)
    else:
        new.V = state.V + half * (d0.dprim + d1.dprim)
    new.t = state.t + dt
    return _freeze(new, state)


def _valid(state):
    return (np.all(state.V > 0.0) and np.all(state.e > 0.0)
            and np.all(np.isfinite(state.v)))


def volume_resync(state, table, controls, scheme):
    """Replace evolved volumes with shape integrals where they disagree.

    Applies the relative-difference threshold per particle.  Smoothing
    lengths keep their smoothly evolved values (dh/dt proportional to
    dV/dt): the shape integral depends only on positions and h, so the
    correction is then a plain assignment.  Resetting h from the
    corrected volume instead closes a feedback loop whose staggered
    (even-odd) mode is linearly unstable under per-step application.
    Returns the resync count.
    """
    vol = table.volumes
    if np.any(vol <= 0.0):
        raise IllPosedGeometryError("non-positive shape integral")
    mismatch = np.abs(state.V - vol) / state.V >= controls.resync_tolerance
    mismatch &= ~state.fixed
    count = int(np.count_nonzero(mismatch))
    if count:
        state.V = np.where(mismatch, vol, state.V)
    return count


def step(state, scheme, controls, dt, table=None) -> tuple[ParticleSystem, StepDiagnostics]:
    """One second-order predictor-corrector step (with rejection/halving)."""
    if table is None:
        table = build_table(state, scheme)
    d0 = compute_derivatives(state, table, scheme)

    for attempt in range(MAX_STEP_RETRIES + 1):
        predicted = _advance(state, d0, dt, scheme)
        if _valid(predicted):
            predicted.sort_in_place()
            try:
                table1 = build_table(predicted, scheme)
                d1 = compute_derivatives(predicted, table1, scheme)
            except IllPosedGeometryError:
                dt *= 0.5
                continue
            corrected = _combine(state, d0, d1, dt, scheme)
            if _valid(corrected):
                corrected.sort_in_place()
                break
        dt *= 0.5
    else:
        raise StepFailureError(
            f"step rejected {MAX_STEP_RETRIES} times at t = {state.t:.6g}")

    # Momentum/energy the fixed boundary particles absorb: they do not
    # integrate their rates, so the conserved totals over moving particles
    # change by exactly this much (the wall impulse / work).
    fz = state.fixed
    impulse = 0.0
    work = 0.0
    if np.any(fz):
        half = 0.5 * dt
        dv = half * (d0.dv[fz] + d1.dv[fz])
        de = half * (d0.de[fz] + d1.de[fz])
        impulse = float(np.sum(state.m[fz] * dv))
        work = float(np.sum(state.m[fz] * (state.v[fz] * dv + de)))

    resync_count = 0
    new_table = None
    if scheme.backend in ("mls", "rbf"):
        new_table = build_table(corrected, scheme)
        resync_count = volume_resync(corrected, new_table, controls, scheme)
    return corrected, StepDiagnostics(dt=dt, resync_count=resync_count,
                                      retries=attempt, table=new_table,
                                      wall_impulse=impulse, wall_work=work)
