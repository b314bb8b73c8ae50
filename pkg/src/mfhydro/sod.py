"""Sod shock-tube experiment harness: setup, runs, error norms,
convergence study, and report emission."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import SchemeConfig
from .errors import UsageError
from .integrator import StepControls, step, timestep
from .riemann import RiemannState, sample, solve_riemann, wave_positions
from .state import (Eos, ParticleSystem, pressure, total_energy,
                    total_momentum, write_snapshot)

N_FROZEN_EDGE = 6
SMOOTH_REGION_BUFFER = 10.0  # local spacings excluded around each wave


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "mls"
    n_particles: int = 450
    domain: tuple = (-0.5, 0.5)
    t_end: float = 0.2
    gamma: float = 1.4
    mls_degree: int = 1
    cfl: float = 0.3
    resync_tolerance: float = 1.0e-3
    h_const: float = 2.0
    dissipation: bool = True
    left: RiemannState = field(default_factory=lambda: RiemannState(1.0, 1.0, 0.0))
    right: RiemannState = field(default_factory=lambda: RiemannState(0.1, 0.125, 0.0))
    out_dir: str | None = None
    snapshot_every: int = 0       # steps between snapshots; 0 = final only
    fixed_dt: float | None = None  # override adaptive timestep (testing)
    boost: float = 0.0             # constant velocity added at setup

    def __post_init__(self):
        if self.n_particles < 20:
            raise UsageError("need at least 20 particles")
        if self.t_end <= 0.0:
            raise UsageError("t_end must be positive")

    def scheme_config(self):
        return SchemeConfig(backend=self.scheme, mls_degree=self.mls_degree,
                            eos=Eos(self.gamma), dissipation=self.dissipation,
                            h_const=self.h_const)

    def controls(self):
        return StepControls(cfl=self.cfl,
                            resync_tolerance=self.resync_tolerance,
                            t_end=self.t_end)


@dataclass
class RunReport:
    config: RunConfig
    state: ParticleSystem
    n_steps: int
    resync_total: int
    momentum_series: list
    energy_series: list
    momentum_drift: float
    energy_drift: float
    linf_errors: dict
    l1_errors: dict
    contact_position: float
    contact_position_error: float


def _split_counts(config):
    xl, xr = config.domain
    mid = 0.5 * (xl + xr)
    rho_l, rho_r = config.left.rho, config.right.rho
    mass_total = rho_l * (mid - xl) + rho_r * (xr - mid)
    m = mass_total / config.n_particles
    n_right = int((rho_r * (xr - mid)) / m)  # remainder goes to the left
    return m, config.n_particles - n_right, n_right


def diaphragm_position(config):
    """Left-block edge; equals the domain midpoint when counts divide."""
    m, n_left, _ = _split_counts(config)
    return config.domain[0] + n_left * m / config.left.rho


def setup_sod(config) -> ParticleSystem:
    """Equal-mass particle placement; the diaphragm is not smoothed.

    Volume cells tile contiguously from the left wall with the per-side
    spacing m/rho, so count rounding never opens a void; the slack shows
    up as the rightmost cell edge sitting within one spacing of the wall.
    """
    xl, xr = config.domain
    rho_l, rho_r = config.left.rho, config.right.rho
    m, n_left, n_right = _split_counts(config)

    dx_l = m / rho_l
    dx_r = m / rho_r
    x_d = xl + n_left * dx_l
    x_left = xl + dx_l * (np.arange(n_left) + 0.5)
    x_right = x_d + dx_r * (np.arange(n_right) + 0.5)
    x = np.concatenate([x_left, x_right])

    gamma = config.gamma
    e_l = config.left.P / ((gamma - 1.0) * rho_l)
    e_r = config.right.P / ((gamma - 1.0) * rho_r)
    on_left = np.arange(config.n_particles) < n_left
    e = np.where(on_left, e_l, e_r)
    V = np.where(on_left, dx_l, dx_r)
    v = np.where(on_left, config.left.v, config.right.v) + config.boost
    h = config.h_const * V  # equals h_const * m/rho on each side

    fixed = np.zeros(config.n_particles, dtype=bool)
    fixed[:N_FROZEN_EDGE] = True
    fixed[-N_FROZEN_EDGE:] = True

    scheme = config.scheme_config()
    alpha = np.full(config.n_particles, scheme.alpha_min)
    return ParticleSystem(x=x, v=v, m=np.full(config.n_particles, m),
                          V=V, e=e, h=h, alpha=alpha, fixed=fixed)


def smooth_region_mask(state, sol, t, origin=0.0, boost=0.0):
    """Particles far from every wave: the region where the solution is
    smooth, with a buffer of SMOOTH_REGION_BUFFER local spacings."""
    positions = np.asarray(wave_positions(sol, t)) + origin + boost * t
    spacing = state.V
    mask = np.ones(state.n, dtype=bool)
    for wx in positions:
        mask &= np.abs(state.x - wx) > SMOOTH_REGION_BUFFER * spacing
    return mask


def error_norms(state, sol, t, mask, eos, origin=0.0, boost=0.0):
    """(Linf, L1) errors in P, rho, v against the sampled exact solution."""
    if not np.any(mask):
        raise UsageError("empty smooth-region mask")
    p_ex, rho_ex, v_ex = sample(sol, (state.x[mask] - origin - boost * t) / t)
    p = pressure(state.rho, state.e, eos)[mask]
    fields = {
        "P": (p, p_ex),
        "rho": (state.rho[mask], rho_ex),
        "v": (state.v[mask] - boost, v_ex),
    }
    linf = {k: float(np.max(np.abs(a - b))) for k, (a, b) in fields.items()}
    l1 = {k: float(np.mean(np.abs(a - b))) for k, (a, b) in fields.items()}
    return linf, l1


def detect_contact(state, sol, t, origin=0.0, boost=0.0):
    """Contact-discontinuity position from the density mid-level crossing."""
    rho_mid = 0.5 * (sol.rho_star_left + sol.rho_star_right)
    tail = origin + (sol.left_tail + boost) * t
    shock = origin + (sol.right_head + boost) * t
    sel = (state.x > tail) & (state.x < shock)
    xs = state.x[sel]
    rho = state.rho[sel]
    above = rho >= rho_mid
    idx = np.nonzero(above[:-1] & ~above[1:])[0]
    if len(idx) == 0:
        return float("nan")
    k = idx[0]
    x0, x1 = xs[k], xs[k + 1]
    r0, r1 = rho[k], rho[k + 1]
    return float(x0 + (rho_mid - r0) * (x1 - x0) / (r1 - r0))


def run(config, log_path=None) -> RunReport:
    """Run the shock tube to t_end and assemble the report."""
    scheme = config.scheme_config()
    controls = config.controls()
    state = setup_sod(config)
    sol = solve_riemann(config.left, config.right, config.gamma)

    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
    log = open(log_path, "w") if log_path else None

    mom0 = total_momentum(state)
    en0 = total_energy(state)
    momentum_series = [mom0]
    energy_series = [en0]
    wall_impulse = 0.0   # momentum absorbed by the fixed boundary particles
    wall_work = 0.0      # energy absorbed by the fixed boundary particles
    table = None
    n_steps = 0
    resync_total = 0

    while state.t < config.t_end and n_steps < controls.max_steps:
        if config.fixed_dt is not None:
            dt = min(config.fixed_dt, config.t_end - state.t)
        else:
            dt = min(timestep(state, scheme, controls),
                     config.t_end - state.t)
        state, diag = step(state, scheme, controls, dt, table=table)
        table = diag.table
        n_steps += 1
        resync_total += diag.resync_count
        wall_impulse += diag.wall_impulse
        wall_work += diag.wall_work
        momentum_series.append(total_momentum(state) + wall_impulse)
        energy_series.append(total_energy(state) + wall_work)
        if log:
            log.write(f"step {n_steps} t {state.t:.10g} dt {diag.dt:.6g} "
                      f"resync {diag.resync_count} "
                      f"momentum {momentum_series[-1]:.17g} "
                      f"energy {energy_series[-1]:.17g}\n")
        if (config.out_dir and config.snapshot_every
                and n_steps % config.snapshot_every == 0):
            write_snapshot(os.path.join(
                config.out_dir, f"snap_{n_steps:06d}.csv"), state, scheme.eos)
    if log:
        log.close()

    t = state.t
    origin = diaphragm_position(config)
    mask = smooth_region_mask(state, sol, t, origin=origin, boost=config.boost)
    linf, l1 = error_norms(state, sol, t, mask, scheme.eos,
                           origin=origin, boost=config.boost)
    contact = detect_contact(state, sol, t, origin=origin, boost=config.boost)
    contact_exact = origin + (sol.contact + config.boost) * t

    mom_scale = max(abs(mom0), float(np.sum(np.abs(state.m * state.v))), 1e-30)
    report = RunReport(
        config=config, state=state, n_steps=n_steps,
        resync_total=resync_total,
        momentum_series=momentum_series, energy_series=energy_series,
        momentum_drift=abs(momentum_series[-1] - mom0),
        energy_drift=abs(energy_series[-1] - en0) / abs(en0),
        linf_errors=linf, l1_errors=l1,
        contact_position=contact,
        contact_position_error=abs(contact - contact_exact))

    if config.out_dir:
        write_snapshot(os.path.join(config.out_dir, "final.csv"),
                       state, scheme.eos)
        write_report(os.path.join(config.out_dir, "report.txt"), report)
    return report


def write_report(path, report, fitted_order=None):
    with open(path, "w") as f:
        f.write(f"scheme: {report.config.scheme}\n")
        f.write(f"n_particles: {report.config.n_particles}\n")
        f.write(f"gamma: {report.config.gamma}\n")
        f.write(f"t_end: {report.config.t_end}\n")
        f.write(f"n_steps: {report.n_steps}\n")
        f.write(f"resync_total: {report.resync_total}\n")
        f.write(f"momentum_drift: {report.momentum_drift:.6e}\n")
        f.write(f"energy_drift: {report.energy_drift:.6e}\n")
        for k, val in report.linf_errors.items():
            f.write(f"linf_{k}: {val:.6e}\n")
        for k, val in report.l1_errors.items():
            f.write(f"l1_{k}: {val:.6e}\n")
        f.write(f"contact_position: {report.contact_position:.6f}\n")
        f.write(f"contact_position_error: {report.contact_position_error:.6e}\n")
        if fitted_order is not None:
            f.write(f"fitted_order: {fitted_order:.4f}\n")


@dataclass
class ConvergenceReport:
    sizes: list
    linf_pressure: list
    fitted_order: float
    reports: list


def convergence_study(config, n_list) -> ConvergenceReport:
    """Fit the L-infinity pressure-error order over a list of sizes."""
    if len(n_list) < 3:
        raise UsageError("need at least 3 sizes for an order fit")
    errors = []
    reports = []
    for n in n_list:
        rep = run(replace(config, n_particles=int(n), out_dir=None))
        errors.append(rep.linf_errors["P"])
        reports.append(rep)
    slope = np.polyfit(np.log(np.asarray(n_list, dtype=float)),
                       np.log(np.asarray(errors)), 1)[0]
    return ConvergenceReport(sizes=list(n_list), linf_pressure=errors,
                             fitted_order=float(-slope), reports=reports)
