"""Particle-system state and ideal-gas equation of state."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StateCorruptionError

CSV_HEADER = "x,rho,v,P,e,h,V"


@dataclass(frozen=True)
class Eos:
    """Ideal-gas closure P = (gamma - 1) rho e."""

    gamma: float = 1.4

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise StateCorruptionError("adiabatic index must exceed 1")


def pressure(rho, e, eos):
    rho = np.asarray(rho, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any(rho <= 0.0) or np.any(e <= 0.0):
        raise StateCorruptionError("pressure needs rho > 0 and e > 0")
    return (eos.gamma - 1.0) * rho * e


def sound_speed(rho, e, eos):
    p = pressure(rho, e, eos)
    return np.sqrt(eos.gamma * p / np.asarray(rho, dtype=float))


@dataclass
class ParticleSystem:
    """Per-particle state arrays; single writer (the integrator)."""

    x: np.ndarray       # positions
    v: np.ndarray       # velocities
    m: np.ndarray       # masses, constant in time
    V: np.ndarray       # volumes; rho = m / V
    e: np.ndarray       # thermal energy per unit mass
    h: np.ndarray       # smoothing lengths
    alpha: np.ndarray   # viscosity-switch coefficients
    fixed: np.ndarray = field(default=None)  # frozen-particle flags
    t: float = 0.0

    def __post_init__(self):
        if self.fixed is None:
            self.fixed = np.zeros(len(self.x), dtype=bool)
        for name in ("x", "v", "m", "V", "e", "h", "alpha"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if arr.shape != self.x.shape:
                raise StateCorruptionError(f"field {name} has wrong length")

    @property
    def n(self):
        return len(self.x)

    @property
    def rho(self):
        return self.m / self.V

    def validate(self):
        if np.any(self.m <= 0.0):
            raise StateCorruptionError("non-positive particle mass")
        if np.any(self.V <= 0.0) or np.any(self.e <= 0.0):
            raise StateCorruptionError("non-positive volume or energy")
        if np.any(np.diff(self.x) <= 0.0):
            raise StateCorruptionError("particle ordering lost")

    def copy(self):
        return ParticleSystem(
            x=self.x.copy(), v=self.v.copy(), m=self.m.copy(),
            V=self.V.copy(), e=self.e.copy(), h=self.h.copy(),
            alpha=self.alpha.copy(), fixed=self.fixed.copy(), t=self.t)

    def sort_in_place(self):
        """Restore ascending particle order after motion."""
        if np.all(np.diff(self.x) > 0.0):
            return
        order = np.argsort(self.x, kind="stable")
        for name in ("x", "v", "m", "V", "e", "h", "alpha", "fixed"):
            setattr(self, name, getattr(self, name)[order])


def total_momentum(state):
    return float(np.sum(state.m * state.v))


def total_energy(state, eos=None):
    return float(np.sum(state.m * (0.5 * state.v ** 2 + state.e)))


def snapshot_rows(state, eos):
    p = pressure(state.rho, state.e, eos)
    return np.column_stack(
        [state.x, state.rho, state.v, p, state.e, state.h, state.V])


def write_snapshot(path, state, eos):
    """CSV snapshot with 17-significant-digit decimal text."""
    rows = snapshot_rows(state, eos)
    with open(path, "w") as f:
        f.write(CSV_HEADER + "\n")
        for row in rows:
            f.write(",".join(f"{val:.17g}" for val in row) + "\n")


def read_snapshot(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data
