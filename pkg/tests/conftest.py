"""Shared fixtures: expensive shock-tube runs are computed once per
session and shared between the unit and acceptance test modules."""

import numpy as np
import pytest

from mfhydro.sod import RunConfig, convergence_study, run

SCHEMES = ("sph", "mls", "rbf")


@pytest.fixture(scope="session")
def sod450():
    """N = 450 Sod run reports, one per scheme, dissipation on."""
    return {scheme: run(RunConfig(scheme=scheme, n_particles=450))
            for scheme in SCHEMES}


@pytest.fixture(scope="session")
def conv_reports():
    """Convergence studies over N in {150, 300, 600}, one per scheme."""
    return {scheme: convergence_study(RunConfig(scheme=scheme),
                                      [150, 300, 600])
            for scheme in SCHEMES}


def jittered_nodes(n, rng, span=(-0.5, 0.5)):
    """Random sorted node set: jittered uniform grid plus local h."""
    width = span[1] - span[0]
    sp = width / n
    x = span[0] + sp * (np.arange(n) + 0.5) + rng.uniform(-0.3, 0.3, n) * sp
    h = 2.0 * sp * rng.uniform(0.9, 1.3, n)
    return x, h


def random_particle_system(rng, n=40):
    """Random valid particle state (sorted, positive fields)."""
    from mfhydro.state import ParticleSystem

    x, _ = jittered_nodes(n, rng)
    sp = 1.0 / n
    V = sp * rng.uniform(0.7, 1.4, n)
    m = V * rng.uniform(0.5, 2.0, n)
    return ParticleSystem(
        x=x, v=rng.normal(0.0, 1.0, n), m=m, V=V,
        e=rng.uniform(0.5, 3.0, n), h=2.0 * V,
        alpha=rng.uniform(0.5, 1.0, n))
