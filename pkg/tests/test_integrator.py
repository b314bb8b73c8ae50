"""Integrator tests: timestep control, stepping, freezing, resync,
Richardson order verification."""

import numpy as np
import pytest

from conftest import random_particle_system
from mfhydro.dynamics import SchemeConfig, build_table
from mfhydro.errors import (IllPosedGeometryError, StepFailureError)
from mfhydro.integrator import (StepControls, StepDiagnostics, step,
                                timestep, volume_resync)
from mfhydro.state import ParticleSystem, total_energy, total_momentum


def smooth_state(n=64, amplitude=0.05):
    """Uniform lattice with a smooth velocity/energy perturbation."""
    dx = 1.0 / n
    x = dx * (np.arange(n) + 0.5)
    V = np.full(n, dx)
    return ParticleSystem(
        x=x, v=amplitude * np.sin(2 * np.pi * x), m=V.copy(), V=V,
        e=2.5 + amplitude * np.cos(2 * np.pi * x), h=2.0 * V,
        alpha=np.full(n, 0.5))


class TestStepControls:
    def test_validation(self):
        with pytest.raises(ValueError):
            StepControls(cfl=0.0)
        with pytest.raises(ValueError):
            StepControls(cfl=1.5)
        with pytest.raises(ValueError):
            StepControls(resync_tolerance=0.0)


class TestTimestep:
    def test_scales_with_cfl(self):
        st = smooth_state()
        scheme = SchemeConfig()
        dt1 = timestep(st, scheme, StepControls(cfl=0.3))
        dt2 = timestep(st, scheme, StepControls(cfl=0.15))
        assert dt2 == pytest.approx(0.5 * dt1)

    def test_shrinks_with_resolution(self):
        scheme = SchemeConfig()
        controls = StepControls()
        dt_coarse = timestep(smooth_state(32), scheme, controls)
        dt_fine = timestep(smooth_state(128), scheme, controls)
        assert dt_fine < 0.3 * dt_coarse

    def test_underflow_raises(self):
        st = smooth_state()
        st.v[10] = 1e14  # absurd speed drives dt below the floor
        with pytest.raises(StepFailureError):
            timestep(st, SchemeConfig(), StepControls())


class TestStep:
    def test_conserves_momentum_without_walls(self):
        st = smooth_state()
        scheme = SchemeConfig()
        controls = StepControls()
        mom0 = total_momentum(st)
        en0 = total_energy(st)
        table = None
        for _ in range(20):
            dt = timestep(st, scheme, controls)
            st, diag = step(st, scheme, controls, dt, table=table)
            table = diag.table
        assert abs(total_momentum(st) - mom0) < 1e-13
        # energy is conserved only to scheme accuracy, not exactly
        assert abs(total_energy(st) - en0) < 1e-4 * abs(en0)

    def test_advances_time(self):
        st = smooth_state()
        scheme = SchemeConfig()
        controls = StepControls()
        dt = timestep(st, scheme, controls)
        new, diag = step(st, scheme, controls, dt)
        assert new.t == pytest.approx(st.t + diag.dt)
        assert diag.retries == 0
        assert diag.table is not None  # reusable table for the next step

    def test_frozen_particles_hold_fields(self):
        st = smooth_state()
        st.fixed[:4] = True
        st.fixed[-4:] = True
        scheme = SchemeConfig()
        controls = StepControls()
        dt = timestep(st, scheme, controls)
        new, diag = step(st, scheme, controls, dt)
        fz = st.fixed
        for name in ("v", "e", "h", "alpha", "V"):
            np.testing.assert_array_equal(getattr(new, name)[fz],
                                          getattr(st, name)[fz])
        # frozen particles still drift at their constant velocity
        np.testing.assert_allclose(new.x[fz], st.x[fz] + dt * st.v[fz])
        assert isinstance(diag, StepDiagnostics)

    def test_wall_budget_closes(self):
        # momentum change of moving particles == -(impulse into walls)
        st = smooth_state(amplitude=0.2)
        st.fixed[:4] = True
        st.fixed[-4:] = True
        scheme = SchemeConfig()
        controls = StepControls()
        mom0 = total_momentum(st)
        impulse = 0.0
        for _ in range(10):
            dt = timestep(st, scheme, controls)
            st, diag = step(st, scheme, controls, dt)
            impulse += diag.wall_impulse
        budget = total_momentum(st) + impulse - mom0
        assert abs(budget) < 1e-12

    def test_persistent_failure_raises(self, monkeypatch):
        import mfhydro.integrator as integ
        monkeypatch.setattr(integ, "_valid", lambda s: False)
        with pytest.raises(StepFailureError):
            step(smooth_state(), SchemeConfig(), StepControls(), 1e-3)


class TestVolumeResync:
    def test_below_tolerance_untouched(self):
        st = smooth_state()
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        st.V = table.volumes * (1.0 + 1e-5)  # inside the 1e-3 band
        before = st.V.copy()
        count = volume_resync(st, table, StepControls(), scheme)
        assert count == 0
        np.testing.assert_array_equal(st.V, before)

    def test_above_tolerance_resynced(self):
        st = smooth_state()
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        st.V = table.volumes * 1.01  # 1% mismatch, above 1e-3
        count = volume_resync(st, table, StepControls(), scheme)
        assert count == st.n
        np.testing.assert_array_equal(st.V, table.volumes)

    def test_partial_resync(self):
        st = smooth_state()
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        st.V = table.volumes.copy()
        st.V[5] *= 1.02
        count = volume_resync(st, table, StepControls(), scheme)
        assert count == 1
        assert st.V[5] == table.volumes[5]

    def test_fixed_particles_excluded(self):
        st = smooth_state()
        st.fixed[:] = True
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        st.V = table.volumes * 2.0
        before = st.V.copy()
        assert volume_resync(st, table, StepControls(), scheme) == 0
        np.testing.assert_array_equal(st.V, before)

    def test_nonpositive_volume_raises(self):
        st = smooth_state()
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        bad = type(table)(table.values, table.gradients,
                          table.volumes * -1.0, table.backend)
        with pytest.raises(IllPosedGeometryError):
            volume_resync(st, bad, StepControls(), scheme)

    def test_smoothing_lengths_untouched(self):
        # resync corrects V only; h keeps its smoothly evolved value
        st = smooth_state()
        scheme = SchemeConfig()
        table = build_table(st, scheme)
        st.V = table.volumes * 1.01
        h_before = st.h.copy()
        volume_resync(st, table, StepControls(), scheme)
        np.testing.assert_array_equal(st.h, h_before)


class TestRichardson:
    def test_second_order_in_time(self):
        """Step-halving on a smooth state: error ratio 4 within 20%."""
        scheme = SchemeConfig(backend="mls", dissipation=False)
        controls = StepControls(resync_tolerance=1e9, t_end=1.0)
        t_final = 0.008

        def integrate(dt):
            st = smooth_state()
            for _ in range(int(round(t_final / dt))):
                st, _ = step(st, scheme, controls, dt)
            return np.concatenate([st.x, st.v, st.e, st.V])

        coarse = integrate(8e-4)
        medium = integrate(4e-4)
        fine = integrate(2e-4)
        ratio = (np.linalg.norm(coarse - medium)
                 / np.linalg.norm(medium - fine))
        assert 3.2 <= ratio <= 4.8
