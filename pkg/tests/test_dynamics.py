"""RHS-operator tests: SPH equivalence, conservation, Galilean
invariance at the rate level, dissipation structure."""

import numpy as np
import pytest

from conftest import random_particle_system
from mfhydro.dynamics import (SchemeConfig, build_table, compute_derivatives,
                              dissipation_rhs, energy_rhs,
                              generic_continuity_rhs, generic_momentum_rhs,
                              sph_continuity_rhs, sph_momentum_rhs,
                              smoothing_length_rate, switch_rhs,
                              velocity_divergence, volume_rhs)
from mfhydro.errors import UsageError
from mfhydro.shapes import mls_shapes, sph_shapes
from mfhydro.state import Eos, pressure, sound_speed


class TestSphEquivalence:
    """The generic operators instantiated with SPH kernel shapes must
    reproduce the dedicated SPH operations exactly."""

    def test_continuity_bit_for_bit(self):
        rng = np.random.default_rng(50)
        for _ in range(20):
            st = random_particle_system(rng)
            table = sph_shapes(st.x, st.h, st.m, st.rho)
            generic = generic_continuity_rhs(st, table)
            dedicated = sph_continuity_rhs(st)
            assert np.array_equal(generic, dedicated)

    def test_energy_bit_for_bit(self):
        rng = np.random.default_rng(51)
        eos = Eos()
        for _ in range(20):
            st = random_particle_system(rng)
            p = pressure(st.rho, st.e, eos)
            table = sph_shapes(st.x, st.h, st.m, st.rho)
            generic = energy_rhs(st, p,
                                 drho_dt=generic_continuity_rhs(st, table))
            dedicated = energy_rhs(st, p, drho_dt=sph_continuity_rhs(st))
            assert np.array_equal(generic, dedicated)

    def test_volume_and_density_forms_agree(self):
        # -(P/m) dV/dt and (P/rho^2) drho/dt are the same rate
        rng = np.random.default_rng(52)
        eos = Eos()
        st = random_particle_system(rng)
        p = pressure(st.rho, st.e, eos)
        table = sph_shapes(st.x, st.h, st.m, st.rho)
        via_volume = energy_rhs(st, p, dV_dt=volume_rhs(st, table))
        via_density = energy_rhs(st, p,
                                 drho_dt=generic_continuity_rhs(st, table))
        np.testing.assert_allclose(via_volume, via_density, rtol=1e-12)


class TestGenericOperators:
    def test_momentum_conserves_totals(self):
        # sum_i m_i dv_i/dt = 0 because the shape gradients sum to zero
        rng = np.random.default_rng(53)
        st = random_particle_system(rng)
        table = mls_shapes(st.x, st.h)
        p = pressure(st.rho, st.e, Eos())
        dv = generic_momentum_rhs(st, table, p)
        assert abs(np.sum(st.m * dv)) < 1e-10 * np.sum(np.abs(st.m * dv))

    def test_divergence_of_uniform_flow_vanishes(self):
        rng = np.random.default_rng(54)
        st = random_particle_system(rng)
        st.v = np.full(st.n, 2.5)
        table = mls_shapes(st.x, st.h)
        assert np.max(np.abs(velocity_divergence(st, table))) == 0.0
        assert np.max(np.abs(volume_rhs(st, table))) == 0.0

    def test_divergence_of_linear_flow(self):
        # v = a x gives div v = a wherever linears are reproduced
        rng = np.random.default_rng(55)
        st = random_particle_system(rng, n=60)
        a = 1.7
        st.v = a * st.x
        table = mls_shapes(st.x, st.h)
        divv = velocity_divergence(st, table)
        assert np.max(np.abs(divv - a)) < 1e-8

    def test_energy_rhs_argument_check(self):
        rng = np.random.default_rng(56)
        st = random_particle_system(rng)
        p = pressure(st.rho, st.e, Eos())
        with pytest.raises(UsageError):
            energy_rhs(st, p)
        with pytest.raises(UsageError):
            energy_rhs(st, p, drho_dt=np.zeros(st.n), dV_dt=np.zeros(st.n))

    def test_sph_momentum_symmetry(self):
        # the two-kernel symmetrization conserves momentum pairwise
        rng = np.random.default_rng(57)
        st = random_particle_system(rng)
        p = pressure(st.rho, st.e, Eos())
        dv = sph_momentum_rhs(st, p)
        assert abs(np.sum(st.m * dv)) < 1e-12 * np.sum(np.abs(st.m * dv))


class TestDissipation:
    @staticmethod
    def _inputs(rng, compressing=True):
        st = random_particle_system(rng)
        if compressing:
            st.v = -2.0 * st.x  # uniformly approaching pairs
        table = mls_shapes(st.x, st.h)
        eos = Eos()
        p = pressure(st.rho, st.e, eos)
        cs = sound_speed(st.rho, st.e, eos)
        return st, table, p, cs

    def test_conserves_momentum_and_energy(self):
        rng = np.random.default_rng(60)
        scheme = SchemeConfig()
        for _ in range(5):
            st, table, p, cs = self._inputs(rng)
            dv, de = dissipation_rhs(st, table, p, cs, scheme)
            mom_rate = np.sum(st.m * dv)
            en_rate = np.sum(st.m * (st.v * dv + de))
            scale = max(np.sum(np.abs(st.m * dv)), 1e-30)
            assert abs(mom_rate) < 1e-12 * scale
            assert abs(en_rate) < 1e-10 * max(np.sum(np.abs(st.m * de)), scale)

    def test_viscosity_off_for_separating_pairs(self):
        rng = np.random.default_rng(61)
        st, table, p, cs = self._inputs(rng, compressing=False)
        st.v = 2.0 * st.x   # uniform expansion: every pair separates
        st.e = np.full(st.n, 1.5)  # uniform e kills conduction too
        scheme = SchemeConfig()
        dv, de = dissipation_rhs(st, table, p, cs, scheme)
        assert np.max(np.abs(dv)) == 0.0
        assert np.max(np.abs(de)) == 0.0

    def test_viscous_heating_is_nonnegative(self):
        rng = np.random.default_rng(62)
        st, table, p, cs = self._inputs(rng)
        st.e = np.full(st.n, 1.5)  # isolate the viscous channel
        p = pressure(st.rho, st.e, Eos())
        cs = sound_speed(st.rho, st.e, Eos())
        dv, de = dissipation_rhs(st, table, p, cs, SchemeConfig())
        assert np.min(de) >= -1e-15

    def test_dissipation_decelerates_approach(self):
        # two-particle compression: viscosity must push them apart
        rng = np.random.default_rng(63)
        st, table, p, cs = self._inputs(rng)
        dv, _ = dissipation_rhs(st, table, p, cs, SchemeConfig())
        # rate of change of sum v_i x_i scaled: compression must slow
        assert np.sum(st.m * st.v * dv) <= 0.0


class TestSwitchAndRates:
    def test_switch_relaxes_to_floor(self):
        rng = np.random.default_rng(64)
        st = random_particle_system(rng)
        st.v = np.zeros(st.n)   # no source
        st.alpha = np.full(st.n, 0.9)
        scheme = SchemeConfig()
        table = mls_shapes(st.x, st.h)
        cs = sound_speed(st.rho, st.e, scheme.eos)
        rate = switch_rhs(st, table, cs, scheme)
        assert np.all(rate < 0.0)

    def test_switch_sources_on_compression(self):
        rng = np.random.default_rng(65)
        st = random_particle_system(rng)
        st.v = -3.0 * st.x
        st.alpha = np.full(st.n, 0.5)  # at the floor: decay term is zero
        scheme = SchemeConfig()
        table = mls_shapes(st.x, st.h)
        cs = sound_speed(st.rho, st.e, scheme.eos)
        rate = switch_rhs(st, table, cs, scheme)
        assert np.all(rate > 0.0)

    def test_smoothing_length_rate_consistency(self):
        rng = np.random.default_rng(66)
        st = random_particle_system(rng)
        dprim = rng.normal(0.0, 1.0, st.n)
        mls_rate = smoothing_length_rate(st, SchemeConfig(backend="mls"), dprim)
        np.testing.assert_allclose(mls_rate, 2.0 * dprim)
        # for SPH, h = h_const m/rho: dh/dt = -h_const m/rho^2 drho/dt
        sph_rate = smoothing_length_rate(st, SchemeConfig(backend="sph"), dprim)
        np.testing.assert_allclose(
            sph_rate, -2.0 * st.m / st.rho ** 2 * dprim)
        rbf_rate = smoothing_length_rate(st, SchemeConfig(backend="rbf"), dprim)
        assert np.all(rbf_rate == 0.0)


class TestGalileanRates:
    def test_rates_unchanged_by_boost(self):
        rng = np.random.default_rng(67)
        boost = 10.0
        for backend in ("mls", "rbf", "sph"):
            scheme = SchemeConfig(backend=backend)
            st = random_particle_system(rng, n=50)
            # quarter-integer velocities stay exact under the +10 boost,
            # so every velocity difference is bitwise unchanged
            st.v = rng.integers(-8, 9, st.n) * 0.25
            boosted = st.copy()
            boosted.v = st.v + boost
            t0 = build_table(st, scheme)
            t1 = build_table(boosted, scheme)
            d0 = compute_derivatives(st, t0, scheme)
            d1 = compute_derivatives(boosted, t1, scheme)
            for name in ("dv", "de", "dprim", "dh", "dalpha"):
                assert np.array_equal(getattr(d0, name), getattr(d1, name)), \
                    f"{backend}: {name} not Galilean invariant"
            np.testing.assert_array_equal(d1.dx, d0.dx + boost)


def test_scheme_config_rejects_unknown_backend():
    with pytest.raises(UsageError):
        SchemeConfig(backend="weird")
