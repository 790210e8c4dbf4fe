import math

import numpy as np
import pytest

from proca_casimir import oracle
from proca_casimir.errors import PassivityError
from proca_casimir.materials import ConstantEpsMu, ConstantIndex, InfinitelyPermeable, PerfectConductor, Vacuum
from proca_casimir.stack import HBAR_C, Plate, StackConfig, mass_from_bar
from proca_casimir.te import log1m, slab_reflectance, te_energy, te_force, te_force_integrand, te_integrand

A = 1e-6


def boyer(m_bar=0.0, background=None, t=A):
    return StackConfig(background or Vacuum(), Plate(PerfectConductor(), t), Plate(InfinitelyPermeable(), t),
                       A, mass_from_bar(m_bar, A))


class TestIntegrand:
    def test_identical_media(self):
        s = StackConfig.symmetric(ConstantIndex(1.5), A, background=ConstantIndex(1.5), m_bar=1.0)
        np.testing.assert_array_equal(te_integrand(s, np.array([0.1, 1.0]), np.array([2.0, 0.5])), 0.0)

    def test_conductors_unit_wavenumber(self):
        s = StackConfig.symmetric(PerfectConductor(), A)
        r = 1.0 / math.sqrt(2.0)
        np.testing.assert_allclose(te_integrand(s, r, r), math.log(1.0 - math.exp(-2.0)), rtol=1e-15)

    def test_matches_straight_transcription(self):
        s = StackConfig.symmetric(ConstantEpsMu(2.0), A)
        np.testing.assert_allclose(te_integrand(s, 1.0, 1.0),
                                   oracle.massless_te_reference_integrand(s, 1.0, 1.0), rtol=1e-12)

    def test_boyer_sign(self):
        u, v = np.array([0.2, 1.0, 3.0]), np.array([0.5, 1.0, 0.1])
        assert np.all(te_integrand(boyer(1.0), u, v) > 0.0)
        assert np.all(te_force_integrand(boyer(1.0), u, v) > 0.0)

    def test_passivity_violation(self):
        bad = ConstantEpsMu(2.0)
        object.__setattr__(bad, "mu_r", -0.5)  # unphysical on purpose
        s = StackConfig.symmetric(bad, A, thickness=100 * A)
        with pytest.raises(PassivityError):
            te_integrand(s, np.array([0.1]), np.array([0.3]))

    def test_far_tail_is_exactly_zero(self):
        s = StackConfig.symmetric(PerfectConductor(), A)
        assert te_integrand(s, 400.0, 0.0) == 0.0

    def test_log1m_accuracy(self):
        x = np.array([1e-300, 1e-17, 0.3, 0.7, 0.999])
        np.testing.assert_allclose(log1m(x), np.log1p(-x), rtol=1e-15)

    def test_slab_reflectance_thin_and_thick(self):
        assert slab_reflectance(0.5, 2.0, 0.0) == 0.0
        np.testing.assert_allclose(slab_reflectance(0.5, 2.0, 1e3), 0.5, rtol=1e-15)


class TestEnergy:
    def test_conductor_constant(self):
        res = te_energy(StackConfig.symmetric(PerfectConductor(), A))
        np.testing.assert_allclose(res.value, -math.pi**2 * HBAR_C / (1440 * A**3), rtol=1e-6)
        assert res.error_estimate >= 0.0 and res.channel == "TE" and res.quantity == "energy"

    def test_identical_media_zero(self):
        res = te_energy(StackConfig.symmetric(Vacuum(), A, m_bar=1.0))
        assert res.value == 0.0 and res.error_estimate == 0.0

    def test_mass_suppression_bound(self):
        e5 = te_energy(StackConfig.symmetric(PerfectConductor(), A, m_bar=5.0)).value
        e10 = te_energy(StackConfig.symmetric(PerfectConductor(), A, m_bar=10.0)).value
        assert abs(e10) < abs(e5) * math.exp(-5.0)

    @pytest.mark.parametrize("m", [0.3, 1.0, 4.0])
    @pytest.mark.parametrize("nb", [1.0, 2.0])
    def test_bessel_series(self, m, nb):
        s = StackConfig.symmetric(PerfectConductor(), A, background=ConstantIndex(nb), m_bar=m)
        np.testing.assert_allclose(te_energy(s).dimensionless, oracle.conductor_te_series(m, nb), rtol=1e-7)
        np.testing.assert_allclose(te_force(s).dimensionless, oracle.conductor_te_force_series(m, nb), rtol=1e-7)

    def test_separation_decay(self):
        s = StackConfig.symmetric(ConstantEpsMu(3.0), A, m_bar=0.5)
        far = s.with_separation(1e3 * A)
        assert abs(te_energy(far).value) < 1e-9 * abs(te_energy(s).value)

    def test_massless_limit(self):
        s0 = StackConfig(Vacuum(), Plate(ConstantEpsMu(3.0, 1.5), 0.5 * A), Plate(ConstantEpsMu(8.0), 2 * A), A)
        small = s0.with_mass(mass_from_bar(1e-6, A))
        np.testing.assert_allclose(te_energy(small).value, oracle.massless_lifshitz_te(s0).value, rtol=1e-8)

    def test_swap_symmetry(self):
        s = StackConfig(ConstantIndex(1.2), Plate(ConstantEpsMu(3.0, 1.5), 0.5 * A), Plate(ConstantEpsMu(8.0), 2 * A),
                        A, mass_from_bar(0.7, A))
        np.testing.assert_allclose(te_energy(s.swapped()).value, te_energy(s).value, rtol=1e-12)


class TestForce:
    def test_conductor_half_constant(self):
        res = te_force(StackConfig.symmetric(PerfectConductor(), A))
        np.testing.assert_allclose(res.value, -math.pi**2 * HBAR_C / (480 * A**4), rtol=1e-6)

    def test_central_difference(self):
        s = StackConfig(Vacuum(), Plate(ConstantEpsMu(3.0, 1.5), 0.5 * A), Plate(ConstantEpsMu(8.0), 2 * A),
                        A, mass_from_bar(0.7, A))
        h = 1e-3 * A
        fd = -(te_energy(s.with_separation(A + h), length_unit=A).value
               - te_energy(s.with_separation(A - h), length_unit=A).value) / (2 * h)
        np.testing.assert_allclose(te_force(s).value, fd, rtol=1e-4)

    @pytest.mark.parametrize("m", [0.0, 1.0, 3.0])
    def test_boyer_repulsive(self, m):
        assert te_force(boyer(m)).value > 0.0
        assert te_force(boyer(m, ConstantIndex(2.0))).value > 0.0

    def test_thickness_independence_for_conductors(self):
        ref = te_force(StackConfig.symmetric(PerfectConductor(), A, m_bar=1.0)).value
        for tl, tr in [(0.1 * A, 10 * A), (10 * A, 10 * A)]:
            s = StackConfig(Vacuum(), Plate(PerfectConductor(), tl), Plate(PerfectConductor(), tr), A,
                            mass_from_bar(1.0, A))
            np.testing.assert_allclose(te_force(s).value, ref, rtol=1e-12)
