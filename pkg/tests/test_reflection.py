import numpy as np
import pytest

from proca_casimir.errors import DegenerateInputError
from proca_casimir.kinematics import make_kinematics
from proca_casimir.materials import ConstantEpsMu, ConstantIndex, PerfectConductor, Plasma, Vacuum
from proca_casimir.reflection import (
    alpha,
    beta,
    coefficients,
    d_coefficient,
    delta_I,
    delta_II,
    delta_III,
    effective_permittivity,
    kappa_plus,
    limit_delta,
    limit_lambda,
    one_minus_delta_II,
    r_plus,
)
from proca_casimir.stack import HBAR, C_LIGHT, Plate, StackConfig, mass_from_bar

A = 1e-6
U = np.array([0.3, 1.0, 2.0, 0.05])
V = np.array([0.7, 1.0, 1.0, 3.0])


def kin_for(plate, m_bar=1.0, background=None):
    return make_kinematics(StackConfig.symmetric(plate, A, background=background, m_bar=m_bar), U, V)


class TestIdenticalMedia:
    def test_ratios_vanish(self):
        kin = kin_for(ConstantEpsMu(2.0, 1.5), background=ConstantEpsMu(2.0, 1.5))
        for fn in (delta_I, delta_II, delta_III):
            np.testing.assert_array_equal(fn(kin, "l"), 0.0)
        np.testing.assert_array_equal(one_minus_delta_II(kin, "l"), 1.0)

    def test_pair_coefficients(self):
        kin = kin_for(ConstantEpsMu(3.0))
        for j in ("b", "l"):
            np.testing.assert_array_equal(alpha(kin, j, j), 0.0)
            np.testing.assert_array_equal(beta(kin, j, j), 0.0)
            np.testing.assert_allclose(r_plus(kin, j, j), 2.0, rtol=1e-15)
            np.testing.assert_allclose(kappa_plus(kin, j, j), 2.0, rtol=1e-15)


class TestLimits:
    def test_large_permittivity(self):
        kin = kin_for(ConstantEpsMu(1e16), m_bar=0.0)
        np.testing.assert_allclose(delta_I(kin, "l"), 1.0, atol=1e-5)
        np.testing.assert_allclose(delta_II(kin, "l"), 1.0, atol=1e-5)

    def test_large_permeability(self):
        kin = kin_for(ConstantEpsMu(1.0, 1e16), m_bar=0.0)
        np.testing.assert_allclose(delta_I(kin, "l"), -1.0, atol=1e-5)
        np.testing.assert_allclose(delta_II(kin, "l"), -1.0, atol=1e-5)

    def test_longitudinal_ratio_tends_to_limit_delta(self):
        prev = np.inf
        for k in range(2, 7):
            kin = kin_for(ConstantEpsMu(10.0**k), background=ConstantIndex(1.5))
            dev = np.max(np.abs(delta_III(kin, "l") - limit_delta(kin)))
            assert dev < prev
            prev = dev
        assert prev < 1e-4

    @pytest.mark.parametrize("pair", [("l", "b"), ("b", "l")])
    def test_mixing_combination_tends_to_lambda(self, pair):
        # alpha beta / (kappa+ r+) of one ordered pair; the approach is O(eps**-1/2)
        devs = []
        for eps in (1e4, 1e6, 1e8):
            kin = kin_for(ConstantEpsMu(eps), background=ConstantIndex(1.5))
            combo = alpha(kin, *pair) * beta(kin, *pair) / (kappa_plus(kin, *pair) * r_plus(kin, *pair))
            devs.append(np.max(np.abs(combo / limit_lambda(kin) - 1.0)))
        assert devs[1] < 1e-2
        np.testing.assert_allclose(devs[1] / devs[2], 10.0, rtol=0.1)

    def test_limit_delta_printed_form(self):
        kin = kin_for(PerfectConductor(), background=ConstantIndex(2.0))
        q0, qL, k2 = kin.q0, kin.q_L["b"], kin.k2
        num = q0 * (qL**2 - k2) - qL * (q0**2 - k2)
        den = q0 * (qL**2 - k2) + qL * (q0**2 - k2)
        np.testing.assert_allclose(limit_delta(kin), num / den, rtol=1e-12)

    def test_limit_lambda_printed_form(self):
        kin = kin_for(PerfectConductor(), background=ConstantIndex(2.0))
        q0, qL, qT, k2 = kin.q0, kin.q_L["b"], kin.q_T["b"], kin.k2
        ref = (k2 / qT) * (q0**2 - qL**2) / (qL * (q0**2 - k2) + q0 * (qL**2 - k2))
        np.testing.assert_allclose(limit_lambda(kin), ref, rtol=1e-12)


class TestMassless:
    def test_transverse_ratio_reduces(self):
        kin = kin_for(ConstantEpsMu(5.0, 2.0), m_bar=0.0, background=ConstantEpsMu(1.5, 1.2))
        eb, el = kin.eps["b"], kin.eps["l"]
        qb, ql = kin.q_T["b"], kin.q_T["l"]
        np.testing.assert_allclose(delta_II(kin, "l"), (qb * el - ql * eb) / (qb * el + ql * eb), rtol=1e-13)

    def test_longitudinal_coefficients_vanish(self):
        kin = kin_for(ConstantEpsMu(5.0, 2.0), m_bar=0.0, background=ConstantIndex(1.3))
        np.testing.assert_array_equal(delta_III(kin, "l"), 0.0)
        np.testing.assert_array_equal(alpha(kin, "l", "b"), 0.0)
        np.testing.assert_array_equal(alpha(kin, "b", "l"), 0.0)


class TestTransverseDefinitions:
    def test_delta_I(self):
        kin = kin_for(ConstantEpsMu(4.0, 2.0), background=ConstantEpsMu(1.5, 1.2))
        ref = (kin.q_T["l"] * 1.2 - kin.q_T["b"] * 2.0) / (kin.q_T["l"] * 1.2 + kin.q_T["b"] * 2.0)
        np.testing.assert_allclose(delta_I(kin, "l"), ref, rtol=1e-14)

    def test_delta_II(self):
        kin = kin_for(ConstantEpsMu(4.0, 2.0), background=ConstantEpsMu(1.5, 1.2))
        qb, qj, k2 = kin.q_T["b"], kin.q_T["l"], kin.k2
        num = 1.2 * qb * (qj**2 - k2) - 2.0 * qj * (qb**2 - k2)
        den = 1.2 * qb * (qj**2 - k2) + 2.0 * qj * (qb**2 - k2)
        np.testing.assert_allclose(delta_II(kin, "l"), num / den, rtol=1e-12)

    def test_alpha_definition(self):
        kin = kin_for(ConstantEpsMu(4.0, 2.0), background=ConstantIndex(1.5))
        qa, qb, k2 = kin.q_L["l"], kin.q_L["b"], kin.k2
        np.testing.assert_allclose(alpha(kin, "l", "b"), (qa**2 - qb**2) / (qb**2 - k2), rtol=1e-10)


class TestDCoefficient:
    def test_massless_zero(self):
        np.testing.assert_array_equal(d_coefficient(kin_for(Vacuum(), m_bar=0.0)), 0.0)

    def test_static_point(self):
        kin = make_kinematics(StackConfig.symmetric(Vacuum(), A, m_bar=1.3), 0.0, 0.8)
        s = np.sqrt(0.64 + 1.69)
        np.testing.assert_allclose(d_coefficient(kin), (s - 0.8) / (s + 0.8), rtol=1e-14)

    def test_large_wavenumber(self):
        kin = make_kinematics(StackConfig.symmetric(Vacuum(), A, m_bar=1.0), 0.1, 1e8)
        assert d_coefficient(kin) < 1e-16


class TestEffectivePermittivity:
    def test_massless(self):
        assert effective_permittivity(1e15, 0.0) == 1.0

    def test_matches_plasma(self):
        m = mass_from_bar(1.0, A)
        xi = np.geomspace(1e12, 1e18, 7)
        np.testing.assert_allclose(effective_permittivity(xi, m), Plasma(m * C_LIGHT**2 / HBAR).eps(xi), rtol=1e-15)

    def test_high_frequency(self):
        np.testing.assert_allclose(effective_permittivity(1e30, mass_from_bar(1.0, A)), 1.0, rtol=1e-15)

    def test_background_divides(self):
        m = mass_from_bar(1.0, A)
        xi = 3e14
        np.testing.assert_allclose(effective_permittivity(xi, m, 4.0) - 1.0,
                                   (effective_permittivity(xi, m) - 1.0) / 4.0, rtol=1e-15)


class TestCoefficientSet:
    def test_real_plates_only(self):
        cs = coefficients(kin_for(PerfectConductor()))
        assert cs.plates == {}
        assert np.all((cs.D >= 0) & (cs.D < 1))

    def test_singular_point_reported(self):
        kin = make_kinematics(StackConfig.symmetric(Vacuum(), A, m_bar=0.0), 0.0, 1.0)
        with pytest.raises(DegenerateInputError):
            alpha(kin, "l", "b")
