import logging
import math

import numpy as np
import pytest

from proca_casimir import oracle, tm
from proca_casimir.errors import DegenerateInputError, SplitUnavailableError
from proca_casimir.kinematics import make_kinematics
from proca_casimir.materials import ConstantEpsMu, ConstantIndex, InfinitelyPermeable, PerfectConductor, Vacuum
from proca_casimir.reflection import CoefficientSet, coefficients
from proca_casimir.stack import HBAR_C, Plate, StackConfig, mass_from_bar
from proca_casimir.te import te_energy, te_integrand

A = 1e-6
U = np.array([0.5, 1.0, 2.0, 0.1, 3.0])
V = np.array([0.5, 1.0, 1.0, 2.5, 0.2])


def general(m_bar=1.0, background=None):
    return StackConfig(background or ConstantEpsMu(1.5, 1.2), Plate(ConstantEpsMu(3.0, 2.0), 0.5 * A),
                       Plate(ConstantEpsMu(10.0), 2.0 * A), A, mass_from_bar(m_bar, A))


def ideal(left, right, m_bar=1.0, background=None, tl=A, tr=A):
    return StackConfig(background or Vacuum(), Plate(left, tl), Plate(right, tr), A, mass_from_bar(m_bar, A))


def qmat(stack, u=U, v=V, **kw):
    kin = make_kinematics(stack, u, v, kw.pop("length_unit", None))
    return tm.build_q(stack, kin, coefficients(kin), **kw), kin


def gap_exp(q, a=1.0):
    return np.exp(-q * a)


class TestBuildQ:
    def test_sparsity_of_q_inf(self):
        qm, _ = qmat(general())
        for i, j in tm.GAP_ENTRIES:
            np.testing.assert_array_equal(qm.Q_inf[..., i, j], 0.0)
        kept = [(i, j) for i in range(4) for j in range(4) if (i, j) not in tm.GAP_ENTRIES]
        for i, j in kept:
            np.testing.assert_array_equal(qm.Q_inf[..., i, j], qm.Q[..., i, j])

    def test_large_separation_collapses_to_q_inf(self):
        qm, _ = qmat(general(), length_unit=A / 2000.0)
        np.testing.assert_array_equal(qm.Q, qm.Q_inf)
        np.testing.assert_array_equal(tm.log_det_ratio(qm), 0.0)

    def test_massless_sparsity(self):
        qm, _ = qmat(general(m_bar=0.0), conditioned=False)
        for i, j in ((0, 1), (1, 1), (0, 3), (1, 3)):
            np.testing.assert_array_equal(qm.Q[..., i, j], 0.0)

    def test_identical_media_ratio_is_one(self):
        s = StackConfig.symmetric(ConstantEpsMu(2.0, 1.5), A, background=ConstantEpsMu(2.0, 1.5), m_bar=1.0)
        np.testing.assert_array_equal(tm.general_tm_integrand(s, U, V), 0.0)
        np.testing.assert_array_equal(tm.tm_integrand(s, U, V), 0.0)

    def test_rejects_limit_kinds(self):
        s = ideal(PerfectConductor(), PerfectConductor())
        kin = make_kinematics(s, U, V)
        with pytest.raises(DegenerateInputError):
            tm.build_q(s, kin, coefficients(kin))

    def test_conditioning_preserves_ratio(self):
        s = general()
        np.testing.assert_allclose(tm.general_tm_integrand(s, U, V, conditioned=False),
                                   tm.general_tm_integrand(s, U, V), rtol=1e-12, atol=1e-15)

    def test_scaling_matches_unscaled_determinants(self):
        # moderate q t so the raw matrices stay representable
        qm, _ = qmat(general())
        factor = np.exp(qm.column_scale)[..., None, :]
        raw, raw_inf = qm.Q * factor, qm.Q_inf * factor
        ratio = np.log(np.linalg.det(raw) / np.linalg.det(raw_inf))
        np.testing.assert_allclose(tm.log_det_ratio(qm), ratio, rtol=1e-10, atol=1e-14)
        assert np.max(qm.column_scale) < 30.0

    def test_cofactor_determinant(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(5, 4, 4))
        det, M = tm.cofactor_det(m)
        np.testing.assert_allclose(det, np.linalg.det(m), rtol=1e-12)
        np.testing.assert_allclose(M[2, 1, 3], np.linalg.det(np.delete(np.delete(m[2], 1, 0), 3, 1)), rtol=1e-12)

    def test_perturbation_hook_restores(self):
        s = general()
        base = tm.general_tm_integrand(s, U, V)
        with tm.perturbed_q_entry(1, 3, 1.1):
            assert np.all(tm.general_tm_integrand(s, U, V) != base)
        np.testing.assert_array_equal(tm.general_tm_integrand(s, U, V), base)


class TestGeneralIntegrand:
    def test_massless_matches_scalar_formula(self):
        s = general(m_bar=0.0)
        np.testing.assert_allclose(tm.general_tm_integrand(s, U, V),
                                   oracle.massless_tm_reference_integrand(s, U, V), rtol=1e-10)
        np.testing.assert_allclose(tm.tm_integrand(s, U, V),
                                   oracle.massless_tm_reference_integrand(s, U, V), rtol=1e-10)

    def test_minors_force_matches_gap_derivative(self):
        for m in (0.0, 1.0):
            s = general(m_bar=m)
            h = 1e-5 * A
            up = tm.general_tm_integrand(s.with_separation(A + h), U, V, length_unit=A)
            down = tm.general_tm_integrand(s.with_separation(A - h), U, V, length_unit=A)
            qm, kin = qmat(s)
            np.testing.assert_allclose(tm.minors_force_integrand(qm, kin), -(up - down) / (2e-5), rtol=1e-7)

    def test_minors_force_zero_for_identical_media(self):
        s = StackConfig.symmetric(ConstantEpsMu(2.0), A, background=ConstantEpsMu(2.0), m_bar=1.0)
        qm, kin = qmat(s)
        np.testing.assert_array_equal(tm.minors_force_integrand(qm, kin), 0.0)

    def test_tail_bound(self):
        s = general()
        for gap in (2.0, 4.0, 8.0):
            kin = make_kinematics(s.with_separation(gap * A), U, V, length_unit=A)
            val = tm.general_tm_integrand(s.with_separation(gap * A), U, V, length_unit=A)
            qmin = np.minimum(kin.q_T["b"], kin.q_L["b"])
            assert np.all(np.abs(val) <= 10.0 * np.exp(-2.0 * qmin * gap))


class TestConductorClosedForm:
    def test_zero_coefficients_give_single_exponential(self):
        s = ideal(PerfectConductor(), PerfectConductor(), tl=0.3 * A, tr=2 * A)
        kin = make_kinematics(s, U, V)
        zeros = np.zeros_like(U)
        cs = CoefficientSet({}, zeros, zeros, zeros)
        w, w_inf = tm.conductor_w(s, kin, cs)
        np.testing.assert_allclose(w / w_inf, 1.0 - np.exp(-2.0 * kin.q_T["b"]), rtol=1e-15)

    def test_unit_index_factorizes(self):
        s = ideal(PerfectConductor(), PerfectConductor(), tl=0.5 * A, tr=3 * A)
        kin = make_kinematics(s, U, V)
        cs = coefficients(kin)
        w, w_inf = tm.conductor_w(s, kin, cs)
        qm, q0, D = kin.qm, kin.q0, cs.D
        el, er = np.exp(-2 * q0 * 0.5), np.exp(-2 * q0 * 3.0)
        second = D**2 * (1 - el) * (1 - er) / ((1 - D**2 * el) * (1 - D**2 * er))
        np.testing.assert_allclose(w / w_inf, (1 - np.exp(-2 * qm)) * (1 - second * np.exp(-2 * qm)), rtol=1e-13)

    def test_thick_plates(self):
        s = ideal(PerfectConductor(), PerfectConductor(), background=ConstantIndex(2.0), tl=1e3 * A, tr=1e3 * A)
        kin = make_kinematics(s, U, V)
        cs = coefficients(kin)
        L, D = cs.Lambda, cs.Delta
        xT, xL = np.exp(-2 * kin.q_T["b"]), np.exp(-2 * kin.q_L["b"])
        xTL = np.exp(-kin.q_T["b"] - kin.q_L["b"])
        ref = ((1 - L) ** 4 - (1 - L**2) ** 2 * xT - ((1 - L) * (D - L)) ** 2 * xL
               + 4 * L * (1 - D) * (1 - L) ** 2 * xTL + (1 - L) ** 2 * (D + L) ** 2 * xT * xL) / (1 - L) ** 4
        w, w_inf = tm.conductor_w(s, kin, cs)
        np.testing.assert_allclose(w / w_inf, ref, rtol=1e-13)

    def test_massless_energy(self):
        s = ideal(PerfectConductor(), PerfectConductor(), m_bar=0.0)
        np.testing.assert_allclose(tm.tm_energy(s).value, -math.pi**2 * HBAR_C / (1440 * A**3), rtol=1e-6)
        np.testing.assert_allclose(tm.total_energy(s).value, -math.pi**2 * HBAR_C / (720 * A**3), rtol=1e-6)

    def test_thickness_labels_irrelevant_for_symmetric_swap(self):
        s = ideal(PerfectConductor(), PerfectConductor(), tl=0.2 * A, tr=5 * A)
        np.testing.assert_allclose(tm.tm_integrand(s, U, V), tm.tm_integrand(s.swapped(), U, V), rtol=1e-14)


class TestMixedClosedForm:
    def test_massless_unit_index(self):
        s = ideal(PerfectConductor(), InfinitelyPermeable(), m_bar=0.0)
        np.testing.assert_allclose(tm.tm_integrand(s, U, V), np.log1p(np.exp(-2 * np.hypot(U, V))), rtol=1e-14)

    def test_thick_plates(self):
        s = ideal(PerfectConductor(), InfinitelyPermeable(), background=ConstantIndex(2.0), tl=1e3 * A, tr=1e3 * A)
        kin = make_kinematics(s, U, V)
        cs = coefficients(kin)
        L, D = cs.Lambda, cs.Delta
        xT, xL = np.exp(-2 * kin.q_T["b"]), np.exp(-2 * kin.q_L["b"])
        ref = 1 + (1 - L**2) / (1 - L) ** 2 * xT - D * (D - L) / (1 - L) * xL - D * (D + L) / (1 - L) * xT * xL
        w, w_inf = tm.boyer_w(s, kin, cs)
        np.testing.assert_allclose(w / w_inf, ref, rtol=1e-13)

    def test_large_separation(self):
        s = ideal(PerfectConductor(), InfinitelyPermeable())
        kin = make_kinematics(s, U, V, length_unit=A / 1000)
        w, w_inf = tm.boyer_w(s, kin, coefficients(kin))
        np.testing.assert_array_equal(w, w_inf)

    def test_orientation_invariance(self):
        s = ideal(PerfectConductor(), InfinitelyPermeable(), background=ConstantIndex(2.0), tl=0.4 * A, tr=3 * A)
        np.testing.assert_allclose(tm.tm_energy(s.swapped()).value, tm.tm_energy(s).value, rtol=1e-10)


class TestPolarizationSplit:
    def test_first_polarization_equals_te(self):
        for s in (ideal(PerfectConductor(), PerfectConductor(), m_bar=0.8, tl=0.3 * A),
                  ideal(InfinitelyPermeable(), InfinitelyPermeable(), m_bar=0.8, background=ConstantIndex(2.0))):
            np.testing.assert_array_equal(tm._split_parts(s, U, V, None, 1)[0], te_integrand(s, U, V))
            np.testing.assert_allclose(tm.tm_first_polarization_energy(s).value, te_energy(s).value, rtol=1e-15)

    def test_split_sums_to_tm(self):
        for s in (ideal(PerfectConductor(), PerfectConductor(), m_bar=2.0),
                  ideal(InfinitelyPermeable(), InfinitelyPermeable(), m_bar=2.0, background=ConstantIndex(1.5))):
            total = tm.tm_energy(s).value
            parts = tm.tm_first_polarization_energy(s).value + tm.tm_second_polarization_energy(s).value
            np.testing.assert_allclose(parts, total, rtol=1e-8)

    def test_massless_second_polarization_vanishes(self):
        for s in (ideal(PerfectConductor(), PerfectConductor(), m_bar=0.0),
                  ideal(InfinitelyPermeable(), InfinitelyPermeable(), m_bar=0.0, background=ConstantIndex(2.0))):
            assert tm.tm_second_polarization_energy(s).value == 0.0

    def test_thin_permeable_plates(self):
        s = ideal(InfinitelyPermeable(), InfinitelyPermeable(), tl=1e-12 * A)
        assert np.max(np.abs(tm.tm_second_polarization_integrand(s, U, V))) < 1e-10

    def test_conductor_radial_reference(self):
        s = ideal(PerfectConductor(), PerfectConductor(), m_bar=1.0)
        res = tm.tm_second_polarization_energy(s)
        assert res.value < 0.0
        np.testing.assert_allclose(res.dimensionless, oracle.conductor_second_polarization_radial(1.0), rtol=1e-8)

    def test_second_polarization_force_attractive(self):
        for m in (0.5, 2.0):
            assert tm.tm_second_polarization_force(ideal(PerfectConductor(), PerfectConductor(), m_bar=m)).value < 0
            assert tm.tm_second_polarization_force(
                ideal(InfinitelyPermeable(), InfinitelyPermeable(), m_bar=m, background=ConstantIndex(2.0))).value < 0

    @pytest.mark.parametrize(
        "stack",
        [general(), ideal(PerfectConductor(), InfinitelyPermeable()),
         ideal(PerfectConductor(), PerfectConductor(), background=ConstantIndex(2.0))],
    )
    def test_unavailable(self, stack):
        with pytest.raises(SplitUnavailableError):
            tm.tm_second_polarization_energy(stack)
        with pytest.raises(SplitUnavailableError):
            tm.tm_first_polarization_force(stack)


class TestIntegrated:
    def test_swap_symmetry(self):
        s = general()
        np.testing.assert_allclose(tm.tm_energy(s.swapped()).value, tm.tm_energy(s).value, rtol=1e-10)

    def test_large_separation_vanishes(self):
        s = general()
        assert abs(tm.tm_energy(s.with_separation(1e3 * A)).value) < 1e-9 * abs(tm.tm_energy(s).value)

    def test_identical_media_zero(self):
        s = StackConfig.symmetric(ConstantEpsMu(2.0), A, background=ConstantEpsMu(2.0), m_bar=1.0)
        assert tm.tm_energy(s).value == 0.0
        assert tm.tm_force_minors(s).value == 0.0
        assert tm.total_force(s).value == 0.0

    def test_massless_force_matches_scalar_derivative(self):
        s0 = general(m_bar=0.0)
        h = 1e-3 * A
        e_up = oracle.massless_lifshitz_tm(s0.with_separation(A + h)).value
        e_dn = oracle.massless_lifshitz_tm(s0.with_separation(A - h)).value
        ref = -(e_up - e_dn) / (2 * h)
        np.testing.assert_allclose(tm.tm_force_minors(s0).value, ref, rtol=1e-5)

    def test_minors_force_rejects_limits(self):
        with pytest.raises(DegenerateInputError):
            tm.tm_force_minors(ideal(PerfectConductor(), PerfectConductor()))

    def test_positive_ratio_warning(self, caplog):
        # magnetic against dielectric plate: repulsive-like ratio
        s = StackConfig(Vacuum(), Plate(ConstantEpsMu(1.0, 50.0), A), Plate(ConstantEpsMu(50.0), A), A,
                        mass_from_bar(0.5, A))
        with caplog.at_level(logging.WARNING, logger="proca_casimir.tm"):
            tm.tm_energy(s)
        assert any("positive" in r.message for r in caplog.records)


class TestSelfTest:
    def test_passes(self):
        results = tm.self_test()
        assert len(results) == 6
        assert all(ok for _, ok, _ in results), results

    def test_detects_perturbed_entry(self):
        with tm.perturbed_q_entry(1, 3, 1.1):
            failed = [name for name, ok, _ in tm.self_test() if not ok]
        assert any(name.startswith("ladder") for name in failed)
