"""Transverse-magnetic channel: coupled type-II transverse and longitudinal modes.

For real plates the energy integrand is ``ln det(Q) / det(Q_inf)`` with the
4x4 matrix ``Q`` built from the interface coefficients. ``Q_inf`` is ``Q``
with the gap-propagation entries removed. For ideal plates the closed forms
``W / W_inf`` (two conductors), the two-factor permeable form, and the
mixed conductor/permeable form are integrated directly.

Numerical treatment of Q
------------------------
The entries grow like ``exp(q t)`` inside each plate. Beyond overflow, the two
columns that belong to one plate become nearly parallel at large contrast and
the determinant cancels catastrophically. Both issues are removed exactly:

* the second column of each plate has ``A`` times the first column subtracted,
  with ``A = alpha_bj r_jb / (kappa_bj kappa_jb)``; this cancels the common
  ``exp(q_T t)`` direction analytically and leaves every determinant unchanged;
* each column is divided by its largest growth factor (``column_scale``).

Neither operation touches the sparsity pattern of ``Q_inf``, and both act on
whole columns, so determinant ratios and the minors force formula are
unaffected. The determinant ratio itself is evaluated as ``det(1 - K)`` with
the 2x2 round-trip matrix ``K`` built from the blocks of ``Q``. This is
algebraically identical to ``det Q / det Q_inf`` and keeps full relative
accuracy when the ratio is close to 1.
"""

from __future__ import annotations

import contextlib
import logging
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import ConditioningError, DegenerateInputError, SplitUnavailableError
from .kinematics import Kinematics, make_kinematics
from .quadrature import QuadratureSpec
from .reflection import CoefficientSet, coefficients, delta_II
from .results import EnergyResult, combine, integrate_channel
from .stack import LimitKind, StackConfig, classify, conductor_on_left
from .te import EXPONENT_CUTOFF, gap_factor, slab_reflectance, te_energy, te_force

logger = logging.getLogger(__name__)

# 0-based positions that vanish in Q_inf
GAP_ENTRIES = ((0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 2), (3, 3))

_perturbations: dict[tuple[int, int], float] = {}


@contextlib.contextmanager
def perturbed_q_entry(row: int, col: int, factor: float) -> Iterator[None]:
    """Test hook: multiply entry ``(row, col)`` (1-based) of every built Q by ``factor``."""
    key = (row - 1, col - 1)
    previous = _perturbations.get(key)
    _perturbations[key] = factor
    try:
        yield
    finally:
        if previous is None:
            _perturbations.pop(key, None)
        else:
            _perturbations[key] = previous


@dataclass(frozen=True)
class QMatrices:
    """Scaled ``Q`` and ``Q_inf`` stacks of shape ``(..., 4, 4)``.

    ``column_scale[..., c]`` is the natural log of the factor divided out of
    column ``c`` of both matrices.
    """

    Q: np.ndarray
    Q_inf: np.ndarray
    column_scale: np.ndarray


def _exp_gap(q, gap: float):
    """``exp(-q a)`` with the same cutoff as the energy channels."""
    arg = q * gap
    return np.where(2.0 * arg > EXPONENT_CUTOFF, 0.0, np.exp(-np.minimum(arg, EXPONENT_CUTOFF)))


def _plate_columns(kin: Kinematics, cs: CoefficientSet, j: str, tau: float, conditioned: bool):
    """Two columns of plate ``j`` in row order (gap T, far T, gap L, far L), without gap factors."""
    c = cs.plates[j]
    d, od, g = c.d_II, c.one_minus_d_II, c.d_III
    A = c.alpha_bj * c.r_jb / (c.kappa_bj * c.kappa_jb)
    B = c.alpha_jb / c.kappa_jb
    P = c.alpha_jb * c.beta_bj / (c.r_jb * c.r_bj)
    Rb = c.beta_jb / c.r_jb
    S = c.beta_bj * c.kappa_jb / (c.r_bj * c.r_jb)
    Tt = kin.q_T[j] * tau
    Lt = kin.q_L[j] * tau
    eT, eL = np.exp(-2.0 * Tt), np.exp(-2.0 * Lt)
    omT, omL = -np.expm1(-2.0 * Tt), -np.expm1(-2.0 * Lt)

    s1 = np.maximum(Tt, Lt)
    ET, EL = np.exp(Tt - s1), np.exp(Lt - s1)
    col1 = np.stack([
        -d * omT * ET + P * omL * EL,
        (1.0 - d * d * eT) * ET + P * omL * EL,
        -Rb * (1.0 - d * eT) * ET - S * (g + eL) * EL,
        Rb * (1.0 - d * eT) * ET + S * (1.0 + g * eL) * EL,
    ], axis=-1)
    if conditioned:
        s2 = Lt
        tail = np.exp(-Tt - Lt)  # exp(-q_T t) after removing exp(q_L t)
        common = B * (1.0 + g * eL) - A * P * omL
        col2 = np.stack([
            A * od * tail + common,
            -A * d * od * tail + common,
            A * Rb * od * tail - g * omL + A * S * (g + eL),
            -A * Rb * od * tail + (1.0 - g * g * eL) - A * S * (1.0 + g * eL),
        ], axis=-1)
    else:
        s2 = s1
        col2 = np.stack([
            -A * (d - eT) * ET + B * (1.0 + g * eL) * EL,
            A * (1.0 - d * eT) * ET + B * (1.0 + g * eL) * EL,
            -A * Rb * omT * ET - g * omL * EL,
            A * Rb * omT * ET + (1.0 - g * g * eL) * EL,
        ], axis=-1)
    return col1, col2, s1, s2


def build_q(
    stack: StackConfig,
    kin: Kinematics,
    coeffs: CoefficientSet,
    *,
    conditioned: bool = True,
) -> QMatrices:
    """Assemble the scaled ``Q`` and ``Q_inf`` for real plates.

    Parameters
    ----------
    stack : StackConfig
        Only used to check that both plates are real materials.
    kin : Kinematics
    coeffs : CoefficientSet
    conditioned : bool
        Apply the column operation that removes the shared growth direction.
        Determinants are identical either way; without it they lose accuracy
        at large contrast.
    """
    if classify(stack) is not LimitKind.GENERAL:
        raise DegenerateInputError("build_q requires real plates; limit kinds use closed forms")
    sc = kin.scales
    l1, l2, sl1, sl2 = _plate_columns(kin, coeffs, "l", sc.tau_l, conditioned)
    r1, r2, sr1, sr2 = _plate_columns(kin, coeffs, "r", sc.tau_r, conditioned)
    eTb = _exp_gap(kin.q_T["b"], sc.gap)
    eLb = _exp_gap(kin.q_L["b"], sc.gap)
    gap_left = np.stack([eTb, np.ones_like(eTb), eLb, np.ones_like(eLb)], axis=-1)
    gap_right = np.stack([np.ones_like(eTb), eTb, np.ones_like(eLb), eLb], axis=-1)
    right_rows = [1, 0, 3, 2]
    Q = np.stack([
        l1 * gap_left,
        l2 * gap_left,
        r1[..., right_rows] * gap_right,
        r2[..., right_rows] * gap_right,
    ], axis=-1)
    for (i, jj), factor in _perturbations.items():
        Q[..., i, jj] *= factor
    if not np.all(np.isfinite(Q)):
        bad = np.argwhere(~np.all(np.isfinite(Q), axis=(-2, -1)))[0]
        raise ConditioningError(
            f"Q overflow at u={kin.u[tuple(bad)]!r}, v={kin.v[tuple(bad)]!r}"
        )
    Q_inf = Q.copy()
    for i, jj in GAP_ENTRIES:
        Q_inf[..., i, jj] = 0.0
    scale = np.stack([sl1, sl2, sr1, sr2], axis=-1)
    return QMatrices(Q=Q, Q_inf=Q_inf, column_scale=scale)


def _det3(m):
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def minors(Q: np.ndarray) -> np.ndarray:
    """All 3x3 minors ``M[..., i, j]`` of a stack of 4x4 matrices."""
    out = np.empty_like(Q)
    idx = np.arange(4)
    for i in range(4):
        rows = idx[idx != i]
        for j in range(4):
            cols = idx[idx != j]
            out[..., i, j] = _det3(Q[..., rows[:, None], cols[None, :]])
    return out


def cofactor_det(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinant by first-row cofactor expansion, with all minors."""
    M = minors(Q)
    signs = np.array([1.0, -1.0, 1.0, -1.0])
    return np.sum(signs * Q[..., 0, :] * M[..., 0, :], axis=-1), M


def _inv2(m, what: str):
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    if np.any(det == 0.0):
        raise DegenerateInputError(f"det(Q_inf) vanishes ({what} block)")
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    return inv / det[..., None, None]


def log_det_ratio(qm: QMatrices) -> np.ndarray:
    """``ln det(Q) / det(Q_inf)`` evaluated as ``ln det(1 - K)``.

    ``Q_inf`` is block anti-diagonal: rows (2, 4) couple only to the left
    columns and rows (1, 3) only to the right columns. With the gap blocks
    ``X_l`` (rows 1, 3 of the left columns) and ``X_r`` (rows 2, 4 of the right
    columns), ``K = R^-1 X_l L^-1 X_r`` and ``det Q / det Q_inf = det(1 - K)``.
    """
    Q = qm.Q
    left = Q[..., [1, 3], :][..., :, [0, 1]]
    right = Q[..., [0, 2], :][..., :, [2, 3]]
    x_left = Q[..., [0, 2], :][..., :, [0, 1]]
    x_right = Q[..., [1, 3], :][..., :, [2, 3]]
    K = (_inv2(right, "right") @ x_left) @ (_inv2(left, "left") @ x_right)
    trace = K[..., 0, 0] + K[..., 1, 1]
    det = K[..., 0, 0] * K[..., 1, 1] - K[..., 0, 1] * K[..., 1, 0]
    return np.log1p(det - trace)


def minors_force_integrand(qm: QMatrices, kin: Kinematics) -> np.ndarray:
    """``-d/da ln det Q`` from the cofactor expansion (bare force integrand)."""
    Q = qm.Q
    det, M = cofactor_det(Q)
    if np.any(det == 0.0):
        raise DegenerateInputError("det(Q) vanishes")
    transverse = Q[..., 0, 0] * M[..., 0, 0] - Q[..., 0, 1] * M[..., 0, 1] \
        - Q[..., 1, 2] * M[..., 1, 2] + Q[..., 1, 3] * M[..., 1, 3]
    longitudinal = Q[..., 2, 0] * M[..., 2, 0] - Q[..., 2, 1] * M[..., 2, 1] \
        - Q[..., 3, 2] * M[..., 3, 2] + Q[..., 3, 3] * M[..., 3, 3]
    return (kin.q_T["b"] * transverse + kin.q_L["b"] * longitudinal) / det


# ---------------------------------------------------------------------------
# exponential polynomials  W = W_inf + sum_k c_k exp(-rate_k a)

def _terms_log_and_force(w_inf, terms, gap: float):
    """Energy and force integrands for ``W = w_inf + sum c exp(-rate a)``.

    Returns ``ln(W / w_inf)`` and ``-d/da ln W``.
    """
    if np.any(w_inf == 0.0):
        raise DegenerateInputError("limiting determinant W_inf vanishes")
    delta = 0.0
    slope = 0.0
    for coef, rate in terms:
        x = _exp_gap(rate, gap)
        delta = delta + coef * x
        slope = slope + rate * coef * x
    ratio_m1 = delta / w_inf
    return np.log1p(ratio_m1), slope / (w_inf + delta)


def _thickness_factors(kin: Kinematics):
    """``exp(-2 q0 t)`` and ``1 - exp(-2 q0 t)`` for both plates."""
    sc = kin.scales
    al, ar = -2.0 * kin.q0 * sc.tau_l, -2.0 * kin.q0 * sc.tau_r
    return np.exp(al), np.exp(ar), -np.expm1(al), -np.expm1(ar)


def _conductor_terms(kin: Kinematics, cs: CoefficientSet):
    Lm, Dl = cs.Lambda, cs.Delta
    el, er, oml, omr = _thickness_factors(kin)
    qT, qL = kin.q_T["b"], kin.q_L["b"]

    def pair(f):
        return f(el) * f(er)

    w_inf = pair(lambda e: (1 - Lm) ** 2 - (Dl + Lm) ** 2 * e)
    terms = [
        (-pair(lambda e: (1 - Lm * Lm) - (Dl * Dl - Lm * Lm) * e), 2 * qT),
        (-pair(lambda e: (1 - Lm) * (Dl - Lm) - (1 + Lm) * (Dl + Lm) * e), 2 * qL),
        (4 * Lm * (1 - Dl) * pair(lambda e: (1 - Lm) + (Dl + Lm) * e), qT + qL),
        ((1 - Lm) ** 2 * (Dl + Lm) ** 2 * oml * omr, 2 * (qT + qL)),
    ]
    return w_inf, terms


def _boyer_terms(kin: Kinematics, cs: CoefficientSet, conductor_left: bool):
    """Terms of the conductor/permeable ratio.

    The factor ``1 - Delta**2 e`` belongs to the permeable plate and the
    ``(1 - Lambda)**2 - (Delta + Lambda)**2 e`` family to the conductor, each
    with its own thickness factor ``e = exp(-2 q0 t)``.
    """
    Lm, Dl = cs.Lambda, cs.Delta
    el, er, oml, omr = _thickness_factors(kin)
    if conductor_left:
        ec, ep, omc, omp = el, er, oml, omr
    else:
        ec, ep, omc, omp = er, el, omr, oml
    qT, qL = kin.q_T["b"], kin.q_L["b"]
    perm = 1 - Dl * Dl * ep
    w_inf = perm * ((1 - Lm) ** 2 - (Dl + Lm) ** 2 * ec)
    terms = [
        (perm * ((1 - Lm * Lm) - (Dl * Dl - Lm * Lm) * ec), 2 * qT),
        (-Dl * omp * ((1 - Lm) * (Dl - Lm) - (1 + Lm) * (Dl + Lm) * ec), 2 * qL),
        (-Dl * (1 - Lm) * (Dl + Lm) * omp * omc, 2 * (qT + qL)),
    ]
    return w_inf, terms


def _evaluate(w_inf, terms, gap):
    w = w_inf
    for coef, rate in terms:
        w = w + coef * _exp_gap(rate, gap)
    return w


def conductor_w(stack: StackConfig, kin: Kinematics, coeffs: CoefficientSet):
    """``(W, W_inf)`` for two perfectly conducting plates."""
    w_inf, terms = _conductor_terms(kin, coeffs)
    if np.any(w_inf == 0.0):
        raise DegenerateInputError("W_inf vanishes")
    return _evaluate(w_inf, terms, kin.scales.gap), w_inf


def boyer_w(stack: StackConfig, kin: Kinematics, coeffs: CoefficientSet):
    """``(W, W_inf)`` for one conducting and one infinitely permeable plate."""
    w_inf, terms = _boyer_terms(kin, coeffs, conductor_on_left(stack))
    if np.any(w_inf == 0.0):
        raise DegenerateInputError("W_inf vanishes")
    return _evaluate(w_inf, terms, kin.scales.gap), w_inf


def _second_polarization_reflectance(kin: Kinematics, cs: CoefficientSet, kind: LimitKind):
    """Round-trip reflectance and gap wavenumber of the second TM polarization."""
    sc = kin.scales
    if kind is LimitKind.CONDUCTOR_CONDUCTOR:
        amp, q = cs.D, kin.qm
    else:
        amp, q = cs.Delta, kin.q_L["b"]
    R = slab_reflectance(amp, kin.q0, sc.tau_l) * slab_reflectance(amp, kin.q0, sc.tau_r)
    return R, q


def permeable_w(stack: StackConfig, kin: Kinematics, coeffs: CoefficientSet):
    """Both factors of the permeable-plate ratio: ``(1 - x_T, 1 - R x_L)``."""
    R, q = _second_polarization_reflectance(kin, coeffs, LimitKind.PERMEABLE_PERMEABLE)
    gap = kin.scales.gap
    return 1.0 - gap_factor(kin.q_T["b"], gap), 1.0 - R * gap_factor(q, gap)


# ---------------------------------------------------------------------------
# integrands


def _unit_background(kin: Kinematics) -> bool:
    return bool(np.all(kin.eps["b"] * kin.mu["b"] == 1.0))


def _massless_parts(kin: Kinematics):
    sc = kin.scales
    R = slab_reflectance(delta_II(kin, "l"), kin.q_T["l"], sc.tau_l) \
        * slab_reflectance(delta_II(kin, "r"), kin.q_T["r"], sc.tau_r)
    return R, kin.q_T["b"]


def _tm_parts(stack: StackConfig, u, v, length_unit, want_force: bool):
    kin = make_kinematics(stack, u, v, length_unit)
    kind = classify(stack)
    gap = kin.scales.gap
    if kind is LimitKind.GENERAL and kin.m_bar == 0.0:
        R, q = _massless_parts(kin)
        return _terms_log_and_force(1.0, [(-R, 2 * q)], gap)
    cs = coefficients(kin)
    if kind is LimitKind.GENERAL:
        qm = build_q(stack, kin, cs)
        energy = log_det_ratio(qm)
        force = minors_force_integrand(qm, kin) if want_force else None
        return energy, force
    if kind is LimitKind.CONDUCTOR_CONDUCTOR:
        w_inf, terms = _conductor_terms(kin, cs)
    elif kind is LimitKind.CONDUCTOR_PERMEABLE:
        w_inf, terms = _boyer_terms(kin, cs, conductor_on_left(stack))
    else:
        R, q = _second_polarization_reflectance(kin, cs, kind)
        e1, f1 = _terms_log_and_force(1.0, [(-1.0, 2 * kin.q_T["b"])], gap)
        e2, f2 = _terms_log_and_force(1.0, [(-R, 2 * q)], gap)
        return e1 + e2, f1 + f2
    return _terms_log_and_force(w_inf, terms, gap)


def tm_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None):
    """Bare TM energy integrand (``ln`` of the determinant ratio or its closed form)."""
    return _tm_parts(stack, u, v, length_unit, want_force=False)[0]


def tm_force_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None):
    """Bare TM force integrand ``-d/da`` of :func:`tm_integrand`."""
    return _tm_parts(stack, u, v, length_unit, want_force=True)[1]


def general_tm_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None,
                         conditioned: bool = True):
    """Determinant-route TM integrand for real plates at any mass, including zero."""
    kin = make_kinematics(stack, u, v, length_unit)
    return log_det_ratio(build_q(stack, kin, coefficients(kin), conditioned=conditioned))


def _split_parts(stack: StackConfig, u, v, length_unit, polarization: int):
    kin = make_kinematics(stack, u, v, length_unit)
    kind = classify(stack)
    if kind is LimitKind.CONDUCTOR_CONDUCTOR:
        if not _unit_background(kin):
            raise SplitUnavailableError(
                "the TM polarizations do not separate for conductors in a background with n_b != 1"
            )
    elif kind is not LimitKind.PERMEABLE_PERMEABLE:
        raise SplitUnavailableError(f"no TM polarization split for {kind.value} plates")
    gap = kin.scales.gap
    if polarization == 1:
        return _terms_log_and_force(1.0, [(-1.0, 2 * kin.q_T["b"])], gap)
    R, q = _second_polarization_reflectance(kin, coefficients(kin), kind)
    return _terms_log_and_force(1.0, [(-R, 2 * q)], gap)


def tm_second_polarization_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None):
    """Energy integrand of the second TM polarization (ideal symmetric plates only)."""
    return _split_parts(stack, u, v, length_unit, 2)[0]


# ---------------------------------------------------------------------------
# integrated quantities


def _integrate(stack, quad, length_unit, channel, quantity, fn):
    index = 0 if quantity == "energy" else 1
    return integrate_channel(
        lambda u, v: fn(u, v)[index], stack, quad, channel, quantity, length_unit
    )


def tm_energy(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
              length_unit: Optional[float] = None) -> EnergyResult:
    """TM energy per unit area in J/m^2.

    For real plates a positive ``ln det(Q)/det(Q_inf)`` is not excluded by
    any general argument; it is reported once per call as a warning.
    """
    positive = [0]

    def parts(u, v):
        out = _tm_parts(stack, u, v, length_unit, want_force=False)
        positive[0] += int(np.count_nonzero(out[0] > 0.0))
        return out

    result = _integrate(stack, quad, length_unit, "TM", "energy", parts)
    if positive[0] and classify(stack) is LimitKind.GENERAL:
        logger.warning("TM log-determinant ratio was positive at %d quadrature points", positive[0])
    return result


def tm_force(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
             length_unit: Optional[float] = None) -> EnergyResult:
    """TM force per unit area in Pa (minors formula for real plates)."""
    return _integrate(stack, quad, length_unit, "TM", "force",
                      lambda u, v: _tm_parts(stack, u, v, length_unit, want_force=True))


def tm_force_minors(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                    length_unit: Optional[float] = None) -> EnergyResult:
    """TM force from the cofactor expansion of ``Q``; real plates only, any mass."""
    if classify(stack) is not LimitKind.GENERAL:
        raise DegenerateInputError("the minors force needs real plates")

    def integrand(u, v):
        kin = make_kinematics(stack, u, v, length_unit)
        return minors_force_integrand(build_q(stack, kin, coefficients(kin)), kin)

    return integrate_channel(integrand, stack, quad, "TM", "force", length_unit)


def tm_first_polarization_energy(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                                 length_unit: Optional[float] = None) -> EnergyResult:
    """First TM polarization energy; equal in form to the TE energy of ideal plates."""
    return _integrate(stack, quad, length_unit, "TM_I", "energy",
                      lambda u, v: _split_parts(stack, u, v, length_unit, 1))


def tm_first_polarization_force(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                                length_unit: Optional[float] = None) -> EnergyResult:
    return _integrate(stack, quad, length_unit, "TM_I", "force",
                      lambda u, v: _split_parts(stack, u, v, length_unit, 1))


def tm_second_polarization_energy(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                                  length_unit: Optional[float] = None) -> EnergyResult:
    """Second TM polarization energy (conductors in unit-index background, or permeable plates).

    Raises
    ------
    SplitUnavailableError
        For real plates, the mixed conductor/permeable pair, or conductors in
        a background with refractive index other than 1.
    """
    return _integrate(stack, quad, length_unit, "TM_II", "energy",
                      lambda u, v: _split_parts(stack, u, v, length_unit, 2))


def tm_second_polarization_force(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                                 length_unit: Optional[float] = None) -> EnergyResult:
    return _integrate(stack, quad, length_unit, "TM_II", "force",
                      lambda u, v: _split_parts(stack, u, v, length_unit, 2))


def total_energy(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                 length_unit: Optional[float] = None) -> EnergyResult:
    """TE + TM energy per unit area in J/m^2."""
    return combine([te_energy(stack, quad, length_unit=length_unit),
                    tm_energy(stack, quad, length_unit=length_unit)], "total")


def total_force(stack: StackConfig, quad: Optional[QuadratureSpec] = None, *,
                length_unit: Optional[float] = None) -> EnergyResult:
    """TE + TM force per unit area in Pa."""
    return combine([te_force(stack, quad, length_unit=length_unit),
                    tm_force(stack, quad, length_unit=length_unit)], "total")


# ---------------------------------------------------------------------------
# structural self-test

_SPARSE_AT_ZERO_MASS = ((0, 1), (1, 1), (0, 3), (1, 3))


def self_test() -> list[tuple[str, bool, str]]:
    """Check the structure of ``Q`` and its ideal-plate limits.

    Returns ``(name, passed, detail)`` triples for: the entries that must
    vanish at zero field mass, agreement with the massless scalar formula,
    the disappearance of the gap entries at large separation, and the three
    convergence ladders toward the ideal-plate forms.
    """
    from .materials import ConstantEpsMu, InfinitelyPermeable, PerfectConductor
    from .oracle import PROBE_POINTS, ladder_report, massless_tm_reference_integrand
    from .stack import Plate, mass_from_bar

    out = []
    a = 1e-6
    u = np.array([p[0] for p in PROBE_POINTS])
    v = np.array([p[1] for p in PROBE_POINTS])

    massless = StackConfig(ConstantEpsMu(1.5), Plate(ConstantEpsMu(4.0, 1.3), 0.7 * a),
                           Plate(ConstantEpsMu(9.0), 1.6 * a), a)
    kin = make_kinematics(massless, u, v)
    Q = build_q(massless, kin, coefficients(kin), conditioned=False).Q
    size = np.max(np.abs(Q))
    worst = max(float(np.max(np.abs(Q[..., i, j]))) for i, j in _SPARSE_AT_ZERO_MASS)
    out.append(("zero-mass sparsity", bool(worst <= 1e-14 * size), f"largest entry {worst:.2e}"))
    diff = float(np.max(np.abs(general_tm_integrand(massless, u, v)
                               - massless_tm_reference_integrand(massless, u, v))))
    out.append(("zero-mass scalar formula", diff <= 1e-12, f"max deviation {diff:.2e}"))

    far = StackConfig(ConstantEpsMu(1.5), Plate(ConstantEpsMu(4.0, 1.3), a),
                      Plate(ConstantEpsMu(9.0), a), a, mass_from_bar(1.0, a))
    kin = make_kinematics(far, u, v, length_unit=a / 2000.0)
    qm = build_q(far, kin, coefficients(kin))
    gap_max = max(float(np.max(np.abs(qm.Q[..., i, j]))) for i, j in GAP_ENTRIES)
    ratio = float(np.max(np.abs(log_det_ratio(qm))))
    out.append(("large-separation sparsity", gap_max == 0.0 and ratio == 0.0,
                f"gap entries {gap_max:.2e}, log ratio {ratio:.2e}"))

    for left, right in ((PerfectConductor(), PerfectConductor()),
                        (InfinitelyPermeable(), InfinitelyPermeable()),
                        (PerfectConductor(), InfinitelyPermeable())):
        tpl = StackConfig(far.background, Plate(left, 0.5 * a), Plate(right, 2.0 * a), a,
                          mass_from_bar(1.0, a))
        rep = ladder_report(tpl)
        out.append((f"ladder {rep.kind}", rep.passed(),
                    f"final {rep.final:.2e}, monotone={rep.monotone}"))
    return out
