"""Interface coefficients between the background and each plate.

All functions take a :class:`~proca_casimir.kinematics.Kinematics` and layer
labels ``"b"``, ``"l"``, ``"r"``. Differences of nearly equal wavenumbers are
formed from the mass term directly so that no coefficient loses precision at
small contrast or small mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .kinematics import Kinematics
from .stack import C_LIGHT, HBAR


def _ratio(num, den, what: str):
    if np.any(den == 0.0):
        raise DegenerateInputError(f"vanishing denominator in {what}")
    return num / den


def _check_real(kin: Kinematics, *layers: str) -> None:
    for j in layers:
        if np.any(np.isinf(kin.q_T[j])):
            raise DegenerateInputError(f"layer {j!r} is a limit model; use the closed-form limits")


def delta_I(kin: Kinematics, j: str, ref: str = "b"):
    """Transverse type-I (TE-like) coefficient of layer ``j`` seen from ``ref``.

    ``(q_T,j mu_ref - q_T,ref mu_j) / (q_T,j mu_ref + q_T,ref mu_j)``
    """
    _check_real(kin, j, ref)
    a = kin.q_T[j] * kin.mu[ref]
    b = kin.q_T[ref] * kin.mu[j]
    return _ratio(a - b, a + b, "delta_I")


def _delta_II_parts(kin: Kinematics, j: str, ref: str):
    num = kin.mu[ref] * kin.q_T[ref] * kin.s_T[j]
    den = kin.mu[j] * kin.q_T[j] * kin.s_T[ref]
    return num, den


def delta_II(kin: Kinematics, j: str, ref: str = "b"):
    """Transverse type-II (TM-like) coefficient of layer ``j`` seen from ``ref``.

    At zero mass this is ``(q_T,ref eps_j - q_T,j eps_ref) / (q_T,ref eps_j + q_T,j eps_ref)``.
    """
    _check_real(kin, j, ref)
    num, den = _delta_II_parts(kin, j, ref)
    return _ratio(num - den, num + den, "delta_II")


def one_minus_delta_II(kin: Kinematics, j: str, ref: str = "b"):
    """``1 - delta_II`` without cancellation when the coefficient is close to 1."""
    _check_real(kin, j, ref)
    num, den = _delta_II_parts(kin, j, ref)
    return _ratio(2.0 * den, num + den, "delta_II")


def delta_III(kin: Kinematics, j: str, ref: str = "b"):
    """Longitudinal coefficient ``(q_L,j s_L,ref - q_L,ref s_L,j) / (q_L,j s_L,ref + q_L,ref s_L,j)``."""
    _check_real(kin, j, ref)
    a = kin.q_L[j] * kin.s_L[ref]
    b = kin.q_L[ref] * kin.s_L[j]
    return _ratio(a - b, a + b, "delta_III")


def _index2(kin: Kinematics, j: str):
    return kin.eps[j] * kin.mu[j]


def alpha(kin: Kinematics, j1: str, j2: str):
    """``(q_L,j1**2 - q_L,j2**2) / (q_L,j2**2 - k**2)``."""
    _check_real(kin, j1, j2)
    m2 = kin.m_bar**2
    diff = m2 / _index2(kin, j1) - m2 / _index2(kin, j2)
    return _ratio(diff, kin.s_L[j2], "alpha (singular point q_L = k_perp)")


def beta(kin: Kinematics, j1: str, j2: str):
    """``-k**2 / (q_T,j1 q_L,j2) * (1 - mu_j2 s_T,j1 / (mu_j1 s_T,j2))``."""
    _check_real(kin, j1, j2)
    mixed = kin.mu[j1] * kin.s_T[j2] - kin.mu[j2] * kin.s_T[j1]
    den = kin.q_T[j1] * kin.q_L[j2] * kin.mu[j1] * kin.s_T[j2]
    return -kin.k2 * _ratio(mixed, den, "beta")


def r_plus(kin: Kinematics, j1: str, j2: str):
    """``1 + (q_T,j2 mu_j2 s_T,j1) / (q_T,j1 mu_j1 s_T,j2)``."""
    _check_real(kin, j1, j2)
    num = kin.q_T[j2] * kin.mu[j2] * kin.s_T[j1]
    den = kin.q_T[j1] * kin.mu[j1] * kin.s_T[j2]
    return 1.0 + _ratio(num, den, "r_plus")


def kappa_plus(kin: Kinematics, j1: str, j2: str):
    """``s_L,j1 / s_L,j2 + q_L,j1 / q_L,j2``."""
    _check_real(kin, j1, j2)
    return _ratio(kin.s_L[j1], kin.s_L[j2], "kappa_plus") + kin.q_L[j1] / kin.q_L[j2]


def d_coefficient(kin: Kinematics):
    """``(q_m - q_0) / (q_m + q_0)``, formed as ``m**2 / (q_m + q_0)**2``."""
    s = kin.qm + kin.q0
    return _ratio(kin.m_bar**2, s * s, "d_coefficient")


def _limit_denominator(kin: Kinematics):
    # q0 (q_L,b^2 - k^2) + q_L,b (q0^2 - k^2): a sum of non-negative terms
    return kin.q0 * kin.s_L["b"] + kin.q_L["b"] * kin.u**2


def limit_delta(kin: Kinematics):
    """Longitudinal reflection of an ideal plate (conductor or permeable).

    ``[q0 (q_L,b^2 - k^2) - q_L,b (q0^2 - k^2)] / [q0 (q_L,b^2 - k^2) + q_L,b (q0^2 - k^2)]``
    """
    _check_real(kin, "b")
    qL = kin.q_L["b"]
    gap = (kin.m_bar**2 / _index2(kin, "b")) / (qL + kin.q0)  # q_L,b - q0
    return _ratio(gap * (kin.q0 * qL + kin.k2), _limit_denominator(kin), "limit_delta")


def limit_lambda(kin: Kinematics):
    """Transverse/longitudinal mixing of an ideal plate.

    ``(k**2 / q_T,b) (q0**2 - q_L,b**2) / [q_L,b (q0**2 - k**2) + q0 (q_L,b**2 - k**2)]``
    """
    _check_real(kin, "b")
    diff = -kin.m_bar**2 / _index2(kin, "b")  # q0^2 - q_L,b^2
    return _ratio(kin.k2 / kin.q_T["b"] * diff, _limit_denominator(kin), "limit_lambda")


def effective_permittivity(xi, mass: float, eps_mu_b: float = 1.0):
    """Plasma-like permittivity ``1 + (m c**2 / hbar)**2 / (eps_mu_b xi**2)``.

    Parameters
    ----------
    xi : float or ndarray
        Imaginary frequency in rad/s.
    mass : float
        Field mass in kg.
    eps_mu_b : float
        Relative ``eps mu`` product of the background.
    """
    omega_m = mass * C_LIGHT**2 / HBAR
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore"):
        out = 1.0 + omega_m**2 / (eps_mu_b * xi**2) if mass > 0 else np.ones_like(xi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PlateCoefficients:
    """Coefficients of one plate ``j`` against the background ``b``."""

    d_I: np.ndarray
    d_II: np.ndarray
    one_minus_d_II: np.ndarray
    d_III: np.ndarray
    alpha_jb: np.ndarray
    alpha_bj: np.ndarray
    beta_jb: np.ndarray
    beta_bj: np.ndarray
    r_jb: np.ndarray
    r_bj: np.ndarray
    kappa_jb: np.ndarray
    kappa_bj: np.ndarray


@dataclass(frozen=True)
class CoefficientSet:
    """All coefficients at a set of points; ``plates`` holds real plates only."""

    plates: dict[str, PlateCoefficients]
    D: np.ndarray
    Delta: np.ndarray
    Lambda: np.ndarray


def plate_coefficients(kin: Kinematics, j: str) -> PlateCoefficients:
    return PlateCoefficients(
        d_I=delta_I(kin, j),
        d_II=delta_II(kin, j),
        one_minus_d_II=one_minus_delta_II(kin, j),
        d_III=delta_III(kin, j),
        alpha_jb=alpha(kin, j, "b"),
        alpha_bj=alpha(kin, "b", j),
        beta_jb=beta(kin, j, "b"),
        beta_bj=beta(kin, "b", j),
        r_jb=r_plus(kin, j, "b"),
        r_bj=r_plus(kin, "b", j),
        kappa_jb=kappa_plus(kin, j, "b"),
        kappa_bj=kappa_plus(kin, "b", j),
    )


def coefficients(kin: Kinematics) -> CoefficientSet:
    """Compute every coefficient in one pass."""
    plates = {j: plate_coefficients(kin, j) for j in ("l", "r") if not np.any(np.isinf(kin.q_T[j]))}
    return CoefficientSet(plates=plates, D=d_coefficient(kin), Delta=limit_delta(kin), Lambda=limit_lambda(kin))
