"""Imaginary-axis wavenumbers of every layer in dimensionless units.

With ``u = xi L / c`` and ``v = k_perp L`` the decay constants of layer ``j`` are

    q_T,j = sqrt(eps_j mu_j u**2 + v**2 + m**2)
    q_L,j = sqrt(u**2 + v**2 + m**2 / (eps_j mu_j))

together with ``q_0 = sqrt(u**2 + v**2)`` and ``q_m = sqrt(u**2 + v**2 + m**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .materials import InfinitelyPermeable, PerfectConductor
from .stack import Scales, StackConfig

LAYERS = ("b", "l", "r")


@dataclass(frozen=True)
class Kinematics:
    """Wavenumbers at a set of quadrature points (arrays broadcast together).

    ``s_T[j] = q_T[j]**2 - v**2`` and ``s_L[j] = q_L[j]**2 - v**2`` are kept
    separately because they are needed without cancellation.
    For a limit-marker plate ``q_T`` is ``+inf`` and ``q_L`` equals ``q_0``;
    those entries are sentinels and must not enter arithmetic.
    """

    u: np.ndarray
    v: np.ndarray
    scales: Scales
    eps: dict[str, np.ndarray]
    mu: dict[str, np.ndarray]
    q_T: dict[str, np.ndarray]
    q_L: dict[str, np.ndarray]
    s_T: dict[str, np.ndarray]
    s_L: dict[str, np.ndarray]
    q0: np.ndarray
    qm: np.ndarray

    @property
    def m_bar(self) -> float:
        return self.scales.m_bar

    @property
    def k2(self) -> np.ndarray:
        return self.v * self.v


def make_kinematics(
    stack: StackConfig, u, v, length_unit: Optional[float] = None
) -> Kinematics:
    """Evaluate materials and wavenumbers at dimensionless points ``(u, v)``.

    Parameters
    ----------
    stack : StackConfig
        Geometry, materials and mass.
    u, v : float or ndarray
        Dimensionless frequency and transverse wavenumber, both ``>= 0``.
    length_unit : float, optional
        Reference length in m; defaults to the separation.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if np.any(u < 0.0) or np.any(v < 0.0) or np.any(np.isnan(u)) or np.any(np.isnan(v)):
        raise DomainError("u and v must be >= 0")
    scales = stack.scales(length_unit)
    m2 = scales.m_bar**2
    xi = u * scales.frequency_scale
    u2, k2 = u * u, v * v
    q0 = np.sqrt(u2 + k2)
    qm = np.sqrt(u2 + k2 + m2)

    materials = {"b": stack.background, "l": stack.plate_l.material, "r": stack.plate_r.material}
    eps, mu, q_T, q_L, s_T, s_L = {}, {}, {}, {}, {}, {}
    for j, mat in materials.items():
        if isinstance(mat, (PerfectConductor, InfinitelyPermeable)):
            conductor = isinstance(mat, PerfectConductor)
            eps[j] = np.full(u.shape, np.inf if conductor else 1.0)
            mu[j] = np.full(u.shape, 1.0 if conductor else np.inf)
            q_T[j] = np.full(u.shape, np.inf)
            s_T[j] = np.full(u.shape, np.inf)
            q_L[j] = q0
            s_L[j] = u2
            continue
        e = np.broadcast_to(np.asarray(mat.eps(xi), dtype=float), u.shape)
        m = np.broadcast_to(np.asarray(mat.mu(xi), dtype=float), u.shape)
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(m))):
            raise DomainError("material response diverges at u = 0; use u > 0")
        n2 = e * m
        eps[j], mu[j] = e, m
        s_T[j] = n2 * u2 + m2
        s_L[j] = u2 + m2 / n2
        q_T[j] = np.sqrt(s_T[j] + k2)
        q_L[j] = np.sqrt(s_L[j] + k2)
    return Kinematics(u=u, v=v, scales=scales, eps=eps, mu=mu, q_T=q_T, q_L=q_L,
                      s_T=s_T, s_L=s_L, q0=q0, qm=qm)
