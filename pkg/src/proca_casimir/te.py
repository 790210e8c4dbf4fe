"""Transverse-electric (type-I transverse) channel.

The energy per area is ``hbar c / L**3`` times

    1/(4 pi^2) * int int ln(1 - R exp(-2 q_T,b a)) v dv du

where ``R`` is the product of the two plate reflectances. A finite slab of
thickness ``t`` reflects with ``Delta (1 - e) / (1 - Delta**2 e)``,
``e = exp(-2 q_T,j t)``. Ideal plates give ``R = 1`` (both conductors or both
permeable) or ``R = -1`` (one of each).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import PassivityError
from .kinematics import Kinematics, make_kinematics
from .quadrature import QuadratureSpec
from .reflection import delta_I
from .results import EnergyResult, integrate_channel
from .stack import LimitKind, StackConfig, classify

EXPONENT_CUTOFF = 700.0
_PASSIVITY_SLACK = 1e-12


def log1m(x):
    """``ln(1 - x)``, accurate for small ``x``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x < 0.5, np.log1p(-x), np.log(1.0 - x))


def gap_factor(q, gap: float):
    """``exp(-2 q a)``, set to exactly 0 beyond the representable range."""
    arg = 2.0 * q * gap
    return np.where(arg > EXPONENT_CUTOFF, 0.0, np.exp(-np.minimum(arg, EXPONENT_CUTOFF)))


def slab_reflectance(delta, q, tau):
    """Reflectance of a slab: ``delta (1 - e) / (1 - delta**2 e)`` with ``e = exp(-2 q tau)``."""
    e = np.exp(-2.0 * q * tau)
    return delta * -np.expm1(-2.0 * q * tau) / (1.0 - delta * delta * e)


def te_round_trip(kin: Kinematics, kind: LimitKind):
    """Product ``R`` of the two TE plate reflectances."""
    if kind is LimitKind.CONDUCTOR_PERMEABLE:
        return np.full(kin.u.shape, -1.0)
    if kind is not LimitKind.GENERAL:
        return np.ones(kin.u.shape)
    sc = kin.scales
    r_l = slab_reflectance(delta_I(kin, "l"), kin.q_T["l"], sc.tau_l)
    r_r = slab_reflectance(delta_I(kin, "r"), kin.q_T["r"], sc.tau_r)
    product = r_l * r_r
    if np.any(product > 1.0 + _PASSIVITY_SLACK):
        raise PassivityError("TE round-trip reflectance exceeds 1; check the material input")
    return product


def _te_parts(stack: StackConfig, u, v, length_unit: Optional[float]):
    kin = make_kinematics(stack, u, v, length_unit)
    R = te_round_trip(kin, classify(stack))
    q = kin.q_T["b"]
    return R, q, gap_factor(q, kin.scales.gap)


def te_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None):
    """Bare TE energy integrand ``ln(1 - R exp(-2 q_T,b a))``."""
    R, _, x = _te_parts(stack, u, v, length_unit)
    return log1m(R * x)


def te_force_integrand(stack: StackConfig, u, v, *, length_unit: Optional[float] = None):
    """Bare TE force integrand ``-2 q_T,b R x / (1 - R x)`` with ``x = exp(-2 q_T,b a)``."""
    R, q, x = _te_parts(stack, u, v, length_unit)
    rx = R * x
    return -2.0 * q * rx / (1.0 - rx)


def te_energy(
    stack: StackConfig,
    quad: Optional[QuadratureSpec] = None,
    *,
    length_unit: Optional[float] = None,
    channel: str = "TE",
) -> EnergyResult:
    """TE energy per unit area in J/m^2.

    Parameters
    ----------
    stack : StackConfig
    quad : QuadratureSpec, optional
    length_unit : float, optional
        Internal length unit in m (defaults to the separation). Finite
        differences in the separation should keep this fixed.
    """
    return integrate_channel(
        lambda u, v: te_integrand(stack, u, v, length_unit=length_unit),
        stack, quad, channel, "energy", length_unit,
    )


def te_force(
    stack: StackConfig,
    quad: Optional[QuadratureSpec] = None,
    *,
    length_unit: Optional[float] = None,
    channel: str = "TE",
) -> EnergyResult:
    """TE force per unit area in Pa; negative values attract."""
    return integrate_channel(
        lambda u, v: te_force_integrand(stack, u, v, length_unit=length_unit),
        stack, quad, channel, "force", length_unit,
    )
