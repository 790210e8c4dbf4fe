"""Channel result record and the glue from dimensionless integrals to SI values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import ConvergenceError
from .quadrature import QuadratureSpec, integrate2d
from .stack import StackConfig

ENERGY_PREFACTOR = 1.0 / (4.0 * math.pi**2)


@dataclass(frozen=True)
class EnergyResult:
    """Energy (J/m^2) or force (Pa) per unit area of one channel.

    Attributes
    ----------
    value : float
        SI value.
    error_estimate : float
        Absolute quadrature error estimate in the same unit.
    evaluations : int
        Integrand evaluations spent.
    channel : str
        ``"TE"``, ``"TM"``, ``"TM_I"``, ``"TM_II"`` or ``"total"``.
    quantity : str
        ``"energy"`` or ``"force"``.
    dimensionless : float
        Value in units of ``hbar c / L**3`` (energy) or ``hbar c / L**4`` (force).
    """

    value: float
    error_estimate: float
    evaluations: int
    channel: str
    quantity: str
    dimensionless: float


def integrate_channel(
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    stack: StackConfig,
    quad: Optional[QuadratureSpec],
    channel: str,
    quantity: str,
    length_unit: Optional[float] = None,
) -> EnergyResult:
    """Integrate a bare integrand and attach the ``1/(4 pi^2)`` prefactor and SI scale.

    A :class:`ConvergenceError` is re-raised with an extra ``partial``
    attribute holding the unconverged result in SI units.
    """
    scales = stack.scales(length_unit)
    scale = scales.energy_scale if quantity == "energy" else scales.force_scale

    def convert(value, error, evaluations):
        dimless = ENERGY_PREFACTOR * value
        return EnergyResult(dimless * scale, ENERGY_PREFACTOR * error * scale, evaluations,
                            channel, quantity, dimless)

    try:
        res = integrate2d(integrand, quad)
    except ConvergenceError as exc:
        # partial SI result for callers that report unconverged values
        exc.partial = convert(exc.value, exc.error_estimate, exc.evaluations)
        raise
    return convert(*res)


def combine(results: Iterable[EnergyResult], channel: str) -> EnergyResult:
    """Sum results; errors add in quadrature."""
    results = list(results)
    quantities = {r.quantity for r in results}
    if len(quantities) != 1:
        raise ValueError("cannot combine energies with forces")
    return EnergyResult(
        value=math.fsum(r.value for r in results),
        error_estimate=math.sqrt(math.fsum(r.error_estimate**2 for r in results)),
        evaluations=sum(r.evaluations for r in results),
        channel=channel,
        quantity=quantities.pop(),
        dimensionless=math.fsum(r.dimensionless for r in results),
    )
