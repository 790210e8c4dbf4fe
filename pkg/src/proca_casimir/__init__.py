"""Casimir energy and force of a massive vector field between two finite plates."""

from .errors import (
    CasimirError,
    ConditioningError,
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    LimitModelError,
    MisuseError,
    PassivityError,
    SplitUnavailableError,
    TabulatedDataError,
    UnsupportedConfigurationError,
)
from .materials import (
    ConstantEpsMu,
    ConstantIndex,
    InfinitelyPermeable,
    PerfectConductor,
    Plasma,
    Tabulated,
    Vacuum,
    eps_imag,
    load_tabulated,
    mu_imag,
)
from .quadrature import GaussLegendre, QuadratureSpec, TanhSinh, Transform, integrate2d
from .results import EnergyResult
from .stack import LimitKind, Plate, StackConfig, bar_from_mass, classify, mass_from_bar
from .te import te_energy, te_force
from .tm import (
    tm_energy,
    tm_first_polarization_energy,
    tm_first_polarization_force,
    tm_force,
    tm_force_minors,
    tm_second_polarization_energy,
    tm_second_polarization_force,
    total_energy,
    total_force,
)

__version__ = "0.1.0"
