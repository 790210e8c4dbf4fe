"""Material response on the imaginary frequency axis.

Every model returns relative permittivity and permeability at ``omega = i xi``.
On that axis the response of a causal passive medium is real and at least 1.
Two additional models, :class:`PerfectConductor` and :class:`InfinitelyPermeable`,
are limit markers. They carry no pointwise response and only select closed-form
limit formulas in the energy channels.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import DomainError, LimitModelError, TabulatedDataError

ArrayLike = Union[float, np.ndarray]

TABULATED_HEADER = ("xi_rad_per_s", "eps_rel")


class MaterialModel:
    """Common interface of all material variants."""

    is_limit: bool = False

    def eps(self, xi: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def mu(self, xi: ArrayLike) -> ArrayLike:
        return _like(xi, 1.0)

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


def _like(xi: ArrayLike, value: float) -> ArrayLike:
    if np.ndim(xi) == 0:
        return float(value)
    return np.full(np.shape(xi), float(value))


@dataclass(frozen=True)
class Vacuum(MaterialModel):
    """Empty space, ``eps = mu = 1``."""

    def eps(self, xi: ArrayLike) -> ArrayLike:
        return _like(xi, 1.0)

    def to_dict(self) -> dict[str, Any]:
        return {"model": "vacuum"}


@dataclass(frozen=True)
class ConstantIndex(MaterialModel):
    """Non-magnetic medium of constant refractive index ``n``."""

    n: float

    def __post_init__(self):
        if not math.isfinite(self.n) or self.n < 1.0:
            raise DomainError(f"refractive index must be finite and >= 1, got {self.n}")

    def eps(self, xi: ArrayLike) -> ArrayLike:
        return _like(xi, self.n * self.n)

    def to_dict(self) -> dict[str, Any]:
        return {"model": "constant_index", "n": self.n}


@dataclass(frozen=True)
class ConstantEpsMu(MaterialModel):
    """Frequency-independent relative permittivity and permeability."""

    eps_r: float
    mu_r: float = 1.0

    def __post_init__(self):
        for name, value in (("eps_r", self.eps_r), ("mu_r", self.mu_r)):
            if not math.isfinite(value) or value < 1.0:
                raise DomainError(f"{name} must be finite and >= 1, got {value}")

    def eps(self, xi: ArrayLike) -> ArrayLike:
        return _like(xi, self.eps_r)

    def mu(self, xi: ArrayLike) -> ArrayLike:
        return _like(xi, self.mu_r)

    def to_dict(self) -> dict[str, Any]:
        return {"model": "constant_eps_mu", "eps_r": self.eps_r, "mu_r": self.mu_r}


@dataclass(frozen=True)
class Plasma(MaterialModel):
    """Lossless plasma, ``eps(i xi) = 1 + omega_p**2 / xi**2``.

    Parameters
    ----------
    omega_p : float
        Plasma frequency in rad/s.
    """

    omega_p: float

    def __post_init__(self):
        if not math.isfinite(self.omega_p) or self.omega_p < 0.0:
            raise DomainError(f"plasma frequency must be finite and >= 0, got {self.omega_p}")

    def eps(self, xi: ArrayLike) -> ArrayLike:
        xi = np.asarray(xi, dtype=float)
        with np.errstate(divide="ignore"):
            out = 1.0 + (self.omega_p / xi) ** 2 if self.omega_p > 0 else np.ones_like(xi)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict[str, Any]:
        return {"model": "plasma", "omega_p_rad_per_s": self.omega_p}


@dataclass(frozen=True)
class Tabulated(MaterialModel):
    """Sampled permittivity interpolated linearly in ``log(xi)``.

    Below the first sample the first value is held. Beyond the last sample the
    tail ``1 + (eps_last - 1) * (xi_last / xi)**2`` is used. The medium is
    non-magnetic.

    Parameters
    ----------
    xi : tuple of float
        Strictly increasing positive sample frequencies in rad/s.
    eps_rel : tuple of float
        Relative permittivity at each sample, each at least 1.
    """

    xi: tuple[float, ...]
    eps_rel: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.xi, dtype=float)
        es = np.asarray(self.eps_rel, dtype=float)
        if xs.ndim != 1 or xs.shape != es.shape or xs.size < 2:
            raise TabulatedDataError("tabulated model needs at least 2 (xi, eps) samples")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(es))):
            raise TabulatedDataError("tabulated samples must be finite")
        if xs[0] <= 0.0 or np.any(np.diff(xs) <= 0.0):
            raise TabulatedDataError("tabulated xi must be positive and strictly increasing")
        if np.any(es < 1.0):
            raise TabulatedDataError("tabulated eps_rel must be >= 1")

    def eps(self, xi: ArrayLike) -> ArrayLike:
        xs = np.asarray(self.xi, dtype=float)
        es = np.asarray(self.eps_rel, dtype=float)
        x = np.asarray(xi, dtype=float)
        inside = np.interp(np.log(np.maximum(x, xs[0])), np.log(xs), es)
        # tail only matters above the last sample, where the ratio is < 1
        tail = 1.0 + (es[-1] - 1.0) * (xs[-1] / np.maximum(x, xs[-1])) ** 2
        out = np.where(x > xs[-1], tail, inside)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict[str, Any]:
        return {"model": "tabulated", "xi_rad_per_s": list(self.xi), "eps_rel": list(self.eps_rel)}


@dataclass(frozen=True)
class PerfectConductor(MaterialModel):
    """Limit marker for ``eps -> infinity``."""

    is_limit = True

    def eps(self, xi: ArrayLike) -> ArrayLike:
        raise LimitModelError("limit model has no pointwise response")

    def mu(self, xi: ArrayLike) -> ArrayLike:
        raise LimitModelError("limit model has no pointwise response")

    def to_dict(self) -> dict[str, Any]:
        return {"model": "perfect_conductor"}


@dataclass(frozen=True)
class InfinitelyPermeable(MaterialModel):
    """Limit marker for ``mu -> infinity``."""

    is_limit = True

    def eps(self, xi: ArrayLike) -> ArrayLike:
        raise LimitModelError("limit model has no pointwise response")

    def mu(self, xi: ArrayLike) -> ArrayLike:
        raise LimitModelError("limit model has no pointwise response")

    def to_dict(self) -> dict[str, Any]:
        return {"model": "infinitely_permeable"}


def _check_xi(xi: ArrayLike) -> None:
    if np.any(np.asarray(xi) < 0.0) or np.any(np.isnan(xi)):
        raise DomainError("imaginary frequency xi must be >= 0")


def eps_imag(model: MaterialModel, xi: ArrayLike) -> ArrayLike:
    """Relative permittivity ``eps(i xi)``.

    Parameters
    ----------
    model : MaterialModel
        Any non-marker material.
    xi : float or ndarray
        Imaginary frequency in rad/s, ``xi >= 0``.

    Returns
    -------
    float or ndarray
        Relative permittivity, at least 1.
    """
    if model.is_limit:
        raise LimitModelError("limit model has no pointwise response")
    _check_xi(xi)
    return model.eps(xi)


def mu_imag(model: MaterialModel, xi: ArrayLike) -> ArrayLike:
    """Relative permeability ``mu(i xi)``; see :func:`eps_imag`."""
    if model.is_limit:
        raise LimitModelError("limit model has no pointwise response")
    _check_xi(xi)
    return model.mu(xi)


def load_tabulated(path: str | Path) -> Tabulated:
    """Read a ``xi_rad_per_s,eps_rel`` CSV file into a :class:`Tabulated` model.

    Raises
    ------
    TabulatedDataError
        On a bad header, malformed row, non-increasing ``xi`` or ``eps < 1``.
        The message starts with the offending line number.
    """
    xs: list[float] = []
    es: list[float] = []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TABULATED_HEADER:
            raise TabulatedDataError(f"line 1: expected header {','.join(TABULATED_HEADER)!r}")
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise TabulatedDataError(f"line {line}: expected 2 columns, got {len(row)}")
            try:
                xi, eps = float(row[0]), float(row[1])
            except ValueError:
                raise TabulatedDataError(f"line {line}: malformed number in {row!r}") from None
            if not (math.isfinite(xi) and math.isfinite(eps)) or xi <= 0.0:
                raise TabulatedDataError(f"line {line}: xi must be positive and finite")
            if xs and xi <= xs[-1]:
                raise TabulatedDataError(f"line {line}: xi must be strictly increasing")
            if eps < 1.0:
                raise TabulatedDataError(f"line {line}: eps_rel must be >= 1, got {eps}")
            xs.append(xi)
            es.append(eps)
    if len(xs) < 2:
        raise TabulatedDataError(f"line {max(len(xs) + 1, 1)}: need at least 2 samples")
    return Tabulated(tuple(xs), tuple(es))


def material_from_dict(data: dict[str, Any]) -> MaterialModel:
    """Build a material from its JSON form (the inverse of ``to_dict``)."""
    if not isinstance(data, dict) or "model" not in data:
        raise KeyError("model")
    kind = data["model"]
    if kind == "vacuum":
        return Vacuum()
    if kind == "constant_index":
        return ConstantIndex(float(data["n"]))
    if kind == "constant_eps_mu":
        return ConstantEpsMu(float(data["eps_r"]), float(data.get("mu_r", 1.0)))
    if kind == "plasma":
        return Plasma(float(data["omega_p_rad_per_s"]))
    if kind == "tabulated":
        if "path" in data:
            return load_tabulated(data["path"])
        return Tabulated(tuple(map(float, data["xi_rad_per_s"])), tuple(map(float, data["eps_rel"])))
    if kind == "perfect_conductor":
        return PerfectConductor()
    if kind == "infinitely_permeable":
        return InfinitelyPermeable()
    raise ValueError(f"unknown material model {kind!r}")
