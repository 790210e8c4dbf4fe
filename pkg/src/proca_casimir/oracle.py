"""Independent reference values used by the test-suite and ``casimir verify``.

Nothing here reuses the channel integrands. The massless formulas are typed
again from scratch, the ideal-conductor TE energy uses its Bessel-function
series, and the continuum polarization uses a 1-D radial integral evaluated
with QUADPACK. Convergence ladders compare the determinant route against the
closed-form limits at fixed points.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .errors import MisuseError
from .materials import ConstantEpsMu, InfinitelyPermeable, MaterialModel, PerfectConductor, Plasma, Vacuum
from .quadrature import QuadratureSpec
from .results import EnergyResult, integrate_channel
from .stack import C_LIGHT, HBAR, HBAR_C, LimitKind, Plate, StackConfig, classify, mass_from_bar

PROBE_POINTS = ((0.5, 0.5), (1.0, 1.0), (2.0, 1.0))
LADDER_CONTRASTS = tuple(10.0**k for k in range(2, 7))
LADDER_THRESHOLD = 1e-3


# ---------------------------------------------------------------------------
# massless Lifshitz formulas, typed independently of the channel modules


def _massless_integrand(stack: StackConfig, u, v, polarization: str):
    sc = stack.scales()
    xi = u * C_LIGHT / sc.length_unit
    kind = classify(stack)

    def layer(mat: MaterialModel):
        e = np.asarray(mat.eps(xi), dtype=float)
        m = np.asarray(mat.mu(xi), dtype=float)
        return e, m, np.sqrt(e * m * u**2 + v**2)

    eb, mb, kb = layer(stack.background)

    def fresnel(plate: Plate):
        mat = plate.material
        if isinstance(mat, PerfectConductor):
            return 1.0
        if isinstance(mat, InfinitelyPermeable):
            return -1.0
        e, m, kj = layer(mat)
        if polarization == "TE":
            r = (mb * kj - m * kb) / (mb * kj + m * kb)
        else:
            r = (e * kb - eb * kj) / (e * kb + eb * kj)
        damp = np.exp(-2.0 * kj * plate.thickness / sc.length_unit)
        return r * (1.0 - damp) / (1.0 - r * r * damp)

    if kind is LimitKind.GENERAL:
        rr = fresnel(stack.plate_l) * fresnel(stack.plate_r)
    else:
        rr = fresnel(stack.plate_l) * fresnel(stack.plate_r) * np.ones_like(u)
    return np.log1p(-rr * np.exp(-2.0 * kb * sc.gap))


def _require_massless(stack: StackConfig) -> None:
    if stack.mass != 0.0:
        raise MisuseError("massless reference called with a nonzero field mass")


def massless_lifshitz_te(stack: StackConfig, quad: Optional[QuadratureSpec] = None) -> EnergyResult:
    """Massless TE Lifshitz energy (J/m^2); the field mass must be zero."""
    _require_massless(stack)
    return integrate_channel(lambda u, v: _massless_integrand(stack, u, v, "TE"),
                             stack, quad, "TE", "energy")


def massless_lifshitz_tm(stack: StackConfig, quad: Optional[QuadratureSpec] = None) -> EnergyResult:
    """Massless TM Lifshitz energy (J/m^2) from the scalar formula; the field mass must be zero."""
    _require_massless(stack)
    return integrate_channel(lambda u, v: _massless_integrand(stack, u, v, "TM"),
                             stack, quad, "TM", "energy")


def massless_te_reference_integrand(stack: StackConfig, u, v):
    """Straight transcription of the TE integrand with the mass set to zero."""
    return _massless_integrand(stack, np.asarray(u, float), np.asarray(v, float), "TE")


def massless_tm_reference_integrand(stack: StackConfig, u, v):
    """Straight transcription of the massless scalar TM integrand."""
    return _massless_integrand(stack, np.asarray(u, float), np.asarray(v, float), "TM")


# ---------------------------------------------------------------------------
# analytic constants and series


def ideal_constants(a: float) -> tuple[float, float, float]:
    """Casimir values for ideal conductors in vacuum at separation ``a`` (m).

    Returns
    -------
    E_half : float
        One polarization, ``-pi^2 hbar c / (1440 a^3)`` in J/m^2.
    E_total : float
        ``-pi^2 hbar c / (720 a^3)`` in J/m^2.
    F_total : float
        ``-pi^2 hbar c / (240 a^4)`` in Pa.
    """
    e_half = -math.pi**2 * HBAR_C / (1440.0 * a**3)
    return e_half, 2.0 * e_half, -math.pi**2 * HBAR_C / (240.0 * a**4)


def conductor_te_series(m_bar: float, n_b: float = 1.0, terms: int = 400) -> float:
    """Dimensionless TE energy of ideal conductors, unit gap, via a Bessel series.

    ``-(m^2 / (8 pi^2 n_b)) sum_n K_2(2 n m) / n^2``, which tends to
    ``-pi^2 / (1440 n_b)`` as ``m -> 0``.
    """
    if m_bar == 0.0:
        return -math.pi**2 / (1440.0 * n_b)
    n = np.arange(1, terms + 1, dtype=float)
    series = math.fsum(special.kv(2, 2.0 * n * m_bar) / n**2)
    return -(m_bar**2) * series / (8.0 * math.pi**2 * n_b)


def conductor_te_force_series(m_bar: float, n_b: float = 1.0, terms: int = 400) -> float:
    """Dimensionless TE force of ideal conductors at unit gap, ``-d/da`` of the series."""
    if m_bar == 0.0:
        return -math.pi**2 / (480.0 * n_b)
    # E(a) = -(m^2 / (8 pi^2 n_b a)) S(m a) with S(x) = sum K_2(2 n x) / n^2
    n = np.arange(1, terms + 1, dtype=float)
    z = 2.0 * n * m_bar
    s = math.fsum(special.kv(2, z) / n**2)
    # K_2'(z) = -K_1(z) - 2 K_2(z) / z
    ds = math.fsum(2.0 * (-special.kv(1, z) - 2.0 * special.kv(2, z) / z) / n)
    return m_bar**2 * (m_bar * ds - s) / (8.0 * math.pi**2 * n_b)


def conductor_second_polarization_radial(m_bar: float, tau_l: float = 1.0, tau_r: float = 1.0) -> float:
    """Dimensionless continuum-polarization energy of ideal conductors in vacuum.

    The integrand depends on ``(u, v)`` only through ``r = sqrt(u^2 + v^2)``,
    so the quarter-plane integral with weight ``v`` reduces to
    ``int_0^inf f(r) r^2 dr``.
    """
    if m_bar == 0.0:
        return 0.0

    def f(r):
        qm = math.sqrt(r * r + m_bar * m_bar)
        d = (qm - r) / (qm + r)
        el, er = math.exp(-2.0 * r * tau_l), math.exp(-2.0 * r * tau_r)
        amp = d * d * (1.0 - el) * (1.0 - er) / ((1.0 - d * d * el) * (1.0 - d * d * er))
        return math.log1p(-amp * math.exp(-2.0 * qm)) * r * r

    value, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    return value / (4.0 * math.pi**2)


# ---------------------------------------------------------------------------
# convergence ladders


@dataclass
class LadderReport:
    """Deviations ``|general - limit|`` per contrast (rows) and probe point (columns)."""

    kind: str
    contrasts: list[float]
    probes: list[tuple[float, float]]
    deviations: list[list[float]]

    @property
    def monotone(self) -> bool:
        d = np.asarray(self.deviations)
        if len(d) < 2:
            return True
        return bool(np.all(np.diff(d, axis=0) <= 0.0))

    @property
    def final(self) -> float:
        return float(np.max(self.deviations[-1])) if self.deviations else 0.0

    def passed(self, threshold: float = LADDER_THRESHOLD) -> bool:
        return self.monotone and self.final < threshold

    def table(self) -> str:
        head = "contrast    " + "  ".join(f"({u:g},{v:g})".rjust(11) for u, v in self.probes)
        lines = [head]
        for c, row in zip(self.contrasts, self.deviations):
            lines.append(f"{c:<10.3g}  " + "  ".join(f"{d:11.3e}" for d in row))
        lines.append(f"monotone={self.monotone} final={self.final:.3e}")
        return "\n".join(lines)


def _constant_response(mat: MaterialModel) -> tuple[float, float]:
    eps = np.asarray(mat.eps(np.array([1.0, 1e12, 1e18])))
    mu = np.asarray(mat.mu(np.array([1.0, 1e12, 1e18])))
    if np.ptp(eps) or np.ptp(mu):
        raise MisuseError("ladders against identical media need a dispersionless background")
    return float(eps[0]), float(mu[0])


def _ladder_plate(marker: MaterialModel, contrast: float, background: MaterialModel) -> MaterialModel:
    if isinstance(marker, PerfectConductor):
        return ConstantEpsMu(contrast, 1.0)
    if isinstance(marker, InfinitelyPermeable):
        return ConstantEpsMu(1.0, contrast)
    eb, mb = _constant_response(background)
    return ConstantEpsMu(contrast * eb, mb)


def ladder_report(
    stack_template: StackConfig,
    contrast_values: Sequence[float] = LADDER_CONTRASTS,
    probes: Sequence[tuple[float, float]] = PROBE_POINTS,
) -> LadderReport:
    """Compare the determinant route with its limit as the plate contrast grows.

    For ideal plates, each row replaces a conductor by ``eps = contrast`` and a
    permeable plate by ``mu = contrast``, and the limit form is the closed
    form of the template. For real-material templates the plates become
    ``contrast`` times the background permittivity, and the limit is the
    identical-media value 0 reached at ``contrast = 1``.
    """
    from . import tm

    kind = classify(stack_template)
    u = np.array([p[0] for p in probes], dtype=float)
    v = np.array([p[1] for p in probes], dtype=float)
    if kind is LimitKind.GENERAL:
        reference = np.zeros_like(u)
    else:
        reference = tm.tm_integrand(stack_template, u, v)
    rows = []
    for c in contrast_values:
        stack = StackConfig(
            background=stack_template.background,
            plate_l=Plate(_ladder_plate(stack_template.plate_l.material, c, stack_template.background),
                          stack_template.plate_l.thickness),
            plate_r=Plate(_ladder_plate(stack_template.plate_r.material, c, stack_template.background),
                          stack_template.plate_r.thickness),
            separation=stack_template.separation,
            mass=stack_template.mass,
        )
        general = tm.general_tm_integrand(stack, u, v)
        rows.append([float(x) for x in np.abs(general - reference)])
    return LadderReport(kind.value, [float(c) for c in contrast_values],
                        [(float(a), float(b)) for a, b in probes], rows)


# ---------------------------------------------------------------------------
# verification suite


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass
class VerificationReport:
    level: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value:.3e} (tol {c.tolerance:.1e}) {c.detail}".rstrip()
            for c in self.checks
        ]
        lines.append(f"{'PASS' if self.passed else 'FAIL'}  {len(self.checks)} checks, {self.seconds:.1f} s")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps({"level": self.level, "passed": self.passed, "seconds": self.seconds,
                           "checks": [asdict(c) for c in self.checks]}, indent=2)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0.0 else abs(a)


def _check_rel(report: VerificationReport, name: str, value: float, reference: float, tol: float) -> None:
    err = _rel(value, reference)
    report.checks.append(Check(name, err <= tol, err, tol, f"value={value:.12g} reference={reference:.12g}"))


def _guarded(report: VerificationReport, name: str, fn: Callable[[], None]) -> None:
    try:
        fn()
    except Exception as exc:  # a crashing check is a failing check
        report.checks.append(Check(name, False, float("nan"), 0.0, f"raised {type(exc).__name__}: {exc}"))


def verify(level: str = "quick", quad: Optional[QuadratureSpec] = None) -> VerificationReport:
    """Run the oracle suite.

    ``quick`` covers the ideal constants and the massless identities. ``full``
    adds the limit ladders, the structural self-test of Q, force versus
    energy derivative checks and the continuum-polarization references.
    """
    from . import te, tm

    if level not in ("quick", "full"):
        raise MisuseError(f"unknown verification level {level!r}")
    report = VerificationReport(level)
    start = time.perf_counter()
    a = 1e-6
    e_half, e_total, f_total = ideal_constants(a)
    cc = StackConfig.symmetric(PerfectConductor(), a)

    def constants():
        _check_rel(report, "conductor TE energy", te.te_energy(cc, quad).value, e_half, 1e-6)
        _check_rel(report, "conductor TM energy", tm.tm_energy(cc, quad).value, e_half, 1e-6)
        _check_rel(report, "conductor total force", tm.total_force(cc, quad).value, f_total, 1e-6)

    def massless():
        for eps in (2.0, 10.0):
            s0 = StackConfig.symmetric(ConstantEpsMu(eps), a)
            ref_tm = massless_lifshitz_tm(s0, quad).value
            _check_rel(report, f"massless TM eps={eps:g}", tm.tm_energy(s0, quad).value, ref_tm, 1e-8)
            _check_rel(report, f"small-mass TM eps={eps:g}",
                       tm.tm_energy(StackConfig.symmetric(ConstantEpsMu(eps), a, m_bar=1e-6), quad).value,
                       ref_tm, 1e-5)
            _check_rel(report, f"massless TE eps={eps:g}", te.te_energy(s0, quad).value,
                       massless_lifshitz_te(s0, quad).value, 1e-8)

    def bessel():
        for m in (0.5, 2.0):
            s = StackConfig.symmetric(PerfectConductor(), a, m_bar=m)
            _check_rel(report, f"conductor TE series m={m:g}", te.te_energy(s, quad).dimensionless,
                       conductor_te_series(m), 1e-7)
            _check_rel(report, f"conductor TE force series m={m:g}", te.te_force(s, quad).dimensionless,
                       conductor_te_force_series(m), 1e-7)

    _guarded(report, "ideal constants", constants)
    _guarded(report, "massless identities", massless)
    _guarded(report, "TE Bessel series", bessel)

    if level == "full":
        def ladders():
            for nb in (1.0, 2.0):
                bg = Vacuum() if nb == 1.0 else ConstantEpsMu(nb * nb)
                for left, right in ((PerfectConductor(), PerfectConductor()),
                                    (InfinitelyPermeable(), InfinitelyPermeable()),
                                    (PerfectConductor(), InfinitelyPermeable())):
                    tpl = StackConfig(bg, Plate(left, a), Plate(right, a), a, mass_from_bar(1.0, a))
                    rep = ladder_report(tpl)
                    report.checks.append(Check(
                        f"ladder {rep.kind} n_b={nb:g}", rep.passed(), rep.final, LADDER_THRESHOLD,
                        "monotone" if rep.monotone else "not monotone"))

        def structure():
            for name, ok, detail in tm.self_test():
                report.checks.append(Check(f"Q self-test: {name}", ok, 0.0 if ok else 1.0, 0.0, detail))

        def derivatives():
            h = 1e-3 * a
            general = StackConfig(ConstantEpsMu(1.5, 1.2), Plate(ConstantEpsMu(3.0, 2.0), 0.5 * a),
                                  Plate(ConstantEpsMu(10.0), 2.0 * a), a, mass_from_bar(0.5, a))
            cases = [
                ("TM minors force", general, tm.tm_force_minors, tm.tm_energy),
                ("TE force", general, te.te_force, te.te_energy),
                ("conductor TM force", StackConfig.symmetric(PerfectConductor(), a, background=ConstantEpsMu(4.0),
                                                             m_bar=1.0), tm.tm_force, tm.tm_energy),
                ("mixed TM force", StackConfig(ConstantEpsMu(4.0), Plate(PerfectConductor(), a),
                                               Plate(InfinitelyPermeable(), a), a, mass_from_bar(1.0, a)),
                 tm.tm_force, tm.tm_energy),
            ]
            for name, stack, force, energy in cases:
                up = energy(stack.with_separation(a + h), quad, length_unit=a).value
                down = energy(stack.with_separation(a - h), quad, length_unit=a).value
                _check_rel(report, name, force(stack, quad).value, -(up - down) / (2.0 * h), 1e-4)

        def continuum():
            for m in (0.5, 1.0, 5.0):
                s = StackConfig.symmetric(PerfectConductor(), a, m_bar=m)
                tm2 = tm.tm_second_polarization_energy(s, quad)
                _check_rel(report, f"continuum radial m={m:g}", tm2.dimensionless,
                           conductor_second_polarization_radial(m), 1e-7)
                omega = mass_from_bar(m, a) * C_LIGHT**2 / HBAR
                swapped = StackConfig(Plasma(omega), Plate(Vacuum(), a), Plate(Vacuum(), a), a, 0.0)
                _check_rel(report, f"continuum plasma identity m={m:g}", tm2.value,
                           te.te_energy(swapped, quad).value, 1e-8)

        _guarded(report, "ladders", ladders)
        _guarded(report, "Q self-test", structure)
        _guarded(report, "force derivatives", derivatives)
        _guarded(report, "continuum polarization", continuum)

    report.seconds = time.perf_counter() - start
    return report
