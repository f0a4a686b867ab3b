"""Parity-detection Mach-Zehnder metrology with heralded TMST inputs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .engine import MAX_ORDER, QuadExp, deriv_extract
from .errors import DomainError, NegligibleProbability, NoMinimumInRange
from .ngstate import PROBABILITY_FLOOR, NGParams, coefficients_parity, success_probability

__all__ = [
    "FD_STEP",
    "FLAT_SLOPE",
    "PhaseSensitivityRecord",
    "parity_raw",
    "parity_expectation",
    "parity_expectation_tmst",
    "parity_slope",
    "phase_uncertainty",
    "phase_uncertainty_tmst",
    "sensitivity_record",
    "merit_thermal",
    "merit_vacuum",
    "find_optimal_squeezing",
]

FD_STEP = 1e-4
FLAT_SLOPE = 1e-14
QUARTER = math.pi / 2


@dataclass(frozen=True)
class PhaseSensitivityRecord:
    """Observables of one (state, phase) point."""

    params: NGParams
    phi: float
    parity: float
    dparity_dphi: float
    delta_phi: float
    probability: float

    def validate(self) -> None:
        if not abs(self.parity) <= 1 + 1e-9:
            raise ArithmeticError(f"parity {self.parity} outside [-1, 1]")
        if not (self.delta_phi >= 0 or math.isinf(self.delta_phi)):
            raise ArithmeticError(f"negative phase uncertainty {self.delta_phi}")
        if not 0 < self.probability <= 1 + 1e-9:
            raise ArithmeticError(f"probability {self.probability} outside (0, 1]")


def _probability(p: NGParams, max_order: int) -> float:
    prob = success_probability(p, max_order)
    if prob <= PROBABILITY_FLOOR:
        raise NegligibleProbability(f"success probability {prob:.3g}")
    return prob


def parity_raw(p: NGParams, theta: float, prob: float | None = None,
               max_order: int = MAX_ORDER) -> float:
    """Output-mode parity after ``exp(-i theta J2)``; ``theta`` is the raw MZI angle."""
    if prob is None:
        prob = _probability(p, max_order)
    cs = coefficients_parity(p, theta)
    val = deriv_extract(QuadExp(cs.M3, prefactor=cs.e[0]), p.order, max_order)
    return float(val.real) / prob


def parity_expectation(p: NGParams, phi: float, max_order: int = MAX_ORDER) -> float:
    """Mean parity at phase ``phi``.

    The phase origin is chosen so that the unheralded TMST input gives
    ``(1 - lam^2) / (2 kappa sqrt(1 + lam^4 - 2 lam^2 cos 2phi))``; the raw
    interferometer angle is ``phi + pi/2``.
    """
    return parity_raw(p, phi + QUARTER, max_order=max_order)


def parity_expectation_tmst(lam: float, kappa: float, phi: float) -> float:
    """Mean parity for a TMST input, no heralding."""
    if not 0 <= lam < 1 or not kappa >= 0.5:
        raise DomainError(f"invalid (lam, kappa) = ({lam}, {kappa})")
    g = 1 + lam**4 - 2 * lam**2 * math.cos(2 * phi)
    return (1 - lam**2) / (2 * kappa * math.sqrt(g))


def parity_slope(p: NGParams, phi: float, h: float = FD_STEP, prob: float | None = None,
                 max_order: int = MAX_ORDER) -> float:
    """d<parity>/dphi by central differences with one Richardson step."""
    if prob is None:
        prob = _probability(p, max_order)
    th = phi + QUARTER

    def central(step):
        up = parity_raw(p, th + step, prob, max_order)
        down = parity_raw(p, th - step, prob, max_order)
        return (up - down) / (2 * step)

    d1, d2 = central(h), central(h / 2)
    return (4 * d2 - d1) / 3


def sensitivity_record(p: NGParams, phi: float, h: float = FD_STEP,
                       max_order: int = MAX_ORDER) -> PhaseSensitivityRecord:
    """Parity, slope, phase uncertainty and heralding probability at one point."""
    prob = _probability(p, max_order)
    f = parity_raw(p, phi + QUARTER, prob, max_order)
    df = parity_slope(p, phi, h, prob, max_order)
    if abs(df) < FLAT_SLOPE:
        dphi = math.inf
    else:
        dphi = math.sqrt(max(0.0, 1.0 - f * f)) / abs(df)
    return PhaseSensitivityRecord(p, phi, f, df, dphi, prob)


def phase_uncertainty(p: NGParams, phi: float, h: float = FD_STEP,
                      max_order: int = MAX_ORDER) -> float:
    """Error-propagation phase uncertainty; ``inf`` where the parity signal is flat."""
    return sensitivity_record(p, phi, h, max_order).delta_phi


def phase_uncertainty_tmst(lam: float, kappa: float, phi: float) -> float:
    """Closed-form phase uncertainty for a TMST input (TMSV at ``kappa = 1/2``)."""
    if not 0 <= lam < 1 or not kappa >= 0.5:
        raise DomainError(f"invalid (lam, kappa) = ({lam}, {kappa})")
    g = 1 + lam**4 - 2 * lam**2 * math.cos(2 * phi)
    x = (1 - lam**2) ** 2 / g
    slope = abs(lam**2 * (1 - lam**2) * math.sin(2 * phi)) / (kappa * g**1.5)
    if slope == 0:
        return math.inf
    # sqrt(1 - f^2) with f = sqrt(x) / (2 kappa), times 1/|f'|
    return math.sqrt(max(0.0, 1 - x / (4 * kappa**2))) / slope


def merit_thermal(p: NGParams, phi: float, max_order: int = MAX_ORDER) -> float:
    """Phase-uncertainty gain over the bare TMST input of the same (lam, kappa)."""
    return phase_uncertainty_tmst(p.lam, p.kappa, phi) - phase_uncertainty(p, phi, max_order=max_order)


def merit_vacuum(p: NGParams, phi: float, max_order: int = MAX_ORDER) -> float:
    """Phase-uncertainty gain over the bare TMSV input; requires ``kappa = 1/2``."""
    if p.kappa != 0.5:
        raise DomainError(f"vacuum merit needs kappa = 1/2, got {p.kappa}")
    return merit_thermal(p, phi, max_order)


def find_optimal_squeezing(template: NGParams | None, phi: float,
                           r_range: tuple[float, float] = (0.05, 4.0),
                           kappa: float | None = None, grid: int = 200,
                           tol: float = 1e-6) -> tuple[float, float]:
    """Squeezing strength minimizing the phase uncertainty.

    Parameters
    ----------
    template : NGParams or None
        Supplies (kappa, tau, m, n); its ``lam`` is ignored. ``None`` selects the
        closed-form TMST curve with thermal scale ``kappa``.
    phi : float
        Phase in radians.
    r_range : (float, float)
        Search interval for ``r_sq`` inside (0, 4].
    grid : int
        Coarse grid size before bounded refinement.

    Returns
    -------
    (r_opt, delta_phi_opt)

    Raises
    ------
    NoMinimumInRange
        If the coarse minimum sits on an end point of a non-degenerate interval.
    """
    lo, hi = map(float, r_range)
    if not (0 < lo <= hi <= 4):
        raise DomainError(f"r_range must lie inside (0, 4], got {r_range}")
    if template is None:
        if kappa is None:
            raise DomainError("need a template or kappa")
        k = kappa

        def cost(r):
            return phase_uncertainty_tmst(math.tanh(r), k, phi)
    else:
        def cost(r):
            return phase_uncertainty(template.replace(lam=math.tanh(r)), phi)

    if lo == hi:
        return lo, cost(lo)
    rs = np.linspace(lo, hi, grid)
    vals = np.array([cost(r) for r in rs])
    i = int(np.nanargmin(vals))
    if i == 0 or i == grid - 1:
        raise NoMinimumInRange(f"minimum at interval end r={rs[i]:.4g}")
    res = minimize_scalar(cost, bounds=(rs[i - 1], rs[i + 1]), method="bounded",
                          options={"xatol": tol})
    return float(res.x), float(res.fun)
