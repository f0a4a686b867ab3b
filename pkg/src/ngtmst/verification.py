"""Closed form versus Fock oracle over the standard equivalence grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import oracle
from .errors import TailTooLarge
from .interferometer import parity_expectation
from .ngstate import NGParams, success_probability, wigner_normalized

__all__ = ["GRID_PAIRS", "GRID_TAU", "GRID_R", "GRID_NTH", "GRID_PHI", "TOLERANCES",
           "CaseResult", "equivalence_cases"]

GRID_PAIRS = ((0, 1), (1, 0), (1, 1), (0, 2), (2, 0), (2, 2))
GRID_TAU = (0.5, 0.8, 0.95)
GRID_R = (0.5, 1.0)
GRID_NTH = (0.0, 0.5)
GRID_PHI = (0.01, 0.3)
WIGNER_POINTS = 5
TOLERANCES = {"probability": 1e-8, "parity": 1e-6, "wigner": 1e-6}


@dataclass(frozen=True)
class CaseResult:
    """One comparison; ``note`` is set (and ``passed`` left True) when the oracle is unreliable."""

    quantity: str
    params: NGParams
    point: tuple
    closed: float
    reference: float
    tolerance: float
    note: str = ""

    @property
    def deviation(self) -> float:
        return abs(self.closed - self.reference)

    @property
    def skipped(self) -> bool:
        return bool(self.note)

    @property
    def passed(self) -> bool:
        return self.skipped or self.deviation <= self.tolerance

    def describe(self) -> str:
        p = self.params
        head = (f"{self.quantity:<11} m={p.m} n={p.n} tau={p.tau:<5g} r_sq={p.r_sq:.3g} "
                f"n_th={p.n_th:g} at {tuple(round(x, 4) for x in self.point)}")
        if self.skipped:
            return f"{head}  SKIP {self.note}"
        flag = "ok" if self.passed else "FAIL"
        return f"{head}  dev={self.deviation:.3e} tol={self.tolerance:.1e} {flag}"


def equivalence_cases(cutoff: int = oracle.DEFAULT_CUTOFF, tolerance: float | None = None,
                      seed: int = 2024, pairs=GRID_PAIRS, taus=GRID_TAU, rs=GRID_R,
                      nths=GRID_NTH) -> Iterator[CaseResult]:
    """Yield every comparison of the grid in a fixed order.

    Parameters
    ----------
    tolerance : float, optional
        Overrides the per-quantity tolerances when given.
    """
    tol = dict(TOLERANCES) if tolerance is None else dict.fromkeys(TOLERANCES, tolerance)
    rng = np.random.default_rng(seed)
    for r in rs:
        for n_th in nths:
            try:
                base = oracle.tmst_sectors(r, n_th, cutoff)
                note = ""
            except TailTooLarge as exc:
                base, note = None, f"TailTooLarge: {exc}"
            for m, n in pairs:
                for tau in taus:
                    p = NGParams.from_physical(r, n_th, tau, m, n)
                    pts = rng.uniform(-1.5, 1.5, size=(WIGNER_POINTS, 4))
                    if base is None:
                        for q in ("probability",) + ("parity",) * len(GRID_PHI) + ("wigner",) * WIGNER_POINTS:
                            yield CaseResult(q, p, (), math.nan, math.nan, tol[q], note)
                        continue
                    state, prob = oracle.herald(base, tau, m, n)
                    yield CaseResult("probability", p, (), success_probability(p), prob, tol["probability"])
                    for phi in GRID_PHI:
                        ref = oracle.parity_after_mzi(state, phi + math.pi / 2)
                        yield CaseResult("parity", p, (phi,), parity_expectation(p, phi), ref, tol["parity"])
                    for xi in pts:
                        yield CaseResult("wigner", p, tuple(xi), wigner_normalized(p, xi),
                                         oracle.wigner_point(state, xi), tol["wigner"])
