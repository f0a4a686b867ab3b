"""Figure data sets: each writes a CSV of the plotted grid and renders a PNG."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import NGTMSTError
from .interferometer import phase_uncertainty, phase_uncertainty_tmst
from .ngstate import NGParams, success_probability
from .sweep import format_value

__all__ = ["FIGURES", "CONTOURS_T", "CONTOURS_V", "PAIRS", "FigureData", "build", "render", "figure_command"]

log = logging.getLogger(__name__)

PHI0 = 0.01
PAIRS = ((0, 1), (0, 2), (1, 0), (2, 0), (1, 1), (2, 2))
MAP_PAIRS = ((0, 1), (1, 0), (1, 1))
CONTOURS_T = (0, 1, 5, 20, 50, 100)
CONTOURS_V = (0.0, 0.1, 0.5, 1, 2, 3)
MAP_TAU = np.linspace(0.05, 0.99, 48)
MAP_R = np.linspace(0.05, 2.0, 40)


@dataclass
class FigureData:
    """Columns of one figure plus plotting hints."""

    name: str
    columns: list[str]
    rows: list[list]
    kind: str  # "curves" or "map"
    x: str
    series: list[str]
    ylabel: str = "delta_phi_rad"
    levels: tuple = ()


def _label(m: int, n: int) -> str:
    if m == n:
        return f"pc{m}"
    return f"ps{n - m}" if n > m else f"pa{m - n}"


def _safe(fn: Callable[[], float]) -> float:
    try:
        return fn()
    except (NGTMSTError, ArithmeticError) as exc:
        log.warning("point skipped: %s", exc)
        return math.nan


def _fig3a() -> FigureData:
    rs = np.linspace(0.05, 4.0, 80)
    rows = [[r, phase_uncertainty_tmst(math.tanh(r), 0.5, PHI0),
             phase_uncertainty_tmst(math.tanh(r), 1.0, PHI0)] for r in rs]
    cols = ["r_sq", "delta_phi_tmsv_rad", "delta_phi_tmst_rad"]
    return FigureData("fig3a", cols, rows, "curves", "r_sq", cols[1:])


def _fig3b() -> FigureData:
    lam = math.tanh(1.0)
    phis = np.linspace(-math.pi, math.pi, 401)
    rows = [[ph, phase_uncertainty_tmst(lam, 0.5, ph), phase_uncertainty_tmst(lam, 1.0, ph)]
            for ph in phis]
    cols = ["phi_rad", "delta_phi_tmsv_rad", "delta_phi_tmst_rad"]
    return FigureData("fig3b", cols, rows, "curves", "phi_rad", cols[1:])


def _ng_curves(name: str, xname: str, xs, make: Callable[[float, int, int], tuple[NGParams, float]]) -> FigureData:
    cols = [xname, "delta_phi_tmst_rad"] + [f"delta_phi_{_label(m, n)}_rad" for m, n in PAIRS]
    rows = []
    for x in xs:
        p0, phi = make(x, 0, 0)
        row = [x, phase_uncertainty_tmst(p0.lam, p0.kappa, phi)]
        for m, n in PAIRS:
            p, phi = make(x, m, n)
            row.append(_safe(lambda: phase_uncertainty(p, phi)))
        rows.append(row)
    return FigureData(name, cols, rows, "curves", xname, cols[1:])


def _fig4() -> FigureData:
    return _ng_curves("fig4", "r_sq", np.linspace(0.05, 2.5, 99),
                      lambda r, m, n: (NGParams.from_physical(r, 0.5, 0.9, m, n), PHI0))


def _fig5() -> FigureData:
    return _ng_curves("fig5", "tau", np.linspace(0.5, 0.999, 100),
                      lambda t, m, n: (NGParams.from_physical(1.0, 0.5, t, m, n), PHI0))


def _fig6() -> FigureData:
    return _ng_curves("fig6", "phi_rad", np.linspace(0.005, math.pi / 2, 100),
                      lambda ph, m, n: (NGParams.from_physical(1.0, 0.5, 0.9, m, n), ph))


def _map(name: str, n_th: float, what: str, levels=()) -> FigureData:
    cols = ["tau", "r_sq"] + [f"{what}_{_label(m, n)}" for m, n in MAP_PAIRS]
    rows = []
    for tau in MAP_TAU:
        for r in MAP_R:
            row = [tau, r]
            for m, n in MAP_PAIRS:
                p = NGParams.from_physical(r, n_th, tau, m, n)
                if what == "probability":
                    row.append(_safe(lambda: success_probability(p)))
                else:
                    base = phase_uncertainty_tmst(p.lam, p.kappa, PHI0)
                    row.append(_safe(lambda: base - phase_uncertainty(p, PHI0)))
            rows.append(row)
    ylabel = "probability" if what == "probability" else what
    return FigureData(name, cols, rows, "map", "tau", cols[2:], ylabel, levels)


FIGURES: dict[str, Callable[[], FigureData]] = {
    "fig3a": _fig3a,
    "fig3b": _fig3b,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7-left": lambda: _map("fig7-left", 0.0, "probability"),
    "fig7-right": lambda: _map("fig7-right", 0.0, "merit_vacuum", CONTOURS_V),
    "fig8-left": lambda: _map("fig8-left", 0.5, "probability"),
    "fig8-right": lambda: _map("fig8-right", 0.5, "merit_thermal", CONTOURS_T),
}


def build(name: str) -> FigureData:
    try:
        return FIGURES[name]()
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}") from None


def write_data(fig: FigureData, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fig.columns)
        for row in fig.rows:
            w.writerow([format_value(v) for v in row])


def render(fig: FigureData, path: Path) -> None:
    """Draw curves (log-scaled uncertainty) or contour panels to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.array(fig.rows, dtype=float)
    if fig.kind == "curves":
        fig_, ax = plt.subplots(figsize=(5, 3.6))
        x = data[:, 0]
        for j, name in enumerate(fig.series, start=1):
            y = np.where(np.isfinite(data[:, j]), data[:, j], np.nan)
            ax.plot(x, y, label=name.replace("delta_phi_", "").replace("_rad", ""))
        ax.set_yscale("log")
        ax.set_xlabel(fig.x)
        ax.set_ylabel(fig.ylabel)
        ax.legend(fontsize=7)
    else:
        taus, rs = np.unique(data[:, 0]), np.unique(data[:, 1])
        fig_, axes = plt.subplots(1, len(fig.series), figsize=(4 * len(fig.series), 3.4), squeeze=False)
        for j, (ax, name) in enumerate(zip(axes[0], fig.series), start=2):
            Z = data[:, j].reshape(len(taus), len(rs)).T
            if fig.levels:
                cs = ax.contour(taus, rs, Z, levels=list(fig.levels))
                ax.clabel(cs, fontsize=6)
            else:
                im = ax.pcolormesh(taus, rs, Z, shading="auto")
                fig_.colorbar(im, ax=ax)
            ax.set_title(name, fontsize=9)
            ax.set_xlabel("tau")
            ax.set_ylabel("r_sq")
    fig_.tight_layout()
    fig_.savefig(path, dpi=120)
    plt.close(fig_)


def figure_command(name: str, out_dir: str | Path, plot: bool = True) -> list[Path]:
    """Write ``<name>.csv`` (and ``<name>.png``) into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fig = build(name)
    paths = [out / f"{name}.csv"]
    write_data(fig, paths[0])
    if plot:
        paths.append(out / f"{name}.png")
        render(fig, paths[1])
    return paths
