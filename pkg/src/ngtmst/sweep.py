"""Parameter sweeps: configuration, record evaluation and CSV / JSON-lines output.

A sweep config is a flat TOML document. Each axis is a scalar, an explicit list,
or an inline table ``{start, stop, num}`` expanded with ``numpy.linspace``::

    r_sq = {start = 0.05, stop = 4.0, num = 80}   # or: lambda = ...
    tau = 0.9
    phi = [0.01, 0.3]
    n_th = 0.5                                     # or: kappa = ...
    pairs = [[0, 1], [1, 1]]
    out = "sweep.csv"
    verify = true
    verify_every = 10
    cutoff = 100

Grid order is row-major over ``pairs, kappa, tau, squeezing, phi`` with ``phi``
varying fastest.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import ConfigError, NGTMSTError, TailTooLarge
from .interferometer import phase_uncertainty_tmst, sensitivity_record
from .ngstate import NGParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "COLUMNS",
    "VERIFY_COLUMNS",
    "SweepConfig",
    "SweepRecord",
    "evaluate_point",
    "run_sweep",
    "format_value",
    "write_csv",
    "write_jsonl",
]

log = logging.getLogger(__name__)

COLUMNS = (
    "r_sq", "lambda", "n_th", "kappa", "tau", "m", "n", "op_kind", "phi_rad",
    "parity", "dparity_dphi", "delta_phi_rad", "probability",
    "delta_phi_tmst_rad", "merit_thermal", "merit_vacuum", "error",
)
VERIFY_COLUMNS = (
    "oracle_probability", "oracle_parity", "dev_probability", "dev_parity", "oracle_note",
)

_KNOWN_KEYS = {
    "r_sq", "lambda", "tau", "phi", "n_th", "kappa", "pairs", "out", "verify",
    "verify_every", "cutoff", "workers", "format",
}


def _axis(raw, name: str) -> tuple[float, ...]:
    if isinstance(raw, dict):
        try:
            start, stop, num = float(raw["start"]), float(raw["stop"]), int(raw["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: range needs numeric start, stop, num") from exc
        if num < 2:
            raise ConfigError(f"{name}: a swept axis needs num >= 2, got {num}")
        return tuple(float(x) for x in np.linspace(start, stop, num))
    if isinstance(raw, (list, tuple)):
        if not raw:
            raise ConfigError(f"{name}: empty list")
        vals = raw
    else:
        vals = [raw]
    try:
        return tuple(float(v) for v in vals)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: non-numeric value in {raw!r}") from exc


@dataclass(frozen=True)
class SweepConfig:
    """Grid of parameter points plus output and verification settings.

    ``squeezing`` holds ``r_sq`` values unless ``squeeze_is_lambda`` is set, and
    ``thermal`` holds ``n_th`` values unless ``thermal_is_kappa`` is set.
    """

    squeezing: tuple[float, ...]
    tau: tuple[float, ...]
    phi: tuple[float, ...]
    thermal: tuple[float, ...]
    pairs: tuple[tuple[int, int], ...] = ((0, 0),)
    squeeze_is_lambda: bool = False
    thermal_is_kappa: bool = False
    out: str | None = None
    verify: bool = False
    verify_every: int = 1
    cutoff: int = 100
    fmt: str = "csv"
    workers: int = 1
    _points: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        pts = []
        for (m, n), th, tau, sq, phi in itertools.product(
                self.pairs, self.thermal, self.tau, self.squeezing, self.phi):
            try:
                r = None
                if self.squeeze_is_lambda:
                    lam = sq
                else:
                    if sq < 0 or not math.isfinite(sq):
                        raise ConfigError(f"r_sq must be finite and >= 0, got {sq}")
                    lam, r = math.tanh(sq), sq
                kappa = th if self.thermal_is_kappa else th + 0.5
                pts.append((NGParams(lam, kappa, tau, m, n, _r=r), phi))
            except NGTMSTError as exc:
                raise ConfigError(str(exc)) from exc
            if not math.isfinite(phi):
                raise ConfigError(f"phi must be finite, got {phi}")
        if self.verify_every < 1:
            raise ConfigError("verify_every must be >= 1")
        if self.fmt not in ("csv", "jsonl"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        object.__setattr__(self, "_points", tuple(pts))

    @property
    def points(self) -> tuple[tuple[NGParams, float], ...]:
        return self._points

    def __len__(self) -> int:
        return len(self._points)

    @classmethod
    def from_mapping(cls, cfg: dict) -> "SweepConfig":
        unknown = set(cfg) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if ("r_sq" in cfg) == ("lambda" in cfg):
            raise ConfigError("give exactly one of r_sq, lambda")
        if ("n_th" in cfg) == ("kappa" in cfg):
            raise ConfigError("give exactly one of n_th, kappa")
        for key in ("tau", "phi"):
            if key not in cfg:
                raise ConfigError(f"missing key {key!r}")
        pairs = cfg.get("pairs", [[0, 0]])
        try:
            pairs = tuple((int(a), int(b)) for a, b in pairs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"pairs must be a list of [m, n], got {pairs!r}") from exc
        lam_key = "lambda" in cfg
        kap_key = "kappa" in cfg
        return cls(
            squeezing=_axis(cfg["lambda" if lam_key else "r_sq"], "squeezing"),
            tau=_axis(cfg["tau"], "tau"),
            phi=_axis(cfg["phi"], "phi"),
            thermal=_axis(cfg["kappa" if kap_key else "n_th"], "thermal"),
            pairs=pairs,
            squeeze_is_lambda=lam_key,
            thermal_is_kappa=kap_key,
            out=cfg.get("out"),
            verify=bool(cfg.get("verify", False)),
            verify_every=int(cfg.get("verify_every", 1)),
            cutoff=int(cfg.get("cutoff", 100)),
            fmt=str(cfg.get("format", "csv")),
            workers=int(cfg.get("workers", 1)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "SweepConfig":
        try:
            with open(path, "rb") as fh:
                cfg = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc
        return cls.from_mapping(cfg)


@dataclass(frozen=True)
class SweepRecord:
    """One output row; numeric fields are NaN when ``error`` is set."""

    values: dict

    def as_row(self, columns: Iterable[str]) -> list:
        return [self.values.get(c, "") for c in columns]


def _base_values(p: NGParams, phi: float) -> dict:
    return {
        "r_sq": p.r_sq, "lambda": p.lam, "n_th": p.n_th, "kappa": p.kappa,
        "tau": p.tau, "m": p.m, "n": p.n, "op_kind": p.op_kind.value, "phi_rad": phi,
    }


def evaluate_point(p: NGParams, phi: float) -> SweepRecord:
    """Evaluate every observable at one grid point; numeric failures are recorded."""
    vals = _base_values(p, phi)
    try:
        rec = sensitivity_record(p, phi)
        rec.validate()
        tmst = phase_uncertainty_tmst(p.lam, p.kappa, phi)
        merit = tmst - rec.delta_phi
        vals.update(
            parity=rec.parity, dparity_dphi=rec.dparity_dphi, delta_phi_rad=rec.delta_phi,
            probability=rec.probability, delta_phi_tmst_rad=tmst, merit_thermal=merit,
            merit_vacuum=merit if p.kappa == 0.5 else math.nan, error="",
        )
    except (NGTMSTError, ArithmeticError) as exc:
        nan = math.nan
        vals.update(parity=nan, dparity_dphi=nan, delta_phi_rad=nan, probability=nan,
                    delta_phi_tmst_rad=nan, merit_thermal=nan, merit_vacuum=nan,
                    error=f"{type(exc).__name__}: {exc}")
    return SweepRecord(vals)


def _verify_values(p: NGParams, phi: float, cutoff: int, rec: SweepRecord) -> dict:
    from . import oracle

    out = dict.fromkeys(VERIFY_COLUMNS[:4], math.nan)
    out["oracle_note"] = ""
    try:
        base = oracle.tmst_sectors(p.r_sq, p.n_th, cutoff)
        state, prob = oracle.herald(base, p.tau, p.m, p.n)
        par = oracle.parity_after_mzi(state, phi + math.pi / 2)
    except TailTooLarge as exc:
        out["oracle_note"] = f"TailTooLarge: {exc}"
        return out
    except (NGTMSTError, ArithmeticError) as exc:
        out["oracle_note"] = f"{type(exc).__name__}: {exc}"
        return out
    out["oracle_probability"] = prob
    out["oracle_parity"] = par
    out["dev_probability"] = abs(prob - rec.values["probability"])
    out["dev_parity"] = abs(par - rec.values["parity"])
    return out


def _task(args) -> SweepRecord:
    idx, p, phi, verify_every, cutoff, verify = args
    rec = evaluate_point(p, phi)
    if verify:
        extra = {c: "" for c in VERIFY_COLUMNS}
        if idx % verify_every == 0:
            extra = _verify_values(p, phi, cutoff, rec)
        rec = SweepRecord({**rec.values, **extra})
    return rec


def run_sweep(config: SweepConfig, workers: int | None = None) -> Iterator[SweepRecord]:
    """Yield records in grid order; parallel evaluation keeps that order."""
    workers = config.workers if workers is None else workers
    tasks = ((i, p, phi, config.verify_every, config.cutoff, config.verify)
             for i, (p, phi) in enumerate(config.points))
    if workers <= 1:
        yield from map(_task, tasks)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_task, tasks, chunksize=max(1, len(config) // (8 * workers)))


def format_value(v) -> str:
    """Fixed-width-free, bit-stable text form: 17 significant digits for floats."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(records: Iterable[SweepRecord], fh, columns=COLUMNS) -> int:
    """Write a header and one row per record; returns the row count."""
    import csv

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    count = 0
    for rec in records:
        w.writerow([format_value(v) for v in rec.as_row(columns)])
        count += 1
    return count


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return format_value(v)
    return v


def write_jsonl(records: Iterable[SweepRecord], fh, columns=COLUMNS) -> int:
    """One JSON object per line; non-finite floats become the strings "inf"/"nan"."""
    count = 0
    for rec in records:
        obj = {c: _json_value(v) for c, v in zip(columns, rec.as_row(columns))}
        fh.write(json.dumps(obj) + "\n")
        count += 1
    return count
