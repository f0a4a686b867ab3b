"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import math
import sys
from typing import Sequence

from . import figures, oracle
from .errors import ConfigError, DomainError, NGTMSTError, TailTooLarge
from .interferometer import find_optimal_squeezing, parity_expectation
from .ngstate import NGParams, success_probability, wigner_normalized
from .sweep import (COLUMNS, VERIFY_COLUMNS, SweepConfig, SweepRecord, evaluate_point,
                    run_sweep, write_csv, write_jsonl)
from .verification import equivalence_cases

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_NUMERIC", "EXIT_VERIFY"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("ngtmst")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _state_flags(p: argparse.ArgumentParser, need_phi: bool = True) -> None:
    sq = p.add_mutually_exclusive_group()
    sq.add_argument("--r-sq", type=float, help="squeezing strength r (lambda = tanh r)")
    sq.add_argument("--lambda", dest="lam", type=float, help="squeezing parameter in [0, 1)")
    th = p.add_mutually_exclusive_group()
    th.add_argument("--n-th", type=float, help="thermal photon number (default 0.5)")
    th.add_argument("--kappa", type=float, help="thermal scale n_th + 1/2")
    p.add_argument("--tau", type=float, default=1.0, help="transmissivity (default 1)")
    p.add_argument("--m", type=int, default=0, help="ancilla photons")
    p.add_argument("--n", type=int, default=0, help="detected photons")
    if need_phi:
        p.add_argument("--phi", type=float, default=0.01, help="phase in rad (default 0.01)")


def _io_flags(p: argparse.ArgumentParser, verify: bool = True) -> None:
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--cutoff", type=int, default=oracle.DEFAULT_CUTOFF, help="oracle Fock cutoff")
    if verify:
        p.add_argument("--verify", action="store_true", help="compare with the Fock oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ngtmst", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("parity", "mean output parity"),
                           ("sensitivity", "phase uncertainty and related observables"),
                           ("probability", "heralding success probability")):
        sp = sub.add_parser(name, help=helptext)
        _state_flags(sp, need_phi=name != "probability")
        _io_flags(sp)

    sp = sub.add_parser("wigner", help="normalized Wigner function at a phase-space point")
    _state_flags(sp, need_phi=False)
    sp.add_argument("--xi", type=float, nargs=4, metavar=("Q1", "P1", "Q2", "P2"), default=[0, 0, 0, 0])
    _io_flags(sp)

    sp = sub.add_parser("sweep", help="grid sweep from a TOML config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "jsonl"))
    sp.add_argument("--cutoff", type=int)
    sp.add_argument("--verify", action="store_true", default=None)

    sp = sub.add_parser("figure", help="write figure data and image")
    sp.add_argument("id", help=", ".join(figures.FIGURES))
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--no-plot", action="store_true", help="skip the PNG")

    sp = sub.add_parser("verify", help="closed forms against the Fock oracle")
    sp.add_argument("--cutoff", type=int, default=oracle.DEFAULT_CUTOFF)
    sp.add_argument("--tolerance", type=float, help="single tolerance for every quantity")
    sp.add_argument("--quiet", action="store_true", help="only print failures and the summary")

    sp = sub.add_parser("optimize", help="squeezing that minimizes the phase uncertainty")
    th = sp.add_mutually_exclusive_group()
    th.add_argument("--n-th", type=float)
    th.add_argument("--kappa", type=float)
    sp.add_argument("--tau", type=float, default=1.0)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--phi", type=float, default=0.01)
    sp.add_argument("--r-min", type=float, default=0.05)
    sp.add_argument("--r-max", type=float, default=4.0)
    _io_flags(sp, verify=False)
    return parser


def _kappa(args) -> float:
    if args.kappa is not None:
        return args.kappa
    return (0.5 if args.n_th is None else args.n_th) + 0.5


def _params(args) -> NGParams:
    if args.r_sq is None and args.lam is None:
        raise UsageError("give --r-sq or --lambda")
    kappa = _kappa(args)
    if args.lam is not None:
        return NGParams(args.lam, kappa, args.tau, args.m, args.n)
    if not args.r_sq >= 0:
        raise DomainError(f"r_sq must be non-negative, got {args.r_sq}")
    return NGParams(math.tanh(args.r_sq), kappa, args.tau, args.m, args.n, _r=args.r_sq)


@contextlib.contextmanager
def _sink(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _emit(records, columns, args) -> None:
    with _sink(args.out) as fh:
        (write_jsonl if args.format == "jsonl" else write_csv)(records, fh, columns)


def _base(p: NGParams) -> dict:
    return {"r_sq": p.r_sq, "lambda": p.lam, "n_th": p.n_th, "kappa": p.kappa, "tau": p.tau,
            "m": p.m, "n": p.n, "op_kind": p.op_kind.value}


def _oracle_state(p: NGParams, cutoff: int):
    base = oracle.tmst_sectors(p.r_sq, p.n_th, cutoff)
    return oracle.herald(base, p.tau, p.m, p.n)


def _cmd_point(args) -> int:
    p = _params(args)
    vals = _base(p)
    if args.command == "probability":
        vals["probability"] = success_probability(p)
        if args.verify:
            vals["oracle_probability"] = _oracle_state(p, args.cutoff)[1]
            vals["dev_probability"] = abs(vals["oracle_probability"] - vals["probability"])
    elif args.command == "parity":
        vals["phi_rad"] = args.phi
        vals["parity"] = parity_expectation(p, args.phi)
        if args.verify:
            state, _ = _oracle_state(p, args.cutoff)
            vals["oracle_parity"] = oracle.parity_after_mzi(state, args.phi + math.pi / 2)
            vals["dev_parity"] = abs(vals["oracle_parity"] - vals["parity"])
    elif args.command == "wigner":
        q1, p1, q2, p2 = args.xi
        vals.update(q1=q1, p1=p1, q2=q2, p2=p2, wigner=wigner_normalized(p, args.xi))
        if args.verify:
            state, _ = _oracle_state(p, args.cutoff)
            vals["oracle_wigner"] = oracle.wigner_point(state, args.xi)
            vals["dev_wigner"] = abs(vals["oracle_wigner"] - vals["wigner"])
    else:  # sensitivity
        rec = evaluate_point(p, args.phi)
        if rec.values["error"]:
            raise ArithmeticError(rec.values["error"])
        vals = {c: rec.values[c] for c in COLUMNS if c != "error"}
        if args.verify:
            state, prob = _oracle_state(p, args.cutoff)
            vals["oracle_probability"] = prob
            vals["oracle_parity"] = oracle.parity_after_mzi(state, args.phi + math.pi / 2)
            vals["dev_parity"] = abs(vals["oracle_parity"] - vals["parity"])
    _emit([SweepRecord(vals)], list(vals), args)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = SweepConfig.from_file(args.config)
    verify = cfg.verify if args.verify is None else args.verify
    cutoff = cfg.cutoff if args.cutoff is None else args.cutoff
    fmt = args.format or cfg.fmt
    out = args.out or cfg.out
    cfg = SweepConfig(**{**{k: getattr(cfg, k) for k in (
        "squeezing", "tau", "phi", "thermal", "pairs", "squeeze_is_lambda",
        "thermal_is_kappa", "verify_every")},
        "verify": verify, "cutoff": cutoff, "fmt": fmt, "out": out,
        "workers": args.workers or cfg.workers})
    columns = COLUMNS + (VERIFY_COLUMNS if cfg.verify else ())
    args.out, args.format = out, fmt
    failed = 0

    def counted():
        nonlocal failed
        for rec in run_sweep(cfg):
            failed += bool(rec.values["error"])
            yield rec

    _emit(counted(), columns, args)
    log.info("%d records, %d with errors", len(cfg), failed)
    return EXIT_NUMERIC if failed and failed == len(cfg) else EXIT_OK


def _cmd_figure(args) -> int:
    if args.id not in figures.FIGURES:
        raise UsageError(f"unknown figure {args.id!r}; choose from {', '.join(figures.FIGURES)}")
    for path in figures.figure_command(args.id, args.out, plot=not args.no_plot):
        print(path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.cutoff < 2:
        raise UsageError("cutoff must be at least 2")
    total = failed = skipped = 0
    for case in equivalence_cases(args.cutoff, args.tolerance):
        total += 1
        skipped += case.skipped
        failed += not case.passed
        if not args.quiet or not case.passed:
            print(case.describe())
    print(f"{total} comparisons, {failed} failed, {skipped} skipped (oracle tail too large)")
    return EXIT_VERIFY if failed else EXIT_OK


def _cmd_optimize(args) -> int:
    kappa = _kappa(args)
    if args.m == args.n == 0 and args.tau == 1.0:
        r, d = find_optimal_squeezing(None, args.phi, (args.r_min, args.r_max), kappa=kappa)
    else:
        tmpl = NGParams(0.0, kappa, args.tau, args.m, args.n)
        r, d = find_optimal_squeezing(tmpl, args.phi, (args.r_min, args.r_max))
    vals = {"kappa": kappa, "tau": args.tau, "m": args.m, "n": args.n, "phi_rad": args.phi,
            "r_opt": r, "delta_phi_opt_rad": d}
    _emit([SweepRecord(vals)], list(vals), args)
    return EXIT_OK


_COMMANDS = {
    "parity": _cmd_point, "sensitivity": _cmd_point, "probability": _cmd_point,
    "wigner": _cmd_point, "sweep": _cmd_sweep, "figure": _cmd_figure,
    "verify": _cmd_verify, "optimize": _cmd_optimize,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError, DomainError) as exc:
        print(f"ngtmst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TailTooLarge as exc:
        print(f"ngtmst: oracle cutoff too small: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NGTMSTError, ArithmeticError) as exc:
        print(f"ngtmst: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ngtmst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
