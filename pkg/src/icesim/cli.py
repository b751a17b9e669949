"""Command-line front end.

Verbs: ``modes`` (eigenbasis tables), ``simulate`` (leading-order amplitude
time series), ``coupling`` (ranked mode-coupling grids for axial indices
1-4), ``transient`` (per-mode startup decomposition), ``oracle1d`` (the
independent dual-method consistency check), and ``report`` (plain-text run
summary).

Exit codes: 0 success, 2 configuration error, 3 numerical failure; failures
also write a one-line JSON record to stderr.  File outputs are byte
identical for identical configurations — no timestamps, fixed row order,
17-significant-digit numbers — and every CSV opens with comment lines
carrying the package version, the configuration hash, and the active
numerical backend.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import __version__
from ._backend import backend_name
from .config import RunConfig, config_hash, load_config, time_grid
from .errors import ConfigError, NumericsError
from .geometry import Truncation, cavity_modes, membrane_modes
from .oned import equivalence_report
from .perturbation import evaluate_membrane, evaluate_pressure
from .spinning import coupling_matrix
from .transient import relaxation_time, transient_profile

_DETUNING_WARN = 0.05


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _csv(cfg: RunConfig, columns, rows) -> str:
    lines = [f"# icesim {__version__}",
             f"# config {config_hash(cfg)}",
             f"# backend {backend_name()}",
             ",".join(columns)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verb implementations (each returns {filename: text} or text)


def cmd_modes(cfg: RunConfig) -> dict[str, str]:
    """Retained cavity and membrane modes with roots and eigenvalues."""
    rows = []
    for cav in cavity_modes(cfg.geometry, cfg.truncation):
        rows.append(("cavity", str(cav.n1), str(cav.n2), str(cav.n3),
                     _fmt(cav.mu), _fmt(cav.lam)))
    for mem in membrane_modes(cfg.geometry, cfg.truncation):
        rows.append(("membrane", str(mem.k1), str(mem.k2), "",
                     _fmt(mem.nu), _fmt(mem.gamma)))
    columns = ("family", "i1", "i2", "i3", "root", "eigenvalue")
    return {"modes.csv": _csv(cfg, columns, rows)}


def cmd_simulate(cfg: RunConfig) -> dict[str, str]:
    """Leading-order membrane and pressure amplitudes on the output grid."""
    t = time_grid(cfg)
    rows = []
    for end in ("0", "L"):
        mems, amps = evaluate_membrane(cfg.geometry, cfg.materials,
                                       cfg.stimulus, cfg.truncation, t, end)
        for i, mem in enumerate(mems):
            rows.extend(("membrane", end, str(mem.k1), str(mem.k2), "",
                         _fmt(tj), _fmt(amps[i, j].real), _fmt(amps[i, j].imag))
                        for j, tj in enumerate(t))
    cavs, pres = evaluate_pressure(cfg.geometry, cfg.materials, cfg.stimulus,
                                   cfg.truncation, t)
    for i, cav in enumerate(cavs):
        rows.extend(("pressure", "", str(cav.n1), str(cav.n2), str(cav.n3),
                     _fmt(tj), _fmt(pres[i, j].real), _fmt(pres[i, j].imag))
                    for j, tj in enumerate(t))
    columns = ("field", "end", "i1", "i2", "i3", "t", "re", "im")
    return {"simulate.csv": _csv(cfg, columns, rows)}


def cmd_coupling(cfg: RunConfig) -> dict[str, str]:
    """Ranked coupling grids (30 cavity x 25 membrane) for n3 = 1..4."""
    columns = ("n3", "rank_n", "rank_k", "n1", "n2", "k1", "k2",
               "spin", "overlap", "value")
    files = {}
    for n3 in (1, 2, 3, 4):
        rep = coupling_matrix(cfg.geometry, cfg.materials, cfg.stimulus, n3)
        rows = []
        for i, (n1, n2) in enumerate(rep.row_indices):
            spin = _fmt(rep.spin[i])
            rows.extend((str(n3), str(i), str(j), str(n1), str(n2),
                         str(k1), str(k2), spin,
                         _fmt(rep.overlap[i, j]), _fmt(rep.value[i, j]))
                        for j, (k1, k2) in enumerate(rep.col_indices))
        files[f"coupling_n3_{n3}.csv"] = _csv(cfg, columns, rows)
    return files


def cmd_transient(cfg: RunConfig) -> dict[str, str]:
    """Per-membrane-mode startup decomposition total = harmonic - transient."""
    t = time_grid(cfg)
    prof = transient_profile(cfg.geometry, cfg.materials, cfg.stimulus,
                             cfg.truncation, t)
    columns = ("t", "re_harm", "im_harm", "re_trans", "im_trans",
               "re_total", "im_total")
    files = {}
    for i, mem in enumerate(prof.modes):
        rows = [(_fmt(tj),
                 _fmt(prof.harmonic[j].real), _fmt(prof.harmonic[j].imag),
                 _fmt(prof.transient[i, j].real), _fmt(prof.transient[i, j].imag),
                 _fmt(prof.total[i, j].real), _fmt(prof.total[i, j].imag))
                for j, tj in enumerate(t)]
        files[f"transient_k{mem.k1}_{mem.k2}.csv"] = _csv(cfg, columns, rows)
    return files


def cmd_report(cfg: RunConfig) -> str:
    """Plain-text run summary: relaxation, settling, dominance, detuning."""
    geom, mats, stim = cfg.geometry, cfg.materials, cfg.stimulus
    lines = [f"icesim {__version__} report",
             f"config = {config_hash(cfg)}",
             f"preset = {cfg.preset or '(custom)'}",
             f"backend = {backend_name()}",
             f"T_eq = {_fmt(relaxation_time(mats))} s"]

    prof = transient_profile(geom, mats, stim, cfg.truncation, time_grid(cfg))
    settle = prof.settling_time()
    if math.isfinite(settle):
        lines.append(f"settling = {_fmt(settle)} s")
    else:
        lines.append("settling = not reached within the window")

    for n3 in (1, 2, 3, 4):
        rep = coupling_matrix(geom, mats, stim, n3)
        i, j = rep.argmax
        n1, n2 = rep.row_indices[i]
        verdict = ("axial mode dominates" if rep.axial_dominates
                   else "axial mode does NOT dominate")
        lines.append(f"coupling n3={n3}: strongest cavity row rank {i} "
                     f"(n1={n1}, n2={n2}) -> {verdict}")

    warnings = []
    if stim.omega > 0.0:
        best_cav = min(
            ((abs(stim.omega - mats.c * math.sqrt(-cav.lam)) / stim.omega, cav)
             for cav in cavity_modes(geom, cfg.truncation)),
            key=lambda item: item[0])
        det, cav = best_cav
        lines.append(f"cavity detuning min = {_fmt(det)} at "
                     f"(n1={cav.n1}, n2={cav.n2}, n3={cav.n3})")
        if det < _DETUNING_WARN:
            warnings.append(f"stimulus within {det:.1%} of cavity mode "
                            f"(n1={cav.n1}, n2={cav.n2}, n3={cav.n3})")
        best_mem = min(
            ((abs(stim.omega - mats.c_m * math.sqrt(-mem.gamma)) / stim.omega,
              mem) for mem in membrane_modes(geom, cfg.truncation)),
            key=lambda item: item[0])
        det, mem = best_mem
        lines.append(f"membrane detuning min = {_fmt(det)} at "
                     f"(k1={mem.k1}, k2={mem.k2})")
        if det < _DETUNING_WARN:
            warnings.append(f"stimulus within {det:.1%} of membrane mode "
                            f"(k1={mem.k1}, k2={mem.k2})")
    else:
        lines.append("stimulus is static; detuning not applicable")

    if warnings:
        lines.extend(f"WARNING: {msg}" for msg in warnings)
    else:
        lines.append("no resonance warnings")
    return "\n".join(lines) + "\n"


def cmd_oracle1d(seed: int, trials: int) -> tuple[str, bool]:
    """Seeded dual-method consistency reports; True when every trial passes."""
    lines = [f"oracle1d seed={seed} trials={trials}"]
    all_passed = True
    for i in range(trials):
        rep = equivalence_report(seed=seed + i)
        status = "PASS" if rep.passed else "FAIL"
        all_passed = all_passed and rep.passed
        lines.append(f"trial {i}: seed={rep.seed} rel_l2={rep.rel_l2:.3e} "
                     f"threshold={rep.threshold:.0e} {status}")
    lines.append(f"oracle1d: {'PASS' if all_passed else 'FAIL'}")
    return "\n".join(lines) + "\n", all_passed


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icesim",
        description="Modal simulator for an acoustic cavity coupling two "
                    "damped membranes.")
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", help="named configuration: gecko, varanus")
    source.add_argument("--config", help="path to a 'key = value' config file")
    common.add_argument("--out", default=None,
                        help="output directory (default: from config)")
    common.add_argument("--truncation", default=None, metavar="N1,N2,N3,K1,K2",
                        help="override retained mode counts")
    common.add_argument("--time-window", dest="time_window", type=float,
                        default=None, help="override run.window [s]")
    common.add_argument("--samples", type=int, default=None,
                        help="override run.samples")
    common.add_argument("--strict", action="store_true",
                        help="treat unknown config keys as errors")

    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("modes", parents=[common],
                   help="write the retained eigenbasis tables")
    sub.add_parser("simulate", parents=[common],
                   help="write leading-order amplitude time series")
    sub.add_parser("coupling", parents=[common],
                   help="write ranked coupling grids for n3 = 1..4")
    sub.add_parser("transient", parents=[common],
                   help="write per-mode startup decompositions")
    sub.add_parser("report", parents=[common],
                   help="print a plain-text run summary")
    oracle = sub.add_parser("oracle1d", parents=[common],
                            help="run the 1-D dual-method consistency check")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--trials", type=int, default=1)
    return parser


def _resolve_config(args) -> RunConfig:
    source = args.config if args.config is not None else args.preset
    if source is None:
        raise ConfigError("provide --preset NAME or --config PATH")
    cfg = load_config(source, strict=args.strict)
    for key in cfg.ignored:
        print(f"warning: ignoring unknown key {key!r}", file=sys.stderr)

    updates = {}
    if args.truncation is not None:
        parts = args.truncation.split(",")
        if len(parts) != 5:
            raise ConfigError("--truncation expects five integers "
                              "N1,N2,N3,K1,K2")
        try:
            counts = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(
                f"--truncation expects integers, got {args.truncation!r}"
            ) from None
        try:
            updates["truncation"] = Truncation(*counts)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if args.time_window is not None:
        updates["window"] = args.time_window
    if args.samples is not None:
        updates["samples"] = args.samples
    if args.out is not None:
        updates["out_dir"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _write_files(cfg: RunConfig, files: dict[str, str]) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")


def _dispatch(args) -> int:
    if args.verb == "oracle1d":
        text, passed = cmd_oracle1d(args.seed, args.trials)
        sys.stdout.write(text)
        if not passed:
            raise NumericsError(
                "dual-method 1-D check exceeded its error threshold")
        return 0
    cfg = _resolve_config(args)
    if args.verb == "report":
        sys.stdout.write(cmd_report(cfg))
        return 0
    command = {"modes": cmd_modes, "simulate": cmd_simulate,
               "coupling": cmd_coupling, "transient": cmd_transient}[args.verb]
    _write_files(cfg, command(cfg))
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
