"""Command-line front end.

Usage::

    evolsym gallery
    evolsym classify gallery:heat
    evolsym analyze op.json --shells 12 --dirs 32
    evolsym solve gallery:schrodinger --t 0.5 --N 4096 --L 200 --out run/
    evolsym cone gallery:wave --times 0.5,1,2 --N 4096 --L 200

The operator argument is a path to an operator-description JSON document or
``gallery:<name>[:key=value,...]``.  Reports are printed to standard output
and, with ``--out``, written to that directory.

Exit status: 0 on success, 2 when ``solve`` is refused because the
operator fails the spectral-bound test (rerun with ``--force``), 1 on any
other error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import reports
from .classifier import SATISFIED, VIOLATED, SamplingConfig, classify, growth_bound_check, petrovskii_verdict, sample_spectral_bound
from .errors import PetrovskiiViolation
from .fields import GridSpec, dump_field_csv, load_field_csv
from .gallery import GALLERY, gallery_document
from .operator import load_document
from .solver import bump_field, cone_estimate, mode_field, propagate, unitarity_check

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2

COMMANDS = ("analyze", "classify", "solve", "cone", "gallery")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _reals(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


@dataclass
class RunConfig:
    command: str
    operator_path: str | None
    N: list[int]
    L: list[float]
    t: float
    times: list[float]
    shells: int
    dirs: int
    seed: int
    threshold: float
    force: bool
    output_dir: Path | None
    ic: str

    def __post_init__(self):
        if self.command != "gallery" and not self.operator_path:
            raise UsageError(f"{self.command} needs an operator argument")
        if self.t < 0 or any(v < 0 for v in self.times):
            raise UsageError("times must be non-negative")

    def sampling(self) -> SamplingConfig:
        return SamplingConfig(shells=self.shells, directions=self.dirs, random_directions=self.dirs, seed=self.seed)

    def grid(self, n: int) -> GridSpec:
        def expand(vals, name):
            if len(vals) == 1:
                return vals * n
            if len(vals) != n:
                raise UsageError(f"--{name} needs 1 or {n} values")
            return vals

        return GridSpec(tuple(expand(self.L, "L")), tuple(expand(self.N, "N")))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="evolsym", description="Fourier-symbol analysis of constant-coefficient evolution systems.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("operator", nargs="?", help="operator JSON path or gallery:<name>")
    p.add_argument("--t", type=float, default=1.0, help="final time for solve")
    p.add_argument("--times", type=_reals, default=[0.5, 1.0, 2.0], help="times for cone")
    p.add_argument("--N", type=_ints, default=[1024], help="points per axis")
    p.add_argument("--L", type=_reals, default=[100.0], help="box length per axis")
    p.add_argument("--shells", type=int, default=16, help="largest dyadic shell index J")
    p.add_argument("--dirs", type=int, default=64, help="directions per shell (each of quasi-random and random)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=1e-8, help="relative support threshold for cone")
    p.add_argument("--force", action="store_true", help="propagate even if the spectral-bound test fails")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--ic", default="preset:bump", help="initial data: CSV path, preset:bump[:R] or preset:mode:k[,k...]")
    return p


def _parse_args(argv) -> RunConfig:
    a = build_parser().parse_args(argv)
    return RunConfig(
        command=a.command,
        operator_path=a.operator,
        N=a.N,
        L=a.L,
        t=a.t,
        times=a.times,
        shells=a.shells,
        dirs=a.dirs,
        seed=a.seed,
        threshold=a.threshold,
        force=a.force,
        output_dir=a.out,
        ic=a.ic,
    )


def _load_operator(ref: str):
    if ref.startswith("gallery:"):
        return load_document(gallery_document(ref[len("gallery:"):]))
    return load_document(Path(ref).read_text(encoding="utf-8"))


def _initial_data(cfg: RunConfig, op, grid: GridSpec):
    ic = cfg.ic
    if ic.startswith("preset:bump"):
        rest = ic[len("preset:bump"):]
        radius = float(rest[1:]) if rest.startswith(":") else min(grid.box_lengths) / 25
        return bump_field(grid, op.m, radius=radius)
    if ic.startswith("preset:mode:"):
        return mode_field(grid, _ints(ic[len("preset:mode:"):]), m=op.m)
    u0 = load_field_csv(ic)
    if u0.grid != grid or u0.m != op.m:
        raise UsageError(f"initial data in {ic} does not match the grid/operator")
    return u0


def _emit(cfg: RunConfig, name: str, payload: dict) -> None:
    text = reports.dumps(payload)
    sys.stdout.write(text)
    if cfg.output_dir is not None:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        (cfg.output_dir / name).write_text(text, encoding="utf-8")


def _cmd_gallery(cfg: RunConfig) -> int:
    items = [{"name": name, "description": desc, "document": factory()} for name, (factory, desc) in GALLERY.items()]
    _emit(cfg, "gallery.json", {"command": "gallery", "operators": items})
    return EXIT_OK


def _cmd_classify(cfg: RunConfig, op) -> int:
    c = classify(op, cfg.sampling())
    _emit(cfg, "classification.json", {"command": "classify", "operator": cfg.operator_path, "classification": c})
    return EXIT_OK


def _cmd_analyze(cfg: RunConfig, op) -> int:
    report = sample_spectral_bound(op, cfg.sampling())
    verdict = petrovskii_verdict(report)
    growth = None
    if verdict == SATISFIED and math.isfinite(report.s0_estimate):
        growth = growth_bound_check(op, report.s0_estimate, config=cfg.sampling())
    payload = {
        "command": "analyze",
        "operator": cfg.operator_path,
        "spectral_report": report,
        "petrovskii": verdict,
        "growth_bound": growth,
    }
    _emit(cfg, "analysis.json", payload)
    return EXIT_OK


def _cmd_solve(cfg: RunConfig, op) -> int:
    status = petrovskii_verdict(sample_spectral_bound(op, cfg.sampling()))
    if status == VIOLATED and not cfg.force:
        sys.stderr.write("evolsym: operator fails the spectral-bound test (petrovskii=violated); use --force to propagate\n")
        return EXIT_VIOLATED
    grid = cfg.grid(op.n)
    u0 = _initial_data(cfg, op, grid)
    ut = propagate(op, u0, cfg.t, force=cfg.force, check=False)
    out_dir = cfg.output_dir or Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = "field.csv"
    dump_field_csv(out_dir / csv_name, ut)
    payload = {
        "command": "solve",
        "operator": cfg.operator_path,
        "grid": grid.to_dict(),
        "t": cfg.t,
        "ic": cfg.ic,
        "petrovskii": status,
        "forced": cfg.force,
        "initial_norm": u0.norm(),
        "final_norm": ut.norm(),
        "unitarity": unitarity_check(op, u0, ut),
        "field_csv": csv_name,
    }
    text = reports.dumps(payload)
    sys.stdout.write(text)
    (out_dir / "solve.json").write_text(text, encoding="utf-8")
    return EXIT_OK


def _cmd_cone(cfg: RunConfig, op) -> int:
    grid = cfg.grid(op.n)
    cone = cone_estimate(op, cfg.times, grid, threshold=cfg.threshold, config=cfg.sampling())
    payload = {
        "command": "cone",
        "operator": cfg.operator_path,
        "grid": grid.to_dict(),
        "cone": cone,
        "spread_within_2_cells": cone.scaled_radii_spread <= cone.spread_tolerance(2.0),
    }
    _emit(cfg, "cone.json", payload)
    return EXIT_OK


def run(argv=None) -> int:
    """Run one command; returns the process exit status."""
    try:
        cfg = _parse_args(sys.argv[1:] if argv is None else argv)
        if cfg.command == "gallery":
            return _cmd_gallery(cfg)
        op = _load_operator(cfg.operator_path)
        handler = {"classify": _cmd_classify, "analyze": _cmd_analyze, "solve": _cmd_solve, "cone": _cmd_cone}[cfg.command]
        return handler(cfg, op)
    except PetrovskiiViolation as exc:
        sys.stderr.write(f"evolsym: {exc}\n")
        return EXIT_VIOLATED
    except (UsageError, OSError, ValueError, KeyError, ArithmeticError) as exc:
        sys.stderr.write(f"evolsym: error: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
