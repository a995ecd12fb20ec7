"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 computation failure.
The output directory is taken from ``--output-dir``, then the
``THZCAVITY_OUTPUT_DIR`` environment variable, then the config's
``output_dir``, then the current directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from thzcavity import __version__
from thzcavity.cavity import ModeNotFoundError, ScanError, enumerate_modes, field_map, find_mode
from thzcavity.config import ConfigError, RunConfig
from thzcavity.files import (
    InputError,
    file_digest,
    read_branches,
    read_sweep,
    write_branches_csv,
    write_budget_csv,
    write_budget_json,
    write_field_csv,
    write_field_svg,
    write_modes_csv,
    write_modes_json,
    write_photons_csv,
)
from thzcavity.josephson import fit_branch_junctions
from thzcavity.radiometry import source_power_estimate, sweep_rows

OUTPUT_ENV = "THZCAVITY_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add(group, flag: str, kind=float, **kw):
    dest = flag.lstrip("-").replace("-", "_")
    group.add_argument(flag, dest=dest, type=kind, default=None, **kw)


def _geometry_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("geometry")
    _add(g, "--semi_major_um")
    _add(g, "--semi_minor_um")
    _add(g, "--thickness_um")
    _add(g, "--refractive_index_sq")
    _add(g, "--q_step")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--output-dir", dest="output_dir", default=None, help="directory for output files")

    parser = _Parser(prog="thzcavity", description="Elliptical-cavity THz emitter analysis.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("modes", parents=[common], help="tabulate TM(m, r) cavity modes")
    _geometry_flags(p)
    _add(p, "--f_max_GHz")
    _add(p, "--m_max", int)
    _add(p, "--q_min")

    p = sub.add_parser("field-map", parents=[common], help="sample one mode's field over the cavity")
    p.add_argument("parity", choices=("even", "odd"))
    p.add_argument("m", type=int)
    p.add_argument("r", type=int)
    _geometry_flags(p)
    _add(p, "--q_max")
    _add(p, "--q_min")
    _add(p, "--grid_resolution", int)
    p.add_argument("--format", dest="field_map_format", choices=("csv", "svg"), default=None)

    p = sub.add_parser("fit-junctions", parents=[common], help="fit junction counts to (V, f) branches")
    p.add_argument("csv", type=Path)
    _add(p, "--n_min", int)
    _add(p, "--n_max", int)
    _add(p, "--junction_thickness_nm")

    p = sub.add_parser("photons", parents=[common], help="convert a bolometer sweep to photon rates")
    p.add_argument("csv", type=Path)
    p.add_argument("--detector", default=None, help="HEB, Si or custom")
    _add(p, "--responsivity_mV_per_nW")
    _add(p, "--frequency_GHz")

    p = sub.add_parser("link-budget", parents=[common], help="back out the source power")
    for flag in (
        "--detected_power_nW",
        "--measurement_solid_angle_sr",
        "--emission_solid_angle_sr",
        "--air_attenuation_dB_per_km",
        "--path_length_m",
        "--frequency_GHz",
    ):
        _add(p, flag)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    keys = set(RunConfig.field_names()) - {"output_dir"}
    overrides = {k: v for k, v in vars(args).items() if k in keys and v is not None}
    return cfg.replace(**overrides) if overrides else cfg


def resolve_output_dir(args: argparse.Namespace, cfg: RunConfig) -> Path:
    for candidate in (args.output_dir, os.environ.get(OUTPUT_ENV), cfg.output_dir):
        if candidate:
            return Path(candidate)
    return Path(".")


def cmd_modes(cfg: RunConfig, out: Path) -> list[Path]:
    geom = cfg.geometry()
    modes = enumerate_modes(
        geom, cfg.f_max_GHz, m_max=cfg.m_max, q_min=cfg.q_min, q_step=cfg.q_step, constants=cfg.constants()
    )
    extra = {"geometry": {"mu0": geom.mu0, "focal_length_um": geom.focal_length_um}}
    paths = [
        write_modes_csv(out / "modes.csv", modes, cfg.digest),
        write_modes_json(out / "modes.json", modes, cfg.digest, extra),
    ]
    for md in modes:
        print(f"{md.label:<16} q={md.q_root:12.6f}  f={md.frequency_GHz:9.2f} GHz")
    return paths


def cmd_field_map(cfg: RunConfig, out: Path, parity: str, m: int, r: int) -> list[Path]:
    geom = cfg.geometry()
    mode = find_mode(parity, m, r, geom, q_max=cfg.q_max, q_min=cfg.q_min, q_step=cfg.q_step, constants=cfg.constants())
    fmap = field_map(mode, geom, cfg.grid_resolution)
    stem = f"field_{parity}_{m}_{r}"
    print(f"{mode.label} q={mode.q_root:.6f} f={mode.frequency_GHz:.2f} GHz")
    if cfg.field_map_format == "svg":
        return [write_field_svg(out / f"{stem}.svg", fmap, cfg.digest)]
    return [write_field_csv(out / f"{stem}.csv", fmap, cfg.digest)]


def cmd_fit_junctions(cfg: RunConfig, out: Path, csv_path: Path) -> list[Path]:
    branches = read_branches(csv_path)
    fits = []
    for branch_id, points in branches.items():
        try:
            fit = fit_branch_junctions(points, cfg.n_min, cfg.n_max, cfg.constants(), branch_id=branch_id)
        except ValueError as exc:
            raise InputError(f"{csv_path}: branch {branch_id!r}: {exc}") from exc
        fits.append(fit)
        print(f"{branch_id}: N={fit.fitted_N} rms={fit.residual_rms:.4g} GHz ({len(points)} points)")
    return [write_branches_csv(out / "junctions.csv", fits, cfg.digest, file_digest(csv_path))]


def cmd_photons(cfg: RunConfig, out: Path, csv_path: Path) -> list[Path]:
    rows = sweep_rows(read_sweep(csv_path), cfg.calibration(), cfg.frequency_GHz, cfg.constants())
    return [write_photons_csv(out / "photons.csv", rows, cfg.digest, file_digest(csv_path))]


def cmd_link_budget(cfg: RunConfig, out: Path) -> list[Path]:
    est = source_power_estimate(cfg.link_budget(), cfg.constants())
    for name, value in est.factors:
        print(f"{name:<40} {value:.6g}")
    print(f"{'source_power_nW':<40} {est.source_power_nW:.6g}")
    return [
        write_budget_csv(out / "link_budget.csv", est, cfg.digest),
        write_budget_json(out / "link_budget.json", est, cfg.digest),
    ]


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        out = resolve_output_dir(args, cfg)
        if args.command == "modes":
            paths = cmd_modes(cfg, out)
        elif args.command == "field-map":
            paths = cmd_field_map(cfg, out, args.parity, args.m, args.r)
        elif args.command == "fit-junctions":
            paths = cmd_fit_junctions(cfg, out, args.csv)
        elif args.command == "photons":
            paths = cmd_photons(cfg, out, args.csv)
        else:
            paths = cmd_link_budget(cfg, out)
    except (ConfigError, InputError, UsageError, OSError) as exc:
        print(f"thzcavity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModeNotFoundError, ScanError, ArithmeticError) as exc:
        print(f"thzcavity: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK
