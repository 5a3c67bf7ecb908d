"""Command-line interface.

Subcommands::

    aggdiff run <config.toml> [--seed S] [--output DIR] [--format F]
                [--threads N] [--force]
    aggdiff kernel <family> --sigma V [--grid-m M] [--grid-l L] [--samples]
    aggdiff check <record>
    aggdiff sweep <config.toml> --vary key=v1,v2,... [--threads N] [...]

Exit codes: 0 success (run finished steady or timed out), 1 check failure,
2 blowup during a run, 64 usage error (unknown flag/subcommand), 65 invalid
configuration. Output files are never overwritten unless --force is given.
The default worker count for sweeps comes from AGGDIFF_THREADS (else 1).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .config import SimulationConfig, build_simulation, parse_config
from .diagnostics import classify
from .errors import AggdiffError, ConfigError
from .integrator import BLOWUP, run
from .kernels import solve_param_for_sigma
from .records import read_record, record_from_run, write_record
from .spectral import Grid

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BLOWUP = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems via exception, not SystemExit."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="aggdiff", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"aggdiff {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one simulation from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override initial_condition.seed")
    p_run.add_argument("--output", default=None, help="override output.directory")
    p_run.add_argument("--format", choices=("csv", "binary"), default=None,
                       help="override output.format")
    p_run.add_argument("--threads", type=int, default=None, help="accepted for "
                       "symmetry with sweep; a single run is sequential")
    p_run.add_argument("--force", action="store_true",
                       help="overwrite existing output files")

    p_kernel = sub.add_parser("kernel", help="solve a kernel parameter for a sigma")
    p_kernel.add_argument("family", choices=("vonmises", "von_mises", "tophat", "top_hat"))
    p_kernel.add_argument("--sigma", type=float, required=True)
    p_kernel.add_argument("--grid-m", type=int, default=128)
    p_kernel.add_argument("--grid-l", type=float, default=1.0)
    p_kernel.add_argument("--samples", action="store_true",
                          help="also print the kernel samples, one per line")

    p_check = sub.add_parser("check", help="re-verify mass and positivity of a record")
    p_check.add_argument("record")

    p_sweep = sub.add_parser("sweep", help="independent runs over a parameter list")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--vary", required=True, metavar="KEY=V1,V2,...",
                         help="dotted config key and comma-separated values, "
                         "e.g. kernel.sigma_target=0.1,0.05 or initial_condition.seed=1,2")
    p_sweep.add_argument("--threads", type=int, default=None,
                         help="worker processes (default AGGDIFF_THREADS or 1)")
    p_sweep.add_argument("--output", default=None)
    p_sweep.add_argument("--format", choices=("csv", "binary"), default=None)
    p_sweep.add_argument("--force", action="store_true")
    return parser


def _report_line(run_id: str, report) -> str:
    return (f"{run_id},{report.classification},{report.dominant_mode},"
            f"{report.segregation_index:.17g},{report.steady_metric_final:.17g}")


def _prepare_out(directory: Path, names, force: bool):
    directory.mkdir(parents=True, exist_ok=True)
    for name in names:
        target = directory / name
        if target.exists() and not force:
            raise ConfigError(
                f"output file {target} exists; pass --force to overwrite")


def _execute(cfg: SimulationConfig, out_dir: Path, force: bool, run_id: str = "run"):
    """Run one simulation and write record + report; returns (exit code, report)."""
    ext = "csv" if cfg.output_format == "csv" else "bin"
    record_name = f"record.{ext}"
    _prepare_out(out_dir, [record_name, "report.csv"], force)

    grid, params, state, integ = build_simulation(cfg)
    result = run(state, params, integ)
    record = record_from_run(result, cfg_echo=cfg.echo(), seed=cfg.ic_seed)
    write_record(record, out_dir / record_name, cfg.output_format)

    if cfg.emit_spectra:
        coeffs = np.fft.fft(result.final_state.u, axis=1) / grid.M
        with open(out_dir / "spectra.csv", "w", encoding="utf-8") as fh:
            fh.write("species_index,mode,re,im\n")
            for s in range(params.N):
                for h in range(grid.M):
                    fh.write(f"{s},{h},{coeffs[s, h].real:.17g},{coeffs[s, h].imag:.17g}\n")

    if result.outcome == BLOWUP:
        print(f"{run_id}: blowup at t={result.outcome_t:g}; "
              f"partial record written to {out_dir / record_name}", file=sys.stderr)
        return EXIT_BLOWUP, None

    report = classify(result) if len(result.snapshot_t) >= 10 else None
    with open(out_dir / "report.csv", "w", encoding="utf-8") as fh:
        fh.write("run_id,classification,dominant_mode,segregation_index,steady_metric_final\n")
        if report is not None:
            fh.write(_report_line(run_id, report) + "\n")
    outcome = f"{result.outcome} at t={result.outcome_t:g}"
    label = report.classification if report else "unclassified (too few snapshots)"
    print(f"{run_id}: {outcome}; {label}; record: {out_dir / record_name}")
    return EXIT_OK, report


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg.ic_seed = args.seed
    if args.output is not None:
        cfg.output_directory = args.output
    if args.format is not None:
        cfg.output_format = args.format
    code, _report = _execute(cfg, Path(cfg.output_directory), args.force)
    return code


def _cmd_kernel(args) -> int:
    grid = Grid(args.grid_m, args.grid_l)
    parameter = solve_param_for_sigma(args.family, args.sigma, grid)
    name = "a" if "von" in args.family else "gamma"
    print(f"family={args.family.replace('-', '_')} sigma={args.sigma:g} "
          f"{name}={parameter:.6g}")
    if args.samples:
        from .kernels import build_kernel
        kernel = build_kernel(grid, args.family, parameter=parameter)
        for v in kernel.samples.values:
            print(f"{v:.17g}")
    return EXIT_OK


def _cmd_check(args) -> int:
    record = read_record(args.record)
    dx = record.L / record.M
    masses = dx * record.frames.sum(axis=2)       # (n_frames, N)
    ref = masses[0]
    drift = float(np.max(np.abs(masses - ref) / np.abs(ref)))
    min_value = float(record.frames.min())
    max_value = float(record.frames.max())
    mass_ok = drift <= 1e-6
    pos_ok = min_value > -1e-8 * max(max_value, 1e-300)
    print(f"frames={len(record.times)} mass_drift={drift:.3e} "
          f"({'ok' if mass_ok else 'FAIL'}) min_value={min_value:.6e} "
          f"({'ok' if pos_ok else 'FAIL'})")
    return EXIT_OK if (mass_ok and pos_ok) else EXIT_CHECK_FAILED


def _apply_vary(cfg: SimulationConfig, key: str, raw: str) -> SimulationConfig:
    attr_map = {
        "kernel.parameter": ("kernel_parameter", float),
        "kernel.sigma_target": ("kernel_sigma_target", float),
        "initial_condition.seed": ("ic_seed", int),
        "initial_condition.perturbation_amplitude": ("ic_amplitude", float),
        "integrator.dt": ("dt", float),
        "integrator.t_end": ("t_end", float),
    }
    if key not in attr_map:
        raise ConfigError(
            f"sweep key {key!r} not supported; choose from {sorted(attr_map)}")
    attr, cast = attr_map[key]
    import copy
    new = copy.deepcopy(cfg)
    setattr(new, attr, cast(raw))
    if key == "kernel.parameter":
        new.kernel_sigma_target = None
    if key == "kernel.sigma_target":
        new.kernel_parameter = None
    return new


def _sweep_worker(payload):
    cfg, out_dir, force, run_id = payload
    try:
        code, report = _execute(cfg, Path(out_dir), force, run_id)
        line = _report_line(run_id, report) if report else f"{run_id},unclassified,,,"
        return code, line
    except AggdiffError as exc:
        return EXIT_CONFIG, f"{run_id},error,,,{exc}"


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if args.output is not None:
        cfg.output_directory = args.output
    if args.format is not None:
        cfg.output_format = args.format
    if "=" not in args.vary:
        raise _UsageError("--vary expects KEY=V1,V2,...")
    key, _, raw_values = args.vary.partition("=")
    values = [v.strip() for v in raw_values.split(",") if v.strip()]
    if not values:
        raise _UsageError(f"--vary {key}: no values given")

    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("AGGDIFF_THREADS", "1"))
    base = Path(cfg.output_directory)
    jobs = []
    for raw in values:
        sub_cfg = _apply_vary(cfg, key, raw)
        run_id = f"{key}={raw}"
        jobs.append((sub_cfg, str(base / run_id.replace("/", "_")), args.force, run_id))

    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(job) for job in jobs]

    base.mkdir(parents=True, exist_ok=True)
    with open(base / "sweep_report.csv", "w", encoding="utf-8") as fh:
        fh.write("run_id,classification,dominant_mode,segregation_index,steady_metric_final\n")
        for _code, line in results:
            fh.write(line + "\n")
    worst = max(code for code, _ in results)
    print(f"sweep finished: {len(results)} runs, report: {base / 'sweep_report.csv'}")
    return worst


def cli_main(argv) -> int:
    """Entry point returning an exit code (no SystemExit)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "kernel":
            return _cmd_kernel(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print("configuration error:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  - {violation}", file=sys.stderr)
        return EXIT_CONFIG
    except AggdiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"invalid value: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
