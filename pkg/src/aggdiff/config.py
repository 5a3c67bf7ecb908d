"""Simulation configuration files: schema, parsing, validation, realization.

Configs are TOML. Full key schema (types in parentheses, * = required):

``[grid]``
    M* (int, power of 2), L* (float > 0)
``[species]``
    N* (int >= 1), D* (list of N floats > 0),
    H* (list of N rows of N floats, row-major)
``[kernel]``
    family* ("von_mises" | "top_hat"),
    exactly one of: parameter (float) | sigma_target (float)
``[initial_condition]``
    kind ("perturbed_homogeneous" | "from_file", default perturbed_homogeneous)
    means (list of N floats > 0, default all 1.0)
    perturbation_amplitude (float >= 0, default 0.01)
    perturbation_max_mode (int, default 8)
    seed (int, default 0)
    path (string, required for from_file: a record file whose final frame
    becomes the initial state, e.g. for chaining one steady state into the
    next run)
``[integrator]``
    dt* (float > 0), t_end* (float > 0),
    snapshot_every (float, default 0.1), steady_tol (float, default 1e-6),
    check_every (float, default 0.01),
    positivity_monitor / mass_monitor ("off"|"warn"|"strict", default warn)
``[output]``
    directory (string, default "out"), format ("csv"|"binary", default csv),
    emit_spectra (bool, default false: when true the final state's Fourier
    coefficients are written alongside the record)

Validation collects every violation before failing, each message naming the
offending key.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .initial import perturbed_homogeneous
from .integrator import IntegratorConfig, Monitors
from .kernels import build_kernel
from .model import ModelParams, State
from .records import read_record
from .spectral import Grid, _is_power_of_two

KERNEL_FAMILIES = ("von_mises", "top_hat")
IC_KINDS = ("perturbed_homogeneous", "from_file")
OUTPUT_FORMATS = ("csv", "binary")


@dataclass
class SimulationConfig:
    M: int
    L: float
    N: int
    D: list
    H: list
    kernel_family: str
    kernel_parameter: float | None
    kernel_sigma_target: float | None
    ic_kind: str = "perturbed_homogeneous"
    ic_means: list = None
    ic_amplitude: float = 0.01
    ic_max_mode: int = 8
    ic_seed: int = 0
    ic_path: str | None = None
    dt: float = 1e-4
    t_end: float = 1.0
    snapshot_every: float = 0.1
    steady_tol: float = 1e-6
    check_every: float = 0.01
    positivity_monitor: str = "warn"
    mass_monitor: str = "warn"
    output_directory: str = "out"
    output_format: str = "csv"
    emit_spectra: bool = False

    def echo(self) -> dict:
        """Flat JSON-friendly view, embedded in record headers."""
        return {
            "grid": {"M": self.M, "L": self.L},
            "species": {"N": self.N, "D": list(self.D),
                        "H": [list(row) for row in self.H]},
            "kernel": {"family": self.kernel_family,
                       "parameter": self.kernel_parameter,
                       "sigma_target": self.kernel_sigma_target},
            "initial_condition": {"kind": self.ic_kind, "means": list(self.ic_means),
                                  "perturbation_amplitude": self.ic_amplitude,
                                  "perturbation_max_mode": self.ic_max_mode,
                                  "seed": self.ic_seed, "path": self.ic_path},
            "integrator": {"dt": self.dt, "t_end": self.t_end,
                           "snapshot_every": self.snapshot_every,
                           "steady_tol": self.steady_tol,
                           "check_every": self.check_every},
            "output": {"directory": self.output_directory,
                       "format": self.output_format,
                       "emit_spectra": self.emit_spectra},
        }


def _get(table, section, key, kind, problems, required=False, default=None,
         check=None, describe=""):
    sec = table.get(section)
    if sec is None or key not in sec:
        if required:
            problems.append(f"missing required key {section}.{key}")
        return default
    value = sec[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        problems.append(f"{section}.{key} must be {describe or kind.__name__}, "
                        f"got {value!r}")
        return default
    if check is not None and not check(value):
        problems.append(f"{section}.{key} {describe}, got {value!r}")
        return default
    return value


def parse_config(path) -> SimulationConfig:
    """Parse and validate a TOML config; raises ConfigError carrying every
    violation found, each naming the offending key."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            table = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    return validate_config(table)


def validate_config(table: dict) -> SimulationConfig:
    problems: list = []

    M = _get(table, "grid", "M", int, problems, required=True,
             check=_is_power_of_two, describe="must be a power of 2")
    L = _get(table, "grid", "L", float, problems, required=True,
             check=lambda v: v > 0, describe="must be positive")
    N = _get(table, "species", "N", int, problems, required=True,
             check=lambda v: v >= 1, describe="must be >= 1")
    D = _get(table, "species", "D", list, problems, required=True)
    H = _get(table, "species", "H", list, problems, required=True)

    if N is not None and D is not None:
        if len(D) != N or not all(isinstance(v, (int, float)) and v > 0 for v in D):
            problems.append(f"species.D must be {N} positive numbers, got {D!r}")
    if N is not None and H is not None:
        bad = (len(H) != N
               or any(not isinstance(row, list) or len(row) != N for row in H)
               or any(not isinstance(v, (int, float)) for row in H if isinstance(row, list) for v in row))
        if bad:
            problems.append(f"species.H must be an {N}x{N} matrix of numbers")

    family = _get(table, "kernel", "family", str, problems, required=True,
                  check=lambda v: v.replace("-", "_") in KERNEL_FAMILIES,
                  describe=f"must be one of {KERNEL_FAMILIES}")
    parameter = _get(table, "kernel", "parameter", float, problems,
                     check=lambda v: v > 0, describe="must be positive")
    sigma_target = _get(table, "kernel", "sigma_target", float, problems,
                        check=lambda v: v > 0, describe="must be positive")
    kernel_sec = table.get("kernel", {})
    if ("parameter" in kernel_sec) == ("sigma_target" in kernel_sec):
        problems.append("kernel: exactly one of kernel.parameter / "
                        "kernel.sigma_target must be given")

    kind = _get(table, "initial_condition", "kind", str, problems,
                default="perturbed_homogeneous",
                check=lambda v: v in IC_KINDS, describe=f"must be one of {IC_KINDS}")
    means = _get(table, "initial_condition", "means", list, problems)
    if means is not None and N is not None:
        if len(means) != N or not all(isinstance(v, (int, float)) and v > 0 for v in means):
            problems.append(f"initial_condition.means must be {N} positive numbers")
    amplitude = _get(table, "initial_condition", "perturbation_amplitude", float,
                     problems, default=0.01, check=lambda v: v >= 0,
                     describe="must be >= 0")
    max_mode = _get(table, "initial_condition", "perturbation_max_mode", int,
                    problems, default=8, check=lambda v: v >= 0,
                    describe="must be >= 0")
    seed = _get(table, "initial_condition", "seed", int, problems, default=0)
    ic_path = _get(table, "initial_condition", "path", str, problems)
    if kind == "from_file" and ic_path is None:
        problems.append("initial_condition.path is required when kind=from_file")

    dt = _get(table, "integrator", "dt", float, problems, required=True,
              check=lambda v: v > 0, describe="must be positive")
    t_end = _get(table, "integrator", "t_end", float, problems, required=True,
                 check=lambda v: v > 0, describe="must be positive")
    snapshot_every = _get(table, "integrator", "snapshot_every", float, problems,
                          default=0.1, check=lambda v: v > 0, describe="must be positive")
    steady_tol = _get(table, "integrator", "steady_tol", float, problems,
                      default=1e-6, check=lambda v: v >= 0, describe="must be >= 0")
    check_every = _get(table, "integrator", "check_every", float, problems,
                       default=0.01, check=lambda v: v > 0, describe="must be positive")
    pos_mon = _get(table, "integrator", "positivity_monitor", str, problems,
                   default="warn", check=lambda v: v in ("off", "warn", "strict"),
                   describe="must be off/warn/strict")
    mass_mon = _get(table, "integrator", "mass_monitor", str, problems,
                    default="warn", check=lambda v: v in ("off", "warn", "strict"),
                    describe="must be off/warn/strict")
    if dt is not None:
        if snapshot_every is not None and snapshot_every < dt:
            problems.append("integrator.snapshot_every must be >= integrator.dt")
        if check_every is not None and check_every < dt:
            problems.append("integrator.check_every must be >= integrator.dt")

    out_dir = _get(table, "output", "directory", str, problems, default="out")
    out_fmt = _get(table, "output", "format", str, problems, default="csv",
                   check=lambda v: v in OUTPUT_FORMATS,
                   describe=f"must be one of {OUTPUT_FORMATS}")
    emit_spectra = _get(table, "output", "emit_spectra", bool, problems,
                        default=False)

    if M is not None and max_mode is not None and max_mode >= max(M // 2, 1):
        problems.append(
            f"initial_condition.perturbation_max_mode must be < M/2 = {M // 2}")

    if problems:
        raise ConfigError(problems)

    return SimulationConfig(
        M=M, L=L, N=N, D=list(D), H=[list(r) for r in H],
        kernel_family=family.replace("-", "_"),
        kernel_parameter=parameter, kernel_sigma_target=sigma_target,
        ic_kind=kind, ic_means=list(means) if means is not None else [1.0] * N,
        ic_amplitude=amplitude, ic_max_mode=max_mode, ic_seed=seed, ic_path=ic_path,
        dt=dt, t_end=t_end, snapshot_every=snapshot_every,
        steady_tol=steady_tol, check_every=check_every,
        positivity_monitor=pos_mon, mass_monitor=mass_mon,
        output_directory=out_dir, output_format=out_fmt, emit_spectra=emit_spectra,
    )


def make_initial_condition(cfg: SimulationConfig, grid: Grid | None = None) -> State:
    """Build the initial State a config describes (deterministic in the seed)."""
    grid = grid or Grid(cfg.M, cfg.L)
    if cfg.ic_kind == "from_file":
        rec = read_record(cfg.ic_path)
        if rec.M != grid.M or rec.L != grid.L or rec.N != cfg.N:
            raise ConfigError(
                f"initial_condition.path: record shape (M={rec.M}, L={rec.L}, "
                f"N={rec.N}) does not match config (M={grid.M}, L={grid.L}, N={cfg.N})"
            )
        return State(grid, rec.frames[-1].copy(), 0.0)
    return perturbed_homogeneous(grid, cfg.ic_means, cfg.ic_amplitude,
                                 cfg.ic_max_mode, cfg.ic_seed)


def build_simulation(cfg: SimulationConfig):
    """Realize a parsed config: (grid, model params, initial state,
    integrator config)."""
    grid = Grid(cfg.M, cfg.L)
    kernel = build_kernel(grid, cfg.kernel_family,
                          parameter=cfg.kernel_parameter,
                          sigma_target=cfg.kernel_sigma_target)
    params = ModelParams(D=np.asarray(cfg.D), H=np.asarray(cfg.H), kernel=kernel)
    state = make_initial_condition(cfg, grid)
    integ = IntegratorConfig(
        dt=cfg.dt, t_end=cfg.t_end, snapshot_every=cfg.snapshot_every,
        steady_tol=cfg.steady_tol, check_every=cfg.check_every,
        monitors=Monitors(positivity=cfg.positivity_monitor,
                          mass=cfg.mass_monitor),
    )
    return grid, params, state, integ
