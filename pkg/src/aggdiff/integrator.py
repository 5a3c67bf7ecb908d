"""Fixed-step 4th-order time integration with steady-state detection.

The diffusion part of the model is linear and diagonal in Fourier space but
stiff: at M = 128 on the unit domain its fastest mode decays at a rate near
1.6e5, so a fully explicit 4th-order step is unstable at the time steps this
model is normally run with (dt = 1e-4). The stepper therefore propagates the
diffusion exactly with its exponential per stage (integrating factor) and
applies the classical 4th-order Runge-Kutta tableau to the nonlocal
advection term. The combined scheme is 4th-order accurate in dt, reduces to
the exact heat propagator when the interaction matrix is zero, and keeps the
advective increments mean-free, so mass is conserved to roundoff.

Stage structure, with E = exp(L dt/2) acting mode-wise and N the advection::

    k1 = N(u);  k2 = N(E(u + dt/2 k1));  k3 = N(Eu + dt/2 k2)
    k4 = N(E^2 u + dt E k3)
    u+ = E^2 u + dt/6 (E^2 k1 + 2E(k2 + k3) + k4)

A run marches until t_end or until the steady metric - the summed
per-species L2 norm of the change across one check interval, divided by the
interval length - falls below ``steady_tol``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, ConfigError, IntegrationError, MassDriftError
from .model import ModelParams, SpectralOperator, State

STEADY = "steady"
TIMED_OUT = "timed_out"
BLOWUP = "blowup"

BLOWUP_FACTOR = 1e12        # abort when Linf exceeds this multiple of initial
POSITIVITY_DIP = 1e-8       # tolerated negative dip, relative to max(u)
MASS_TOL = 1e-6             # relative drift that trips the mass monitor


@dataclass(frozen=True)
class Monitors:
    """Safety monitors evaluated at every steady-state check.

    ``positivity`` and ``mass`` are each "off", "warn", or "strict" (strict
    failures raise); ``l2_growth`` toggles the exponential-envelope
    bookkeeping, which is reporting only and never fails a run.
    """

    positivity: str = "warn"
    mass: str = "warn"
    l2_growth: bool = True

    def __post_init__(self):
        for name in ("positivity", "mass"):
            if getattr(self, name) not in ("off", "warn", "strict"):
                raise ConfigError(f"monitor {name} must be off/warn/strict")


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    snapshot_every: float = 0.1
    steady_tol: float = 1e-6
    check_every: float = 0.01
    monitors: Monitors = field(default_factory=Monitors)

    def __post_init__(self):
        problems = []
        if not (self.dt > 0):
            problems.append(f"integrator.dt must be positive, got {self.dt}")
        if not (self.t_end > 0):
            problems.append(f"integrator.t_end must be positive, got {self.t_end}")
        if self.dt > 0 and self.snapshot_every < self.dt:
            problems.append("integrator.snapshot_every must be >= dt")
        if self.dt > 0 and self.check_every < self.dt:
            problems.append("integrator.check_every must be >= dt")
        if self.steady_tol < 0:
            problems.append("integrator.steady_tol must be non-negative")
        if problems:
            raise ConfigError(problems)


@dataclass
class DiagnosticsSeries:
    """Time series sampled at every check interval."""

    t: np.ndarray
    masses: np.ndarray          # (n, N)
    l2_norms: np.ndarray        # (n, N)
    min_value: np.ndarray       # (n,)
    steady_metric: np.ndarray   # (n,)

    def growth_envelope(self):
        """(C, alpha) with ||u(t)||_L2 <= C * exp(alpha * t) over the
        recorded samples, alpha floored at 0 for decaying runs."""
        if len(self.t) == 0:
            return 0.0, 0.0
        norms = self.l2_norms.sum(axis=1)
        C = float(norms[0])
        positive_t = self.t > self.t[0]
        if C <= 0 or not positive_t.any():
            return C, 0.0
        alpha = float(np.max(np.log(norms[positive_t] / C)
                             / (self.t[positive_t] - self.t[0])))
        return C, max(alpha, 0.0)


@dataclass
class RunResult:
    final_state: State
    outcome: str                      # steady | timed_out | blowup
    outcome_t: float
    snapshot_t: np.ndarray            # (n_snap,)
    snapshots: np.ndarray             # (n_snap, N, M)
    diagnostics: DiagnosticsSeries
    warnings: list = field(default_factory=list)


class Stepper:
    """Reusable fixed-dt stepper bound to one parameter set.

    Operates on raw rfft spectra throughout a run (see SpectralOperator);
    the diffusion propagator and stage arithmetic are scale-invariant, so
    raw and normalized trajectories coincide up to the fixed 1/M factor.
    """

    def __init__(self, params: ModelParams, dt: float, dealias: bool = False):
        if not (dt > 0):
            raise ConfigError(f"dt must be positive, got {dt}")
        self.op = SpectralOperator(params)
        self.dt = dt
        self.dealias = dealias
        self.E = np.exp(self.op.diffusion * (dt / 2))
        self.E2 = self.E * self.E
        self._half_dt = dt / 2
        self._sixth_dt = dt / 6

    def advance(self, u_raw: np.ndarray) -> np.ndarray:
        E, E2 = self.E, self.E2
        nonlin, da = self.op.advection_raw, self.dealias
        k1 = nonlin(u_raw, da)
        k2 = nonlin(E * (u_raw + self._half_dt * k1), da)
        k3 = nonlin(E * u_raw + self._half_dt * k2, da)
        k4 = nonlin(E2 * u_raw + self.dt * (E * k3), da)
        return E2 * u_raw + self._sixth_dt * (E2 * k1 + 2 * (E * (k2 + k3)) + k4)


def rk4_step(state: State, params: ModelParams, dt: float) -> State:
    """Advance one step of length dt; t increases by dt.

    Raises BlowupError with the failing stage index when non-finite values
    appear.
    """
    if not np.all(np.isfinite(state.u)):
        raise BlowupError(state.t, stage=0)
    stepper = Stepper(params, dt)
    new_raw = stepper.advance(np.fft.rfft(state.u, axis=-1))
    u_new = np.fft.irfft(new_raw, n=state.grid.M, axis=-1)
    if not np.all(np.isfinite(u_new)):
        raise BlowupError(state.t + dt, stage=4)
    return State(state.grid, u_new, state.t + dt,
                 initial_masses=state.initial_masses.copy())


def _species_l2(u: np.ndarray, dx: float) -> np.ndarray:
    return np.sqrt(dx * (u * u).sum(axis=1))


def run(initial: State, params: ModelParams, cfg: IntegratorConfig,
        dealias: bool = False) -> RunResult:
    """Integrate from ``initial`` until t_end or steady state.

    Snapshots are recorded every ``snapshot_every`` time units (plus the
    initial and final states); diagnostics and monitors run every
    ``check_every``. Blowup (non-finite values or an Linf excursion beyond
    1e12 times the initial) ends the run with outcome "blowup", keeping the
    diagnostics collected so far. Strict monitors raise instead
    (MassDriftError / IntegrationError).
    """
    if initial.grid != params.grid:
        raise ConfigError("initial state and model parameters use different grids")
    grid, dx = initial.grid, initial.grid.dx
    check_stride = max(1, round(cfg.check_every / cfg.dt))
    snap_stride = max(1, round(cfg.snapshot_every / cfg.dt))
    stride = math.gcd(check_stride, snap_stride)
    n_total = max(1, round(cfg.t_end / cfg.dt))

    stepper = Stepper(params, cfg.dt, dealias)
    M = grid.M
    u_raw = np.fft.rfft(initial.u, axis=-1)

    masses0 = np.asarray(initial.initial_masses, dtype=np.float64)
    linf0 = float(np.abs(initial.u).max())
    mon = cfg.monitors
    issued: list = []

    snap_t = [initial.t]
    snaps = [initial.u.copy()]
    diag = {"t": [], "mass": [], "l2": [], "min": [], "metric": []}

    last_checked = initial.u.copy()
    last_check_n = 0
    outcome = TIMED_OUT
    outcome_t = initial.t + n_total * cfg.dt
    blown_state = None
    n = 0
    while n < n_total:
        block = min(stride, n_total - n)
        for _ in range(block):
            u_raw = stepper.advance(u_raw)
        n += block
        t = initial.t + n * cfg.dt
        u = np.fft.irfft(u_raw, n=M, axis=-1)

        if not np.all(np.isfinite(u)) or np.abs(u).max() > BLOWUP_FACTOR * max(linf0, 1e-300):
            outcome, outcome_t = BLOWUP, t
            blown_state = np.where(np.isfinite(u), u, 0.0)
            break

        if n % check_stride == 0 or n == n_total:
            elapsed = (n - last_check_n) * cfg.dt
            metric = float(_species_l2(u - last_checked, dx).sum()) / elapsed
            last_checked, last_check_n = u.copy(), n
            masses = dx * u.sum(axis=1)
            diag["t"].append(t)
            diag["mass"].append(masses)
            diag["l2"].append(_species_l2(u, dx))
            diag["min"].append(float(u.min()))
            diag["metric"].append(metric)

            if mon.positivity != "off":
                dip = float(u.min())
                if dip < -POSITIVITY_DIP * max(float(u.max()), 1e-300):
                    msg = f"positivity monitor: min density {dip:.3e} at t={t:g}"
                    if mon.positivity == "strict":
                        raise IntegrationError(msg, t)
                    issued.append(msg)
                    warnings.warn(msg)
            if mon.mass != "off":
                drift = float(np.max(np.abs(masses - masses0) / np.abs(masses0)))
                if drift > MASS_TOL:
                    msg = f"mass monitor: relative drift {drift:.3e} at t={t:g}"
                    if mon.mass == "strict":
                        raise MassDriftError(msg, t)
                    issued.append(msg)
                    warnings.warn(msg)

            if metric < cfg.steady_tol:
                outcome, outcome_t = STEADY, t
                if n % snap_stride == 0 and n < n_total:
                    snap_t.append(t)
                    snaps.append(u.copy())
                break

        if n % snap_stride == 0 and n < n_total:
            snap_t.append(t)
            snaps.append(u.copy())

    t_final = initial.t + n * cfg.dt
    final_u = blown_state if outcome == BLOWUP else np.fft.irfft(u_raw, n=M, axis=-1)
    final_state = State(grid, final_u, t_final, initial_masses=masses0.copy())
    if snap_t[-1] != t_final:
        snap_t.append(t_final)
        snaps.append(final_u.copy())

    n_checks = len(diag["t"])
    diagnostics = DiagnosticsSeries(
        t=np.asarray(diag["t"], dtype=np.float64),
        masses=np.asarray(diag["mass"], dtype=np.float64).reshape(n_checks, params.N),
        l2_norms=np.asarray(diag["l2"], dtype=np.float64).reshape(n_checks, params.N),
        min_value=np.asarray(diag["min"], dtype=np.float64),
        steady_metric=np.asarray(diag["metric"], dtype=np.float64),
    )
    return RunResult(
        final_state=final_state,
        outcome=outcome,
        outcome_t=outcome_t,
        snapshot_t=np.asarray(snap_t, dtype=np.float64),
        snapshots=np.asarray(snaps, dtype=np.float64),
        diagnostics=diagnostics,
        warnings=issued,
    )
