"""Post-hoc run analysis: pattern classification, segregation and flatness
measures, linear dispersion relation, and profile comparison utilities.

The classifier operationalizes three qualitative regimes:

* homogeneous - no spatial structure survived (non-DC amplitude below tol);
* stationary pattern - the run reached the steady-state detector with
  structure present;
* oscillatory - the run timed out and the steady metric keeps cycling over
  the last quarter of the run (relative amplitude above 10%) with no
  statistically significant decreasing trend (one-sided 5% slope test on the
  log metric). Using the metric series rather than pointwise values keeps
  traveling patterns, which are steady in profile but not in place,
  classified as oscillatory.

Runs that time out while still converging fall outside the three regimes;
they are reported as stationary patterns with ``steady_metric_final``
exposed so callers can re-threshold.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .integrator import RunResult, STEADY, TIMED_OUT
from .model import ModelParams, State, total_mass
from .spectral import Field, forward, spectral_derivative, inverse

HOMOGENEOUS = "homogeneous"
STATIONARY = "stationary_pattern"
OSCILLATORY = "oscillatory"

OSCILLATION_AMPLITUDE = 0.10   # relative tail amplitude that counts as cycling
PLATEAU_BAND = 0.05            # band around the maximum that counts as plateau
TREND_SIGNIFICANCE = 0.05


@dataclass
class PatternReport:
    classification: str
    steady_metric_final: float
    dominant_mode: int
    segregation_index: float
    oscillation_amplitude: float


def _nondc_relative_amplitude(state: State) -> float:
    """Largest non-DC Fourier amplitude across species, relative to the
    species mean."""
    worst = 0.0
    means = total_mass(state) / state.grid.L
    coeffs = np.fft.fft(state.u, axis=1) / state.grid.M
    half = state.grid.M // 2 + 1
    for i in range(state.N):
        amp = float(np.abs(coeffs[i, 1:half]).max())
        scale = max(abs(float(means[i])), 1e-300)
        worst = max(worst, amp / scale)
    return worst


def dominant_mode(state: State, species: int = 0) -> int:
    """Wavenumber of the largest non-DC Fourier amplitude of one species."""
    coeffs = np.fft.fft(state.u[species]) / state.grid.M
    half = state.grid.M // 2 + 1
    return int(np.argmax(np.abs(coeffs[1:half])) + 1)


def _decreasing_trend(t: np.ndarray, metric: np.ndarray) -> bool:
    """One-sided least-squares test: is log(metric) significantly
    decreasing at the 5% level?"""
    safe = np.clip(metric, 1e-300, None)
    res = stats.linregress(t, np.log(safe))
    if not np.isfinite(res.pvalue):
        return False
    one_sided = res.pvalue / 2 if res.slope < 0 else 1.0 - res.pvalue / 2
    return res.slope < 0 and one_sided < TREND_SIGNIFICANCE


def classify(result: RunResult, tol: float = 1e-6) -> PatternReport:
    """Classify a finished run; requires at least 10 snapshots."""
    if len(result.snapshot_t) < 10:
        raise ValueError(
            f"classification needs >= 10 snapshots, got {len(result.snapshot_t)}"
        )
    final = result.final_state
    nondc = _nondc_relative_amplitude(final)
    metric_series = result.diagnostics.steady_metric
    metric_final = float(metric_series[-1]) if len(metric_series) else 0.0

    tail = metric_series[3 * len(metric_series) // 4:]
    tail_t = result.diagnostics.t[3 * len(metric_series) // 4:]
    osc_amp = 0.0
    if len(tail) >= 4 and tail.mean() > 0:
        osc_amp = float((tail.max() - tail.min()) / tail.mean())

    if nondc < tol:
        label = HOMOGENEOUS
    elif result.outcome == STEADY:
        label = STATIONARY
    elif (result.outcome == TIMED_OUT and len(tail) >= 4
          and osc_amp > OSCILLATION_AMPLITUDE
          and not _decreasing_trend(tail_t, tail)):
        label = OSCILLATORY
    else:
        label = STATIONARY

    seg = 1.0
    if final.N >= 2:
        seg = segregation_index(final, 0, 1)
    return PatternReport(
        classification=label,
        steady_metric_final=metric_final,
        dominant_mode=dominant_mode(final, 0),
        segregation_index=seg,
        oscillation_amplitude=osc_amp,
    )


def segregation_index(state: State, i: int, j: int) -> float:
    """Normalized overlap ``int u_i u_j dx / (p_i p_j / L)``.

    1 for homogeneous or uncorrelated profiles, below 1 for spatially
    segregated species, above 1 for co-aggregated ones.
    """
    if i == j:
        raise ValueError("segregation index is defined for distinct species")
    masses = total_mass(state)
    if masses[i] == 0 or masses[j] == 0:
        raise ValueError("segregation index undefined for zero-mass species")
    overlap = state.grid.dx * float(np.sum(state.u[i] * state.u[j]))
    return overlap / (masses[i] * masses[j] / state.grid.L)


def flatness_profile(state: State, species: int):
    """(max_gradient, plateau_fraction) of one species' profile.

    max_gradient is the Linf norm of the spectral derivative;
    plateau_fraction is the fraction of points within 5% of the maximum
    (relative to the max-min range). A constant profile reports (0, 1).
    """
    u = state.u[species]
    umax, umin = float(u.max()), float(u.min())
    if umax - umin < 1e-300 * max(abs(umax), 1.0) or umax == umin:
        return 0.0, 1.0
    deriv = inverse(spectral_derivative(forward(Field(state.grid, u))))
    max_gradient = float(np.abs(deriv.values).max())
    plateau = float(np.mean(np.abs(u - umax) < PLATEAU_BAND * (umax - umin)))
    return max_gradient, plateau


def dispersion_relation(params: ModelParams, masses: np.ndarray, k: int) -> np.ndarray:
    """Linear growth rates of mode k about the homogeneous state.

    Linearizing about u_i = p_i / L with perturbations proportional to
    exp(i q x), q = 2 pi k / L: the averaging term contributes
    K_hat(k) * eps_j per species (K_hat the unit-normalized kernel
    coefficient), the advective divergence pulls down a factor -q^2 and one
    factor of the base density, giving the N x N growth matrix::

        A(k) = -q^2 * (D - diag(ubar) @ H * K_hat(k))

    whose eigenvalues are returned (complex, length N). Positive real parts
    predict pattern onset; validated against seeded single-mode runs of the
    full solver. k = 0 is the conserved mass mode: all-zero eigenvalues are
    returned with a warning.
    """
    masses = np.asarray(masses, dtype=np.float64)
    if masses.shape != (params.N,):
        raise ValueError(f"need {params.N} masses, got shape {masses.shape}")
    if k == 0:
        warnings.warn("mode 0 is the conserved mass mode; growth rates are zero")
        return np.zeros(params.N, dtype=np.complex128)
    L = params.L
    q = 2 * np.pi * k / L
    ubar = masses / L
    k_hat = params.kernel.unit_coefficient(k)
    matrix = -(q ** 2) * (np.diag(params.D) - (ubar[:, None] * params.H) * k_hat)
    return np.linalg.eigvals(matrix)


# Profile comparison. The alignment algorithm below is mirrored verbatim by
# the figure-regeneration package so overlay legends agree with the
# solver-side diagnostic to near machine precision; change both together.

def profile_shift(values_a: np.ndarray, values_b: np.ndarray, L: float) -> float:
    """Circular shift s maximizing the cross-correlation of a(x - s) with b.

    Joint over species when given (N, M) arrays. Integer-cell argmax of the
    FFT cross-correlation, refined to continuous s by a bracketed root of
    the correlation derivative (well conditioned: the shift-independent DC
    term cancels out of the derivative).
    """
    from scipy.optimize import brentq

    a = np.atleast_2d(np.asarray(values_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(values_b, dtype=np.float64))
    if a.shape != b.shape:
        raise ValueError(f"profile shapes differ: {a.shape} vs {b.shape}")
    M = a.shape[1]
    dx = L / M
    fa = np.fft.rfft(a, axis=1)
    fb = np.fft.rfft(b, axis=1)
    cross = (np.conj(fa) * fb).sum(axis=0)
    corr = np.fft.irfft(cross, n=M)
    s0 = int(np.argmax(corr))
    k = 2 * np.pi * np.fft.rfftfreq(M, d=dx)
    # half-spectrum weights reconstructing the full-spectrum sum
    w = np.full(len(cross), 2.0)
    w[0] = 1.0
    if M % 2 == 0:
        w[-1] = 1.0

    def correlation(s):
        return float(np.sum(w * np.real(cross * np.exp(1j * k * s))))

    def correlation_slope(s):
        return float(np.sum(w * np.real(1j * k * cross * np.exp(1j * k * s))))

    shift = s0 * dx
    lo, hi = (s0 - 1) * dx, (s0 + 1) * dx
    g_lo, g_hi = correlation_slope(lo), correlation_slope(hi)
    if g_lo > 0 > g_hi:
        refined = float(brentq(correlation_slope, lo, hi, xtol=1e-14))
        if correlation(refined) >= correlation(shift):
            shift = refined
    return shift % L


def shift_profile(values: np.ndarray, shift: float, L: float) -> np.ndarray:
    """Evaluate the band-limited interpolant of ``values`` at x - shift."""
    arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
    M = arr.shape[1]
    k = 2 * np.pi * np.fft.rfftfreq(M, d=L / M)
    shifted = np.fft.irfft(np.fft.rfft(arr, axis=1) * np.exp(-1j * k * shift), n=M, axis=1)
    return shifted.reshape(np.asarray(values).shape)


def profile_difference(values_a, values_b) -> float:
    """Relative L2 difference ||a - b|| / ||b|| without alignment."""
    a = np.asarray(values_a, dtype=np.float64)
    b = np.asarray(values_b, dtype=np.float64)
    denom = float(np.sqrt((b * b).sum()))
    if denom == 0:
        raise ValueError("reference profile is identically zero")
    return float(np.sqrt(((a - b) ** 2).sum())) / denom


def aligned_profile_difference(values_a, values_b, L: float):
    """(relative L2 difference, shift) after optimal circular alignment of
    a onto b. Translation-invariant comparison of steady profiles."""
    shift = profile_shift(values_a, values_b, L)
    return profile_difference(shift_profile(values_a, shift, L), values_b), shift
