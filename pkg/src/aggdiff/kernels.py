"""Spatial averaging kernels: construction, moments, parameter inversion.

A kernel is a probability density on the periodic domain describing the
range over which one population detects another. Two families are built in:

* von Mises, ``K_a(x) = exp(a*cos(2*pi*x/L)) / normalization`` - smooth and
  periodic, with concentration parameter ``a`` (larger a = narrower kernel).
  On the unit domain the normalization is exactly ``I_0(a)``, the modified
  Bessel function of order 0; for general L the samples are renormalized by
  quadrature, which reduces to the same thing at L = 1.
* top-hat, ``K_gamma(x) = 1/(2*gamma)`` for ``|x| <= gamma`` (periodic
  distance) and 0 otherwise. Grid cells straddling the jumps at +-gamma
  receive the exact cell average so the discrete mass is 1 to machine
  precision regardless of grid alignment.

Kernels from different families are compared through their standard
deviation ``sigma = sqrt(int x^2 K dx - (int x K dx)^2)`` computed over
[-L/2, L/2); :func:`solve_param_for_sigma` inverts sigma -> parameter by
bisection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .spectral import Field, Grid, SpectralField, forward

VON_MISES = "von_mises"
TOP_HAT = "top_hat"
CUSTOM = "custom"

_SERIES_CUTOVER = 15.0


def log_bessel_i0(a: float) -> float:
    """log(I_0(a)) for a >= 0, accurate to better than 1e-12 relative in I_0.

    Power series below a = 15, asymptotic expansion above; working with the
    logarithm avoids overflow of exp(a) for strongly concentrated kernels
    (a of a few hundred is routine).
    """
    if a < 0:
        raise ValueError(f"I_0 argument must be non-negative, got {a}")
    if a < _SERIES_CUTOVER:
        # I_0(a) = sum_m ((a/2)^m / m!)^2
        term, total, m = 1.0, 1.0, 0
        while term > 1e-17 * total:
            m += 1
            term *= (a / (2 * m)) ** 2
            total += term
        return math.log(total)
    # I_0(a) ~ e^a / sqrt(2 pi a) * sum_k prod_{j<=k}(2j-1)^2 / (k! (8a)^k)
    term, total = 1.0, 1.0
    for k in range(1, 40):
        new = term * (2 * k - 1) ** 2 / (8 * k * a)
        if new >= term and k > 2:
            break  # asymptotic series started diverging; stop at its floor
        term = new
        total += term
        if term < 1e-17 * total:
            break
    return a - 0.5 * math.log(2 * math.pi * a) + math.log(total)


@dataclass(frozen=True)
class Kernel:
    """A normalized averaging kernel with cached spectrum and sigma.

    Immutable after construction; safe to share across threads.
    """

    grid: Grid
    samples: Field
    spectrum: SpectralField
    family: str
    parameter: float | None
    sigma: float

    def unit_coefficient(self, mode: int) -> float:
        """Continuous-convention Fourier coefficient at integer mode,
        normalized so mode 0 is exactly 1 (computed by DFT quadrature,
        spectrally accurate for resolved kernels)."""
        c = self.grid.L * self.spectrum.coeffs[mode % self.grid.M]
        return float(c.real)


def _sample_array(samples, grid):
    if isinstance(samples, Kernel):
        return samples.grid, samples.samples.values
    if isinstance(samples, Field):
        return samples.grid, samples.values
    if grid is None:
        raise ValueError("raw sample arrays require an explicit grid")
    return grid, np.asarray(samples, dtype=np.float64)


def kernel_first_moment(samples, grid: Grid | None = None) -> float:
    """First moment ``int x K dx`` over [-L/2, L/2] by trapezoid quadrature.

    The seam sample is shared between the endpoints -L/2 and +L/2 with half
    weight each; for this odd integrand the two halves cancel, so the seam
    carries zero first-moment weight (symmetric kernels then vanish to
    roundoff rather than to O(dx * K(L/2))).
    """
    grid, values = _sample_array(samples, grid)
    x_odd = grid.centered_x
    x_odd[grid.M // 2] = 0.0
    return grid.dx * float(np.sum(x_odd * values))


def kernel_sigma(samples, grid: Grid | None = None) -> float:
    """Standard deviation of a kernel over [-L/2, L/2] by trapezoid quadrature.

    On a uniform periodic grid the trapezoid rule reduces to ``dx * sum``
    (even integrand; the odd first moment gets the seam treatment of
    :func:`kernel_first_moment`). Accepts a :class:`Kernel`, a
    :class:`Field`, or a raw sample array plus grid. Negative variance from
    roundoff is clamped to zero with a warning.
    """
    grid, values = _sample_array(samples, grid)
    xc = grid.centered_x
    m1 = kernel_first_moment(values, grid)
    m2 = grid.dx * float(np.sum(xc * xc * values))
    var = m2 - m1 * m1
    if var < 0:
        warnings.warn(f"kernel variance {var:.3e} clamped to 0 (roundoff)")
        var = 0.0
    return math.sqrt(var)


def _finalize(grid: Grid, values: np.ndarray, family: str, parameter) -> Kernel:
    mass = grid.dx * float(values.sum())
    values = values / mass
    samples = Field(grid, values)
    return Kernel(
        grid=grid,
        samples=samples,
        spectrum=forward(samples),
        family=family,
        parameter=parameter,
        sigma=kernel_sigma(samples),
    )


def von_mises(grid: Grid, a: float) -> Kernel:
    """Smooth periodic kernel with concentration a > 0.

    Samples are evaluated in log space, ``exp(a*cos(2*pi*x/L) - log I_0(a))``,
    so large concentrations (a ~ 250 and beyond) cannot overflow. As a -> 0
    the kernel tends to the uniform density 1/L.
    """
    if not (a > 0):
        raise ValueError(f"von Mises concentration must be positive, got {a}")
    log_norm = log_bessel_i0(a)
    values = np.exp(a * np.cos(2 * np.pi * grid.x / grid.L) - log_norm)
    # For L != 1 the Bessel normalization is off by the quadrature factor;
    # _finalize renormalizes numerically either way (a ~1e-16 nudge at L=1).
    return _finalize(grid, values, VON_MISES, a)


def top_hat(grid: Grid, gamma: float) -> Kernel:
    """Uniform kernel of half-width gamma, 0 < gamma < L/2.

    Each grid cell [x_m - dx/2, x_m + dx/2) receives the exact average of
    the indicator over the cell, computed from the antiderivative
    ``G(t) = measure([0, t] intersect support)`` extended periodically, so
    the discrete mass is exactly 1 whatever the grid alignment.
    """
    L = grid.L
    if not (0 < gamma < L / 2):
        raise ValueError(f"top-hat half-width must lie in (0, {L / 2:g}), got {gamma}")

    def antiderivative(t):
        tm = np.mod(t, L)
        return 2 * gamma * np.floor(t / L) + np.minimum(tm, gamma) + np.maximum(0.0, tm - (L - gamma))

    lo = grid.x - grid.dx / 2
    overlap = antiderivative(lo + grid.dx) - antiderivative(lo)
    values = overlap / (grid.dx * 2 * gamma)
    return _finalize(grid, values, TOP_HAT, gamma)


def top_hat_analytic_spectrum(kernel: Kernel) -> SpectralField:
    """Exact sinc coefficients of the continuous top-hat, as an alternative
    to the DFT of the cell-averaged samples (for Gibbs-phenomenon studies)."""
    if kernel.family != TOP_HAT:
        raise ValueError("analytic spectrum is defined for top-hat kernels only")
    grid, gamma = kernel.grid, kernel.parameter
    modes = grid.signed_modes.astype(np.float64)
    arg = 2 * np.pi * modes * gamma / grid.L
    with np.errstate(invalid="ignore"):
        coeffs = np.where(arg == 0, 1.0, np.sin(arg) / np.where(arg == 0, 1.0, arg))
    return SpectralField(grid, coeffs.astype(np.complex128) / grid.L)


def custom_kernel(grid: Grid, values: np.ndarray) -> Kernel:
    """Kernel from raw samples: clipped-negative values are rejected, the
    density is normalized on construction, and asymmetric kernels (nonzero
    first moment) are rejected since the model requires mean-zero averaging."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.M,):
        raise ValueError(f"expected {grid.M} samples, got shape {values.shape}")
    if np.any(values < 0):
        raise ValueError(f"kernel samples must be non-negative (min {values.min():.3e})")
    if not np.all(np.isfinite(values)) or values.sum() <= 0:
        raise ValueError("kernel samples must be finite with positive mass")
    kernel = _finalize(grid, values, CUSTOM, None)
    m1 = kernel_first_moment(kernel)
    if abs(m1) > 1e-8 * grid.L:
        raise ValueError(
            f"kernel first moment {m1:.3e} is not zero; asymmetric kernels are not supported"
        )
    return kernel


def load_kernel(path, grid: Grid) -> Kernel:
    """Load a custom kernel from a single-column text file of M samples."""
    values = np.loadtxt(path, dtype=np.float64, ndmin=1)
    return custom_kernel(grid, values)


def solve_param_for_sigma(family: str, sigma_target: float, grid: Grid) -> float:
    """Invert kernel_sigma: find the family parameter whose kernel has the
    requested standard deviation on this grid, to within 1e-6.

    Bisection over a bracket on which sigma is monotone in the parameter
    (decreasing in a for von Mises, increasing in gamma for the top-hat);
    monotonicity of the endpoints is asserted. Raises ValueError naming the
    attainable interval when the target lies outside it.
    """
    family = family.lower().replace("-", "_").replace("vonmises", VON_MISES)
    if family == VON_MISES:
        build, lo, hi = von_mises, 1e-8, 1e6
    elif family in (TOP_HAT, "tophat"):
        build, lo, hi = top_hat, 1e-9 * grid.L, grid.L / 2 * (1 - 1e-12)
    else:
        raise ValueError(f"unknown kernel family {family!r}; expected von_mises or top_hat")

    sig_lo = kernel_sigma(build(grid, lo))
    sig_hi = kernel_sigma(build(grid, hi))
    if sig_lo == sig_hi:
        raise ValueError("kernel sigma is not monotone over the search bracket")
    increasing = sig_hi > sig_lo
    smin, smax = min(sig_lo, sig_hi), max(sig_lo, sig_hi)
    if not (smin - 1e-6 <= sigma_target <= smax + 1e-6):
        raise ValueError(
            f"sigma target {sigma_target:g} outside attainable range "
            f"[{smin:.6g}, {smax:.6g}] for family {family!r} on this grid"
        )

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        sig_mid = kernel_sigma(build(grid, mid))
        if abs(sig_mid - sigma_target) <= 1e-6:
            return mid
        if (sig_mid < sigma_target) == increasing:
            lo = mid
        else:
            hi = mid
    raise RuntimeError(
        f"bisection failed to reach |sigma - {sigma_target:g}| <= 1e-6 in 200 iterations"
    )


def build_kernel(grid: Grid, family: str, parameter: float | None = None,
                 sigma_target: float | None = None) -> Kernel:
    """Construct a kernel from either an explicit parameter or a sigma target
    (exactly one must be given)."""
    if (parameter is None) == (sigma_target is None):
        raise ValueError("give exactly one of parameter / sigma_target")
    fam = family.lower().replace("-", "_").replace("vonmises", VON_MISES)
    if fam == "tophat":
        fam = TOP_HAT
    if sigma_target is not None:
        parameter = solve_param_for_sigma(fam, sigma_target, grid)
    if fam == VON_MISES:
        return von_mises(grid, parameter)
    if fam == TOP_HAT:
        return top_hat(grid, parameter)
    raise ValueError(f"unknown kernel family {family!r}")


def check_same_grid(kernel: Kernel, grid: Grid) -> None:
    if kernel.grid != grid:
        raise GridMismatchError("kernel grid does not match field grid")
