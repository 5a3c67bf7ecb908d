"""Real-valued periodic fields and their Fourier-space primitives.

Everything downstream (kernels, model right-hand side, diagnostics) is built
on the four operations in this module: forward/inverse transforms, spectral
differentiation, and spectral convolution.

Conventions
-----------
The forward transform carries the 1/M normalization::

    coeffs[h] = (1/M) * sum_m values[m] * exp(-2*pi*i*h*m/M)

so that ``coeffs[0]`` equals the mean of the field and the coefficients of a
smooth field approximate its continuous Fourier-series coefficients
``(1/L) * integral(u(x) * exp(-2*pi*i*h*x/L))``. The inverse is the plain sum
``values[m] = sum_h coeffs[h] * exp(+2*pi*i*h*m/M)``.

Under this convention Parseval's identity reads::

    (1/M) * sum_m |values[m]|**2 == sum_h |coeffs[h]|**2

Convolution scaling
-------------------
The periodic convolution ``(f*g)(x) = integral_0^L f(x-y) g(y) dy`` is
approximated on the grid by the rectangle rule
``dx * sum_k f[m-k] g[k]`` (exact trapezoid for periodic data). Circular
convolution of samples maps to a product of unnormalized DFTs, so with the
1/M convention the spectrum of the quadrature sum is
``dx * M * F[h] * G[h] = L * F[h] * G[h]``. The factor L is therefore forced
by the continuous definition of the convolution; it is unit-tested against a
direct O(M^2) quadrature oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, GridMismatchError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid with M points on a domain of length L.

    Attributes
    ----------
    M : int
        Number of grid points. Must be a power of 2 (transform requirement).
    L : float
        Domain length. Points sit at ``x_m = m * dx`` with ``dx = L / M``.
    """

    M: int
    L: float

    def __post_init__(self):
        if not _is_power_of_two(self.M):
            raise ConfigError(f"grid.M must be a power of 2, got {self.M}")
        if not (self.L > 0):
            raise ConfigError(f"grid.L must be positive, got {self.L}")

    def __eq__(self, other):
        return isinstance(other, Grid) and self.M == other.M and self.L == other.L

    def __hash__(self):
        return hash((self.M, self.L))

    @property
    def dx(self) -> float:
        return self.L / self.M

    @property
    def x(self) -> np.ndarray:
        """Sample coordinates ``m * dx`` for m = 0..M-1."""
        return np.arange(self.M) * self.dx

    @property
    def centered_x(self) -> np.ndarray:
        """Sample coordinates wrapped to [-L/2, L/2)."""
        return (self.x + self.L / 2) % self.L - self.L / 2

    @property
    def signed_modes(self) -> np.ndarray:
        """Signed integer wavenumbers: h for h < M/2, h - M for h > M/2.

        The Nyquist slot h = M/2 carries +M/2; first-derivative operators
        zero it separately (see :func:`spectral_derivative`).
        """
        modes = np.fft.fftfreq(self.M, d=1.0 / self.M)
        modes[self.M // 2] = self.M // 2
        return modes.astype(np.int64)

    @property
    def derivative_multiplier(self) -> np.ndarray:
        """Per-mode factor ``2*pi*i*h/L`` with the Nyquist mode zeroed.

        The unpaired Nyquist mode has no well-defined odd derivative on a
        real signal; zeroing it is the standard unbiased choice.
        """
        mult = 2j * np.pi * self.signed_modes / self.L
        mult[self.M // 2] = 0.0
        return mult

    @property
    def laplacian_multiplier(self) -> np.ndarray:
        """Per-mode factor ``-(2*pi*h/L)**2`` (Nyquist retained: the even
        derivative of the Nyquist mode is representable)."""
        return -((2 * np.pi * self.signed_modes / self.L) ** 2)


@dataclass
class Field:
    """Real samples of a periodic function on a :class:`Grid`.

    Treated as immutable once constructed; operations return new objects.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.M,):
            raise ValueError(
                f"field values must have shape ({self.grid.M},), got {self.values.shape}"
            )

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "Field":
        return cls(grid, np.full(grid.M, float(c)))


@dataclass
class SpectralField:
    """Fourier coefficients of a real field, full spectrum of length M.

    Real signals satisfy conjugate symmetry: ``coeffs[M-h] == conj(coeffs[h])``.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != (self.grid.M,):
            raise ValueError(
                f"spectral coefficients must have shape ({self.grid.M},), got {self.coeffs.shape}"
            )


def forward(f: Field) -> SpectralField:
    """Discrete Fourier transform with the 1/M normalization."""
    return SpectralField(f.grid, np.fft.fft(f.values) / f.grid.M)


def inverse(F: SpectralField) -> Field:
    """Inverse transform back to real samples.

    The imaginary residue of the reconstruction must be negligible (the
    input must come from a real signal); it is checked and discarded.
    """
    rec = np.fft.ifft(F.coeffs) * F.grid.M
    scale = max(1.0, float(np.abs(rec.real).max()))
    residue = float(np.abs(rec.imag).max())
    if residue > 1e-12 * scale:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds 1e-12 relative tolerance; "
            "input spectrum is not conjugate-symmetric"
        )
    return Field(F.grid, rec.real)


def spectral_derivative(F: SpectralField) -> SpectralField:
    """d/dx in Fourier space: multiply mode h by ``2*pi*i*h/L`` (signed h,
    Nyquist zeroed)."""
    return SpectralField(F.grid, F.coeffs * F.grid.derivative_multiplier)


def spectral_convolve(F: SpectralField, G: SpectralField) -> SpectralField:
    """Spectrum of the periodic convolution ``integral f(x-y) g(y) dy``.

    With the 1/M forward convention this is ``L * F[h] * G[h]`` (see module
    docstring for the derivation of the factor L).
    """
    if F.grid != G.grid:
        raise GridMismatchError(
            f"convolution operands live on different grids: "
            f"(M={F.grid.M}, L={F.grid.L}) vs (M={G.grid.M}, L={G.grid.L})"
        )
    return SpectralField(F.grid, F.grid.L * F.coeffs * G.coeffs)


def dealias_two_thirds(F: SpectralField) -> SpectralField:
    """Zero all modes with |h| > M/3 (the 2/3 truncation rule).

    Off by default everywhere; exposed for robustness studies of the
    quadratic advection term.
    """
    modes = np.abs(F.grid.signed_modes)
    coeffs = np.where(modes > F.grid.M / 3, 0.0, F.coeffs)
    return SpectralField(F.grid, coeffs)


# Half-spectrum helpers for batched interior loops. These mirror the public
# single-field operations exactly (same normalization, same Nyquist policy)
# on arrays of shape (..., M) <-> (..., M//2 + 1); equivalence is unit-tested.

def rfft_coeffs(values: np.ndarray, M: int) -> np.ndarray:
    return np.fft.rfft(values, axis=-1) / M


def irfft_values(coeffs: np.ndarray, M: int) -> np.ndarray:
    return np.fft.irfft(coeffs * M, n=M, axis=-1)


def half_derivative_multiplier(grid: Grid) -> np.ndarray:
    k = 2j * np.pi * np.arange(grid.M // 2 + 1) / grid.L
    k[-1] = 0.0
    return k


def half_laplacian_multiplier(grid: Grid) -> np.ndarray:
    k = 2 * np.pi * np.arange(grid.M // 2 + 1) / grid.L
    return -(k ** 2)
