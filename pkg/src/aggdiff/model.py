"""N-species nonlocal aggregation-diffusion model and its semi-discrete RHS.

The system on the periodic domain [0, L), for i = 1..N::

    du_i/dt = D_i * d2u_i/dx2 - d/dx[ u_i * d/dx( sum_j h_ij * (K * u_j) ) ]

with a shared averaging kernel K. The tendency is evaluated in the standard
pseudo-spectral order: (1) the nonlocal averages K*u_j by spectral
convolution, (2) the advective potential gradient v_i = d/dx(sum_j h_ij
K*u_j) in frequency space, (3) the flux w_i = u_i * v_i pointwise in
physical space, (4) d/dx(w_i) back in frequency space, (5) the diffusion
term in frequency space. No dealiasing is applied to the quadratic product
by default; pass ``dealias=True`` for the 2/3-rule variant.

Every mode of the advective term carries a factor (2*pi*i*h/L), so its mean
(mode 0) vanishes identically: the discrete RHS conserves mass to roundoff,
mirroring the continuous conservation law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, IntegrationError
from .kernels import Kernel
from .spectral import (
    Field,
    Grid,
    forward,
    half_derivative_multiplier,
    half_laplacian_multiplier,
    inverse,
    irfft_values,
    rfft_coeffs,
    spectral_convolve,
)


@dataclass(frozen=True)
class ModelParams:
    """Model constants: diffusion, interaction matrix, shared kernel.

    ``H[i, j] > 0`` attracts species i toward species j, ``< 0`` repels.
    No symmetry is required. All D_i must be positive; N >= 1.
    """

    D: np.ndarray
    H: np.ndarray
    kernel: Kernel

    def __post_init__(self):
        object.__setattr__(self, "D", np.atleast_1d(np.asarray(self.D, dtype=np.float64)))
        object.__setattr__(self, "H", np.atleast_2d(np.asarray(self.H, dtype=np.float64)))
        n = self.D.shape[0]
        if n < 1:
            raise ValueError("at least one species is required")
        if self.H.shape != (n, n):
            raise ValueError(f"H must be {n}x{n} to match D, got {self.H.shape}")
        if not np.all(self.D > 0):
            raise ValueError(f"all diffusion constants must be positive, got {self.D}")
        if not np.all(np.isfinite(self.H)):
            raise ValueError("interaction matrix contains non-finite entries")

    @property
    def N(self) -> int:
        return self.D.shape[0]

    @property
    def grid(self) -> Grid:
        return self.kernel.grid

    @property
    def L(self) -> float:
        return self.kernel.grid.L


@dataclass
class State:
    """Densities of all species on the grid at one time instant.

    Masses at construction are recorded for conservation checks.
    """

    grid: Grid
    u: np.ndarray
    t: float = 0.0
    initial_masses: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.u = np.atleast_2d(np.asarray(self.u, dtype=np.float64))
        if self.u.ndim != 2 or self.u.shape[1] != self.grid.M:
            raise ValueError(
                f"state must be (N, {self.grid.M}), got {self.u.shape}"
            )
        if self.initial_masses is None:
            self.initial_masses = total_mass(self)

    @property
    def N(self) -> int:
        return self.u.shape[0]


def total_mass(state: State) -> np.ndarray:
    """Per-species mass by trapezoid quadrature (= dx * sum on the periodic
    grid)."""
    return state.grid.dx * state.u.sum(axis=1)


def nonlocal_average(u_j: Field, kernel: Kernel) -> Field:
    """The smoothed density K * u_j via spectral convolution."""
    if u_j.grid != kernel.grid:
        raise GridMismatchError("field and kernel grids differ")
    return inverse(spectral_convolve(kernel.spectrum, forward(u_j)))


class SpectralOperator:
    """Precomputed half-spectrum machinery for one (grid, params) pair.

    Holds the derivative/Laplacian multipliers and the kernel spectrum in
    rfft layout; used by :func:`rhs` and by the time integrator. All methods
    are pure functions of their inputs (shape (N, M) or (N, M//2+1)).

    The hot path works on raw (unnormalized) rfft spectra: the forward 1/M
    and inverse M factors are a fixed diagonal scaling that commutes with
    every linear multiplier here, and the single pointwise product picks up
    exactly one of each, so they cancel along the pipeline. The public
    ``*_hat`` methods keep the documented 1/M normalization.
    """

    def __init__(self, params: ModelParams):
        grid = params.grid
        self.params = params
        self.grid = grid
        self.M = grid.M
        self.ik = half_derivative_multiplier(grid)[None, :]
        self.lap = half_laplacian_multiplier(grid)[None, :]
        self.diffusion = params.D[:, None] * self.lap
        # L * K_hat: the spectral-convolution factor folded into the kernel
        kernel_half = rfft_coeffs(params.kernel.samples.values, grid.M)
        self.kernel_L = (grid.L * kernel_half)[None, :]
        self.H = params.H
        # fused multipliers for the advective pipeline
        self._ik_kernel_L = self.ik * self.kernel_L
        self._neg_ik = -self.ik
        if grid.M >= 3:
            modes = np.arange(grid.M // 2 + 1)
            self._dealias_mask = (modes <= grid.M / 3)[None, :]
        else:
            self._dealias_mask = np.ones((1, grid.M // 2 + 1), dtype=bool)

    def to_spectral(self, u: np.ndarray) -> np.ndarray:
        return rfft_coeffs(u, self.M)

    def to_physical(self, u_hat: np.ndarray) -> np.ndarray:
        return irfft_values(u_hat, self.M)

    def advection_raw(self, u_raw: np.ndarray, dealias: bool = False) -> np.ndarray:
        """Advective tendency on raw rfft spectra (scaling-free pipeline)."""
        v_raw = self.H @ (self._ik_kernel_L * u_raw)
        n = u_raw.shape[0]
        both = np.fft.irfft(np.concatenate([u_raw, v_raw]), n=self.M, axis=-1)
        w_raw = np.fft.rfft(both[:n] * both[n:], axis=-1)
        if dealias:
            w_raw = np.where(self._dealias_mask, w_raw, 0.0)
        return self._neg_ik * w_raw

    def advection_hat(self, u_hat: np.ndarray, dealias: bool = False) -> np.ndarray:
        """Spectrum of -d/dx[ u_i * d/dx(sum_j h_ij K*u_j) ] (1/M scale)."""
        return self.advection_raw(u_hat * self.M, dealias) / self.M

    def rhs_hat(self, u_hat: np.ndarray, dealias: bool = False) -> np.ndarray:
        return self.diffusion * u_hat + self.advection_hat(u_hat, dealias)


def rhs(state: State, params: ModelParams, dealias: bool = False) -> np.ndarray:
    """Full tendency du/dt in physical space, shape (N, M).

    Raises IntegrationError (carrying the state time) on non-finite input.
    """
    if state.grid != params.grid:
        raise GridMismatchError("state and model grids differ")
    if state.N != params.N:
        raise ValueError(f"state has {state.N} species, params expect {params.N}")
    if not np.all(np.isfinite(state.u)):
        raise IntegrationError("non-finite values in state", state.t)
    op = SpectralOperator(params)
    return op.to_physical(op.rhs_hat(op.to_spectral(state.u), dealias))
