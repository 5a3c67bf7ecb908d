"""Deterministic initial-condition generation.

The standard initial condition is a homogeneous state plus band-limited
trigonometric noise::

    u_i(x) = p_i/L + amplitude * sum_{k=1}^{max_mode} (a_k cos(2 pi k x / L)
                                                     + b_k sin(2 pi k x / L))

with a_k, b_k drawn uniformly from [-1, 1] by a seeded generator (one draw
of shape (N, max_mode, 2), cos coefficient first). The perturbation is an
exact zero-mean trigonometric polynomial on the grid, so the mass is exact
by construction.

If the draw dips to zero or below, positivity is restored by the minimal
upward shift (floor 1e-6 of the mean) followed by a whole-field rescale
back to the exact mass; algebraically this contracts the deviation from the
mean by ``mean / (mean + shift)`` and preserves smoothness. When the shift
alone would have changed the mass by more than 1%, the requested amplitude
is rejected as a configuration error.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .model import State
from .spectral import Grid

POSITIVITY_FLOOR = 1e-6   # post-repair minimum, as a fraction of the mean
MAX_MASS_SHIFT = 0.01     # largest tolerated pre-rescale mass change


def perturbed_homogeneous(grid: Grid, means, amplitude: float, max_mode: int,
                          seed: int) -> State:
    """Seeded perturbation of the homogeneous state; see module docstring."""
    means = np.atleast_1d(np.asarray(means, dtype=np.float64))
    if np.any(means <= 0):
        raise ConfigError(f"initial_condition.means must be positive, got {means}")
    if max_mode < 0 or max_mode >= grid.M // 2:
        raise ConfigError(
            f"initial_condition.max_mode must lie in [0, {grid.M // 2 - 1}], got {max_mode}"
        )
    if amplitude < 0:
        raise ConfigError(f"initial_condition.amplitude must be >= 0, got {amplitude}")

    n_species = means.shape[0]
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(n_species, max_mode, 2))

    x = grid.x
    u = np.tile(means[:, None], (1, grid.M))
    if amplitude > 0 and max_mode > 0:
        modes = np.arange(1, max_mode + 1)
        phases = 2 * np.pi * modes[:, None] * x[None, :] / grid.L
        basis_cos = np.cos(phases)
        basis_sin = np.sin(phases)
        for i in range(n_species):
            pert = coeffs[i, :, 0] @ basis_cos + coeffs[i, :, 1] @ basis_sin
            u[i] += amplitude * pert

    for i in range(n_species):
        low = float(u[i].min())
        if low <= 0:
            mean = means[i]
            shift = POSITIVITY_FLOOR * mean - low
            if shift / mean > MAX_MASS_SHIFT:
                raise ConfigError(
                    f"initial_condition.amplitude {amplitude:g} too large for species "
                    f"{i}: restoring positivity would move its mass by "
                    f"{shift / mean:.1%} (limit {MAX_MASS_SHIFT:.0%})"
                )
            # shift up then rescale to exact mass = contract the deviation
            u[i] = mean + (mean / (mean + shift)) * (u[i] - mean)
    return State(grid, u, 0.0)
