"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's FFT-based code paths:
transforms are checked against O(M^2) definition sums, convolutions against
periodic quadrature, derivatives against finite differences on analytically
sampled refinements, and the time integrator against a tight-tolerance
adaptive reference.
"""

import numpy as np
import pytest

import aggdiff as ad


# --- brute-force spectral oracles -----------------------------------------

def dft_direct(values):
    """Definition sum with the 1/M normalization."""
    M = len(values)
    h = np.arange(M)
    phase = np.exp(-2j * np.pi * np.outer(h, h) / M)
    return phase @ np.asarray(values, dtype=complex) / M


def idft_direct(coeffs):
    """Definition inverse sum (no normalization)."""
    M = len(coeffs)
    h = np.arange(M)
    phase = np.exp(2j * np.pi * np.outer(h, h) / M)
    return phase @ np.asarray(coeffs, dtype=complex)


def convolve_quadrature(f, g, dx):
    """Periodic rectangle-rule quadrature of int f(x - y) g(y) dy, O(M^2)."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    M = len(f)
    out = np.empty(M)
    for m in range(M):
        out[m] = dx * sum(f[(m - k) % M] * g[k] for k in range(M))
    return out


# --- finite-difference oracles ---------------------------------------------

def fd4_first(values, h):
    """4th-order centered first derivative on a periodic grid."""
    v = np.asarray(values, dtype=float)
    return (-np.roll(v, -2, -1) + 8 * np.roll(v, -1, -1)
            - 8 * np.roll(v, 1, -1) + np.roll(v, 2, -1)) / (12 * h)


def fd4_second(values, h):
    """4th-order centered second derivative on a periodic grid."""
    v = np.asarray(values, dtype=float)
    return (-np.roll(v, -2, -1) + 16 * np.roll(v, -1, -1) - 30 * v
            + 16 * np.roll(v, 1, -1) - np.roll(v, 2, -1)) / (12 * h * h)


# --- random band-limited analytic test functions ---------------------------

class TrigPolynomial:
    """Random real trigonometric polynomial, exactly sampleable anywhere."""

    def __init__(self, rng, max_mode, L=1.0, mean=0.0, amplitude=1.0):
        self.L = L
        self.mean = mean
        self.max_mode = max_mode
        self.cos = amplitude * rng.uniform(-1, 1, max_mode)
        self.sin = amplitude * rng.uniform(-1, 1, max_mode)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, float(self.mean))
        for k in range(1, self.max_mode + 1):
            arg = 2 * np.pi * k * x / self.L
            out += self.cos[k - 1] * np.cos(arg) + self.sin[k - 1] * np.sin(arg)
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for k in range(1, self.max_mode + 1):
            w = 2 * np.pi * k / self.L
            arg = w * x
            out += -self.cos[k - 1] * w * np.sin(arg) + self.sin[k - 1] * w * np.cos(arg)
        return out


# --- reference integrator (adaptive, tight tolerance; tests only) ----------

def reference_integrate(state, params, t_final, rtol=1e-12, atol=1e-14):
    from scipy.integrate import solve_ivp

    shape = state.u.shape

    def rhs_flat(_t, y):
        return ad.rhs(ad.State(state.grid, y.reshape(shape), 0.0), params).ravel()

    sol = solve_ivp(rhs_flat, (0.0, t_final), state.u.ravel(),
                    method="DOP853", rtol=rtol, atol=atol)
    assert sol.success, sol.message
    return sol.y[:, -1].reshape(shape)


# --- common setups ----------------------------------------------------------

@pytest.fixture
def grid128():
    return ad.Grid(128, 1.0)


@pytest.fixture
def fig1_params(grid128):
    """Two mutually avoiding species, smooth kernel at sigma = 0.1."""
    kernel = ad.von_mises(grid128, 3.225)
    return ad.ModelParams(D=[1.0, 1.0], H=[[0.0, -2.0], [-2.0, 0.0]], kernel=kernel)


def fig1_like_params(grid, a=3.225):
    kernel = ad.von_mises(grid, a)
    return ad.ModelParams(D=[1.0, 1.0], H=[[0.0, -2.0], [-2.0, 0.0]], kernel=kernel)


def seeded_state(grid, seed=42, amplitude=0.01, max_mode=8, means=(1.0, 1.0)):
    return ad.perturbed_homogeneous(grid, list(means), amplitude, max_mode, seed)
