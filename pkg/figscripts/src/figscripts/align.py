"""Circular alignment and relative L2 difference of periodic profiles.

This mirrors the solver-side diagnostic step for step so the number printed
in overlay legends matches the solver's own comparison to near machine
precision: integer-cell argmax of the FFT cross-correlation, then a
bracketed root of the correlation derivative (half-spectrum weighted so it
equals the full-spectrum derivative). Keep the two implementations in sync.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


def profile_shift(values_a, values_b, L: float) -> float:
    """Shift s maximizing correlation of a(x - s) with b (joint over rows)."""
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


def shift_profile(values, shift: float, L: float) -> np.ndarray:
    """Band-limited evaluation of the profile at x - shift."""
    arr = np.atleast_2d(np.asarray(values, dtype=np.float64))
    M = arr.shape[1]
    k = 2 * np.pi * np.fft.rfftfreq(M, d=L / M)
    out = np.fft.irfft(np.fft.rfft(arr, axis=1) * np.exp(-1j * k * shift), n=M, axis=1)
    return out.reshape(np.asarray(values).shape)


def profile_difference(values_a, values_b) -> float:
    """Relative L2 difference ||a - b|| / ||b|| (no alignment)."""
    a = np.asarray(values_a, dtype=np.float64)
    b = np.asarray(values_b, dtype=np.float64)
    denom = float(np.sqrt((b * b).sum()))
    if denom == 0:
        raise ValueError("reference profile is identically zero")
    return float(np.sqrt(((a - b) ** 2).sum())) / denom


def aligned_profile_difference(values_a, values_b, L: float):
    """(relative L2 difference, shift) after circular alignment of a onto b."""
    shift = profile_shift(values_a, values_b, L)
    return profile_difference(shift_profile(values_a, shift, L), values_b), shift
