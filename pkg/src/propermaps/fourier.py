"""Spectral helpers for 2pi-periodic samples on uniform grids."""

import numpy as np


def fourier_modes(n):
    """Integer mode numbers in FFT order (Nyquist negative for even n)."""
    return np.fft.fftfreq(n, d=1.0 / n)


def trig_interp(samples, t):
    """Evaluate the trigonometric interpolant of uniform samples at t.

    samples are values at t_m = 2*pi*m/N.  t may be a scalar or array.
    Works for complex samples; spectrally accurate for analytic data.
    """
    samples = np.asarray(samples)
    n = samples.shape[-1]
    coeff = np.fft.fft(samples, axis=-1) / n
    k = fourier_modes(n)
    t = np.asarray(t, dtype=float)
    basis = np.exp(1j * np.multiply.outer(k, t))
    return np.tensordot(coeff, basis, axes=([-1], [0]))


def spectral_derivative(samples, order=1):
    """d/dt of the trigonometric interpolant, sampled on the same grid."""
    samples = np.asarray(samples)
    n = samples.shape[-1]
    k = fourier_modes(n)
    ik = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        ik[n // 2] = 0.0  # unmatched Nyquist mode
    return np.fft.ifft(np.fft.fft(samples, axis=-1) * ik, axis=-1)


def periodic_mean(samples):
    """Trapezoid average over one period (exact zeroth Fourier mode)."""
    return np.mean(samples, axis=-1)
