"""Continuous wavelet transform with the analytic Morlet wavelet.

The transform is computed in the Fourier domain on a zero-padded copy of the
(demeaned) signal, over a dyadic scale grid. Cross-spectra between two
transforms and the separable time/scale smoothing operator used by the
coherence estimators live here too, so every consumer shares one set of
conventions (scale grid, cone of influence, smoothing spans).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.ndimage import gaussian_filter1d, uniform_filter1d

OMEGA0 = 6.0
DEFAULT_DJ = 1.0 / 12.0
SCALE_SMOOTH_OCTAVES = 0.6
_COI_EDGE_FLOOR = 1e-5


def morlet_fourier_factor(omega0: float = OMEGA0) -> float:
    """Conversion factor from Morlet scale to Fourier period.

    Parameters
    ----------
    omega0 : float
        Dimensionless center frequency of the wavelet.

    Returns
    -------
    float
        ``4 * pi / (omega0 + sqrt(2 + omega0**2))``; for omega0 = 6 this is
        about 1.033, so scale and Fourier period nearly coincide.
    """
    return 4.0 * np.pi / (omega0 + np.sqrt(2.0 + omega0**2))


@dataclass(frozen=True)
class ScaleGrid:
    """Dyadic scale grid ``s_j = s0 * 2**(j * dj)``, j = 0..num_scales-1."""

    s0: float
    dj: float
    num_scales: int
    scales: np.ndarray
    fourier_factor: float

    def __post_init__(self) -> None:
        scales = np.asarray(self.scales, dtype=float)
        scales.flags.writeable = False
        object.__setattr__(self, "scales", scales)

    def periods(self) -> np.ndarray:
        """Equivalent Fourier periods, ``fourier_factor * scales``."""
        return self.fourier_factor * self.scales

    def matches(self, other: "ScaleGrid") -> bool:
        return (
            self.num_scales == other.num_scales
            and np.allclose(self.scales, other.scales, rtol=0, atol=0)
        )


def make_scale_grid(
    n: int,
    dt: float,
    s0: float | None = None,
    dj: float = DEFAULT_DJ,
) -> ScaleGrid:
    """Build the default dyadic scale grid for a signal of length n.

    Parameters
    ----------
    n : int
        Signal length in samples, at least 8.
    dt : float
        Sampling step.
    s0 : float, optional
        Smallest scale; defaults to ``2 * dt``.
    dj : float, optional
        Scale resolution in octaves (default 1/12, twelve voices per octave).

    Returns
    -------
    ScaleGrid
        With ``num_scales = floor(log2(n * dt / s0) / dj) + 1`` scales, so the
        largest scale does not exceed the record length ``n * dt``.

    Raises
    ------
    ValueError
        If n < 8, or s0/dj are not positive, or s0 exceeds the record length.
    """
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    if not (np.isfinite(dt) and dt > 0):
        raise ValueError(f"dt must be positive, got {dt}")
    if s0 is None:
        s0 = 2.0 * dt
    if not (np.isfinite(s0) and s0 > 0):
        raise ValueError(f"s0 must be positive, got {s0}")
    if not (np.isfinite(dj) and dj > 0):
        raise ValueError(f"dj must be positive, got {dj}")
    span = n * dt / s0
    if span < 1.0:
        raise ValueError(f"smallest scale {s0} exceeds record length {n * dt}")
    num = int(np.floor(np.log2(span) / dj)) + 1
    j = np.arange(num)
    scales = s0 * 2.0 ** (j * dj)
    return ScaleGrid(
        s0=float(s0),
        dj=float(dj),
        num_scales=num,
        scales=scales,
        fourier_factor=morlet_fourier_factor(),
    )


@dataclass(frozen=True)
class WaveletField:
    """CWT coefficients of one series on a scale grid.

    Attributes
    ----------
    coeffs : ndarray, complex, shape (num_scales, n)
        Wavelet coefficients, one row per scale.
    grid : ScaleGrid
        The scale grid the rows correspond to.
    dt : float
        Sampling step of the underlying signal.
    coi : ndarray, float, shape (n,)
        Cone of influence: the largest trustworthy scale at each time. Values
        below a row's scale mark coefficients dominated by edge effects.
    """

    coeffs: np.ndarray
    grid: ScaleGrid
    dt: float
    coi: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        coi = np.asarray(self.coi, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[0] != self.grid.num_scales:
            raise ValueError(
                f"coeffs shape {coeffs.shape} does not match "
                f"{self.grid.num_scales} scales"
            )
        if coi.shape != (coeffs.shape[1],):
            raise ValueError("coi length must match the time axis")
        coeffs.flags.writeable = False
        coi.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "coi", coi)

    @property
    def n_times(self) -> int:
        return int(self.coeffs.shape[1])

    def outside_coi(self) -> np.ndarray:
        """Boolean (num_scales, n) mask, True where edge effects dominate."""
        return self.grid.scales[:, None] > self.coi[None, :]


def cwt_morlet(x: np.ndarray, dt: float, grid: ScaleGrid | None = None) -> WaveletField:
    """Continuous wavelet transform with the analytic Morlet wavelet.

    The signal is demeaned, zero-padded to the next power of two strictly
    above its length (so the circular FFT convolution never wraps real data
    into itself), transformed once with the FFT, and multiplied per scale by
    the L2-normalized positive-frequency Morlet window.

    Parameters
    ----------
    x : ndarray, shape (n,)
        Real signal, finite values, n >= 8.
    dt : float
        Sampling step.
    grid : ScaleGrid, optional
        Defaults to ``make_scale_grid(len(x), dt)``.

    Returns
    -------
    WaveletField

    Notes
    -----
    Linearity holds exactly up to rounding: the transform of ``a*x + b*y``
    equals ``a*W(x) + b*W(y)`` because demeaning, padding, and the FFT are all
    linear. A constant input transforms to the zero field.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be one-dimensional")
    n = x.size
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    if grid is None:
        grid = make_scale_grid(n, dt)

    npad = 2 ** int(np.ceil(np.log2(n)))
    if npad <= n:
        npad *= 2
    xpad = np.zeros(npad)
    xpad[:n] = x - x.mean()

    xhat = np.fft.fft(xpad)
    omega = 2.0 * np.pi * np.fft.fftfreq(npad, d=dt)

    scales = grid.scales
    # Positive-frequency Morlet window per scale, L2-normalized so that the
    # coefficient magnitude is comparable across scales.
    arg = scales[:, None] * omega[None, :]
    window = np.pi**-0.25 * np.exp(-0.5 * (arg - OMEGA0) ** 2)
    window *= (omega[None, :] > 0)
    norm = np.sqrt(2.0 * np.pi * scales / dt)
    wave = np.fft.ifft(xhat[None, :] * window * norm[:, None], axis=1)[:, :n]

    dist = np.minimum(np.arange(n), n - 1 - np.arange(n)).astype(float)
    coi = np.maximum(dist, _COI_EDGE_FLOOR) * dt / np.sqrt(2.0)
    return WaveletField(coeffs=wave, grid=grid, dt=dt, coi=coi)


@dataclass(frozen=True)
class CrossSpectrumField:
    """Cross-wavelet spectrum ``W_a * conj(W_b)``, optionally smoothed."""

    values: np.ndarray
    smoothed: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2:
            raise ValueError("cross-spectrum must be a (scales, times) matrix")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


def cross_spectrum(a: WaveletField, b: WaveletField) -> CrossSpectrumField:
    """Pointwise ``W_a * conj(W_b)`` for two fields on the same grid.

    Raises
    ------
    ValueError
        If the two fields differ in grid, length, or sampling step.
    """
    if not a.grid.matches(b.grid):
        raise ValueError("wavelet fields are on different scale grids")
    if a.n_times != b.n_times or a.dt != b.dt:
        raise ValueError("wavelet fields have different time axes")
    return CrossSpectrumField(values=a.coeffs * np.conj(b.coeffs), smoothed=False)


def smooth(field: CrossSpectrumField, grid: ScaleGrid, dt: float) -> CrossSpectrumField:
    """Separable smoothing: Gaussian in time per scale, boxcar across scales.

    The time kernel at scale s is a Gaussian with standard deviation ``s/dt``
    samples (the wavelet's own footprint), applied with reflected ends. The
    scale kernel is a centered boxcar spanning 0.6 octaves, i.e.
    ``round(0.6/dj)`` rows forced odd, with edge rows repeated.

    Both kernels are nonnegative and shared across series, so smoothing a
    matrix of cross-spectra cell by cell preserves positive semidefiniteness;
    coherencies computed from the output land in the unit disc up to rounding.

    Raises
    ------
    ValueError
        If the field was already smoothed (the operator is not idempotent).
    """
    if field.smoothed:
        raise ValueError("cross-spectrum is already smoothed")
    vals = field.values
    if vals.shape[0] != grid.num_scales:
        raise ValueError("field does not match the scale grid")
    out = np.empty_like(vals)
    sigmas = grid.scales / dt
    for j, s in enumerate(sigmas):
        re = gaussian_filter1d(vals[j].real, sigma=s, mode="reflect")
        im = gaussian_filter1d(vals[j].imag, sigma=s, mode="reflect")
        out[j] = re + 1j * im
    width = int(round(SCALE_SMOOTH_OCTAVES / grid.dj))
    if width % 2 == 0:
        width += 1
    if width > 1:
        re = uniform_filter1d(out.real, size=width, axis=0, mode="nearest")
        im = uniform_filter1d(out.imag, size=width, axis=0, mode="nearest")
        out = re + 1j * im
    return CrossSpectrumField(values=out, smoothed=True)


Smoother = Callable[[CrossSpectrumField], CrossSpectrumField]
