"""Uniform periodic grid with Fourier pseudospectral calculus.

All fields in the package are arrays of samples on such a grid and are
interpreted through their trigonometric interpolant.  Differentiation,
integration, filtering and off-grid evaluation are therefore spectral:
exact for band-limited data, spectrally accurate for smooth data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TAU = 2.0 * np.pi

# Cutoff fraction used for the standard 2/3-rule dealiasing of products.
DEALIAS_FRACTION = 2.0 / 3.0


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """n equispaced samples of the circle of circumference `length`.

    Points are x_j = j * length / n for j = 0 .. n-1; x = 0 is the
    reference point used by pinned phase gauges.
    """

    n: int
    length: float = TAU

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 8 or not _is_power_of_two(int(self.n)):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n!r}")
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise ValueError(f"grid length must be positive and finite, got {self.length!r}")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @cached_property
    def points(self) -> np.ndarray:
        x = np.arange(self.n) * (self.length / self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers 2*pi*m/length in FFT ordering."""
        k = TAU * np.fft.fftfreq(self.n, d=self.spacing)
        k.setflags(write=False)
        return k

    @cached_property
    def mode_numbers(self) -> np.ndarray:
        """Integer mode indices m in FFT ordering (Nyquist is -n/2)."""
        m = np.rint(np.fft.fftfreq(self.n) * self.n).astype(int)
        m.setflags(write=False)
        return m

    @cached_property
    def derivative_symbol(self) -> np.ndarray:
        """i*k with the (sign-ambiguous) Nyquist mode zeroed."""
        ik = 1j * self.wavenumbers.copy()
        ik[self.n // 2] = 0.0
        ik.setflags(write=False)
        return ik

    @cached_property
    def laplacian_symbol(self) -> np.ndarray:
        sym = -self.wavenumbers ** 2
        sym.setflags(write=False)
        return sym

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        mask = self._keep_mask(DEALIAS_FRACTION)
        mask.setflags(write=False)
        return mask

    def _keep_mask(self, cutoff_fraction: float) -> np.ndarray:
        threshold = cutoff_fraction * (self.n / 2)
        return (np.abs(self.mode_numbers) <= threshold + 1e-9).astype(float)

    # -- validation ---------------------------------------------------------

    def check_values(self, values) -> np.ndarray:
        v = np.asarray(values)
        if v.shape != (self.n,):
            raise ValueError(f"expected {self.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        return v

    # -- calculus -----------------------------------------------------------

    def derivative(self, values) -> np.ndarray:
        """Spectral first derivative; preserves real/complex kind."""
        v = self.check_values(values)
        out = np.fft.ifft(self.derivative_symbol * np.fft.fft(v))
        return out if np.iscomplexobj(v) else out.real

    def laplacian(self, values) -> np.ndarray:
        v = self.check_values(values)
        out = np.fft.ifft(self.laplacian_symbol * np.fft.fft(v))
        return out if np.iscomplexobj(v) else out.real

    def integrate(self, values):
        """Quadrature over one period (rectangle rule, spectrally exact)."""
        v = self.check_values(values)
        total = self.spacing * v.sum()
        return total if np.iscomplexobj(v) else float(total)

    def antiderivative(self, values) -> np.ndarray:
        """Periodic antiderivative of the zero-mean part, itself zero-mean.

        The k = 0 and Nyquist coefficients of the result are set to zero,
        so this inverts `derivative` on band-limited zero-mean fields.
        """
        v = self.check_values(values)
        coef = np.fft.fft(v)
        out = np.zeros_like(coef)
        sym = self.derivative_symbol
        nonzero = sym != 0.0
        out[nonzero] = coef[nonzero] / sym[nonzero]
        res = np.fft.ifft(out)
        return res if np.iscomplexobj(v) else res.real

    def low_pass(self, values, cutoff_fraction: float) -> np.ndarray:
        """Zero all Fourier modes with |m| above cutoff_fraction * (n/2)."""
        if not (0.0 < cutoff_fraction <= 1.0):
            raise ValueError(f"cutoff fraction must lie in (0, 1], got {cutoff_fraction!r}")
        v = self.check_values(values)
        out = np.fft.ifft(self._keep_mask(cutoff_fraction) * np.fft.fft(v))
        return out if np.iscomplexobj(v) else out.real

    def dealias(self, values) -> np.ndarray:
        """2/3-rule low pass, applied to pointwise products before use."""
        v = self.check_values(values)
        out = np.fft.ifft(self.dealias_mask * np.fft.fft(v))
        return out if np.iscomplexobj(v) else out.real

    # -- off-grid evaluation ------------------------------------------------

    def sample_all(self, stack, points) -> np.ndarray:
        """Evaluate the trig interpolants of several fields at arbitrary points.

        `stack` has shape (m, n); the result has shape (m, len(points)).
        The Nyquist mode is evaluated as a cosine, matching the symmetric
        interpolant of real data.
        """
        arr = np.atleast_2d(np.asarray(stack))
        if arr.shape[1] != self.n:
            raise ValueError(f"expected fields of length {self.n}, got {arr.shape}")
        p = np.atleast_1d(np.asarray(points, dtype=float))
        coef = np.fft.fft(arr, axis=1) / self.n
        scale = TAU / self.length
        phase = np.exp(1j * scale * np.outer(p, self.mode_numbers))
        ny = self.n // 2
        phase[:, ny] = np.cos(scale * (self.n / 2) * p)
        out = coef @ phase.T
        return out if np.iscomplexobj(arr) else out.real

    def sample(self, values, points) -> np.ndarray:
        return self.sample_all(self.check_values(values)[None, :], points)[0]

    # -- refinement ---------------------------------------------------------

    def refined(self, factor: int) -> "Grid":
        return Grid(self.n * int(factor), self.length)

    def upsample(self, values, factor: int) -> np.ndarray:
        """Resample onto the `factor` times finer grid by Fourier zero padding."""
        factor = int(factor)
        if factor < 1 or not _is_power_of_two(factor):
            raise ValueError(f"refinement factor must be a power of two >= 1, got {factor!r}")
        v = self.check_values(values)
        if factor == 1:
            return v.copy()
        big = self.n * factor
        coef = np.fft.fft(v)
        out = np.zeros(big, dtype=complex)
        half = self.n // 2
        out[:half] = coef[:half]
        out[half] = 0.5 * coef[half]
        out[big - half] = 0.5 * coef[half]
        out[big - half + 1:] = coef[half + 1:]
        res = np.fft.ifft(out) * factor
        return res if np.iscomplexobj(v) else res.real
