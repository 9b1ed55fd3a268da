"""2L-periodic functions on uniform grids with a dual Fourier view.

Conventions: the grid covers one period [-L, L) with N (a power of two)
equispaced nodes.  Fourier coefficients follow the integral normalization
u_k = (1/2L) int u(x) exp(-i pi k x / L) dx, so a real function satisfies
u_{-k} = conj(u_k).  Coefficients are stored in numpy fft order; the
Nyquist coefficient is forced real and, for off-grid evaluation and
shifts, is treated as a pure cosine split evenly between +-N/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateFitError, DomainError, GridMismatchError

COEFF_NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class PeriodicGrid:
    half_period: float
    size: int

    def __post_init__(self):
        if self.half_period <= 0:
            raise DomainError("half_period must be positive")
        n = self.size
        if n < 8 or (n & (n - 1)) != 0:
            raise DomainError("size must be a power of two, at least 8")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_period / self.size

    @property
    def nodes(self) -> np.ndarray:
        L, n = self.half_period, self.size
        return -L + 2.0 * L * np.arange(n) / n

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer mode numbers in fft order."""
        n = self.size
        return np.fft.fftfreq(n, d=1.0 / n).astype(int)

    def frequencies(self) -> np.ndarray:
        """Physical frequencies pi*k/L for k = 0..N/2."""
        return np.pi * np.arange(self.size // 2 + 1) / self.half_period


def _coeffs_from_samples(grid: PeriodicGrid, samples: np.ndarray) -> np.ndarray:
    # nodes start at -L: the DFT picks up a (-1)^k phase per mode.
    k = grid.wavenumbers
    c = np.fft.fft(samples) / grid.size * np.power(-1.0, k)
    half = grid.size // 2
    c[half] = c[half].real + 0.0j
    return c


def _samples_from_coeffs(grid: PeriodicGrid, coeffs: np.ndarray) -> np.ndarray:
    k = grid.wavenumbers
    return np.real(np.fft.ifft(coeffs * np.power(-1.0, k) * grid.size))


@dataclass(frozen=True)
class PeriodicFunction:
    grid: PeriodicGrid
    samples: np.ndarray
    _coeffs: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.size,):
            raise GridMismatchError("samples must match the grid size")
        object.__setattr__(self, "samples", s)
        s.setflags(write=False)

    @classmethod
    def from_callable(cls, grid: PeriodicGrid, f: Callable[[np.ndarray], np.ndarray]) -> "PeriodicFunction":
        return cls(grid, np.asarray(f(grid.nodes), dtype=float))

    @classmethod
    def from_coeffs(cls, grid: PeriodicGrid, coeffs: np.ndarray) -> "PeriodicFunction":
        coeffs = np.asarray(coeffs, dtype=complex)
        samples = _samples_from_coeffs(grid, coeffs)
        return cls(grid, samples, _coeffs=coeffs)

    def coeffs(self) -> np.ndarray:
        """Fourier coefficients in fft order (lazy, cached)."""
        if self._coeffs is None:
            object.__setattr__(self, "_coeffs", _coeffs_from_samples(self.grid, self.samples))
        return self._coeffs

    def coeff(self, k: int) -> complex:
        n = self.grid.size
        if not -n // 2 <= k <= n // 2:
            raise DomainError(f"mode {k} outside resolved band")
        if abs(k) == n // 2:
            return complex(self.coeffs()[n // 2])
        return complex(self.coeffs()[k % n])

    def eval(self, x) -> np.ndarray | float:
        """Band-limited (trigonometric) interpolation at arbitrary points."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xs = np.atleast_1d(x)
        L, n = self.grid.half_period, self.grid.size
        c = self.coeffs()
        k = self.grid.wavenumbers
        phases = np.exp(1j * np.pi * np.outer(xs, k) / L)
        # taking the real part renders the one-sided Nyquist mode as a cosine
        out = np.real(phases @ c)
        return float(out[0]) if scalar else out

    def shift(self, z: float) -> "PeriodicFunction":
        """Spectral translation: result(x) = self(x - z)."""
        L, n = self.grid.half_period, self.grid.size
        k = self.grid.wavenumbers
        c = self.coeffs() * np.exp(-1j * np.pi * k * z / L)
        half = n // 2
        # cos(pi*half*(x-z)/L) sampled at grid nodes keeps only its cosine part
        c[half] = self.coeffs()[half].real * np.cos(np.pi * half * z / L)
        return PeriodicFunction.from_coeffs(self.grid, c)

    def derivative(self, order: int = 1) -> "PeriodicFunction":
        L = self.grid.half_period
        k = self.grid.wavenumbers.astype(float)
        c = self.coeffs() * (1j * np.pi * k / L) ** order
        half = self.grid.size // 2
        if order % 2 == 1:
            c[half] = 0.0  # odd derivative of the Nyquist cosine vanishes at nodes
        return PeriodicFunction.from_coeffs(self.grid, c)

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def l2_norm(self) -> float:
        """L2 norm over one period, trapezoid rule."""
        return float(np.sqrt(self.grid.spacing * np.sum(self.samples**2)))

    def __add__(self, other):
        if isinstance(other, PeriodicFunction):
            _require_same_grid(self, other)
            return PeriodicFunction(self.grid, self.samples + other.samples)
        return PeriodicFunction(self.grid, self.samples + other)

    def __sub__(self, other):
        if isinstance(other, PeriodicFunction):
            _require_same_grid(self, other)
            return PeriodicFunction(self.grid, self.samples - other.samples)
        return PeriodicFunction(self.grid, self.samples - other)

    def __mul__(self, scalar: float):
        return PeriodicFunction(self.grid, self.samples * scalar)

    __rmul__ = __mul__


def _require_same_grid(u: PeriodicFunction, v: PeriodicFunction) -> None:
    if u.grid != v.grid:
        raise GridMismatchError("functions live on different grids")


def to_coeff_table(u: PeriodicFunction) -> np.ndarray:
    """Rows (k, Re u_k, Im u_k) for |k| <= N/2."""
    n = u.grid.size
    c = u.coeffs()
    ks = np.arange(-n // 2, n // 2 + 1)
    rows = []
    for k in ks:
        ck = c[n // 2].real if abs(k) == n // 2 else c[k % n]
        rows.append((k, np.real(ck), np.imag(ck)))
    return np.array(rows)


def decay_exponent(u: PeriodicFunction, k_range: Sequence[int] | None = None,
                   noise_floor: float = COEFF_NOISE_FLOOR) -> float:
    """Least-squares decay rate of |u_k| ~ k^(-r) over k_range.

    A smoothness diagnostic: returns the fitted r, using only modes whose
    magnitude sits above the double-precision noise floor.
    """
    n = u.grid.size
    if k_range is None:
        k_range = (2, n // 2)
    lo, hi = k_range
    lo = max(lo, 2)
    hi = min(hi, n // 2)
    c = u.coeffs()
    ks = np.arange(lo, hi + 1)
    mags = np.array([abs(c[n // 2].real) if k == n // 2 else abs(c[k]) for k in ks])
    keep = mags > noise_floor
    if np.count_nonzero(keep) < 8:
        raise DegenerateFitError(
            f"only {np.count_nonzero(keep)} modes above noise floor in [{lo}, {hi}]")
    slope = np.polyfit(np.log(ks[keep]), np.log(mags[keep]), 1)[0]
    return float(-slope)


def parseval_gap(u: PeriodicFunction) -> float:
    """Relative gap between (1/N) sum u_j^2 and sum |u_k|^2."""
    lhs = np.mean(u.samples**2)
    rhs = np.sum(np.abs(u.coeffs()) ** 2)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale
