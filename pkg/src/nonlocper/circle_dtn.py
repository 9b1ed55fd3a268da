"""Half-Laplacian on the unit circle via three equivalent realizations:
the |k| Fourier multiplier, the Dirichlet-to-Neumann map of the harmonic
extension to the disk (Poisson-kernel quadrature), and a principal-value
integral against the chord-distance kernel; plus the closed-form
periodization identity and the three-way energy identity.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, StepSizeError
from .grids import PeriodicFunction, PeriodicGrid


def circle_grid(n: int) -> PeriodicGrid:
    """Uniform grid on the circle: theta_j = -pi + 2*pi*j/n."""
    return PeriodicGrid(math.pi, n)


def _require_circle(u: PeriodicFunction) -> None:
    if abs(u.grid.half_period - math.pi) > 1e-12:
        raise DomainError("circle functions need half period pi")


def dtn_multiplier(u: PeriodicFunction) -> PeriodicFunction:
    """|k| multiplier: the normal derivative of the harmonic extension."""
    _require_circle(u)
    k = np.abs(u.grid.wavenumbers).astype(float)
    return PeriodicFunction.from_coeffs(u.grid, u.coeffs() * k)


DEFAULT_DELTA_SEQ = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def poisson_extension(u: PeriodicFunction, radius: float,
                      quad_size: int | None = None) -> np.ndarray:
    """Harmonic extension sampled at radius*e^{i theta_j}, computed by
    trapezoid quadrature of the Poisson kernel (a circular convolution)."""
    _require_circle(u)
    if not 0 <= radius < 1:
        raise DomainError("extension radius must lie in [0, 1)")
    delta = 1.0 - radius
    if quad_size is None:
        # periodic trapezoid error ~ radius^M: need M*delta large
        quad_size = 1 << max(10, math.ceil(math.log2(40.0 / delta)))
    if quad_size > 1 << 22:
        raise StepSizeError("radius too close to 1 for stable quadrature")
    m = quad_size
    phi = -math.pi + 2.0 * math.pi * np.arange(m) / m
    uq = u.eval(phi)
    # P(r, t) = (1 - r^2) / (2 pi (1 - 2 r cos t + r^2)) at distances t
    pk = (1.0 - radius**2) / (2.0 * math.pi * (1.0 - 2.0 * radius * np.cos(phi)
                                               + radius**2))
    conv = np.real(np.fft.ifft(np.fft.fft(np.roll(pk, -(m // 2)))
                               * np.fft.fft(uq))) * (2.0 * math.pi / m)
    return conv[:: m // u.grid.size]


def dtn_poisson(u: PeriodicFunction,
                delta_seq: Sequence[float] = DEFAULT_DELTA_SEQ) -> PeriodicFunction:
    """Radial difference quotient (u(p) - u_D((1-delta)p))/delta of the
    Poisson-quadrature extension, Richardson-extrapolated to delta = 0."""
    _require_circle(u)
    deltas = np.array([float(d) for d in delta_seq])
    if deltas.size < 2 or np.any(np.diff(deltas) >= 0):
        raise DomainError("delta_seq must be strictly decreasing, length >= 2")
    if deltas[-1] < 1e-6:
        raise StepSizeError("delta below stable quadrature resolution")
    quots = np.array([(u.samples - poisson_extension(u, 1.0 - d)) / d
                      for d in deltas])
    # difference quotient is analytic in delta: fit and evaluate at 0
    coeffs = np.polynomial.polynomial.polyfit(deltas, quots, deltas.size - 1)
    return PeriodicFunction(u.grid, coeffs[0])


def half_lap_pv_circle(u: PeriodicFunction, x: float) -> float:
    """(1/pi) P.V. integral of (u(p) - u(q))/|p - q|^2 over the circle,
    folded to the regular second-difference form on (0, pi):

        (1/pi) int_0^pi (2u(x) - u(x+t) - u(x-t)) / (2 - 2cos t) dt.
    """
    _require_circle(u)
    ux = u.eval(x)

    def integrand(t: float) -> float:
        return (2.0 * ux - u.eval(x + t) - u.eval(x - t)) / (2.0 - 2.0 * math.cos(t))

    val, err = integrate.quad(integrand, 0.0, math.pi, limit=300,
                              epsabs=1e-12, epsrel=1e-10)
    return val / math.pi


def wrapped_identity_check(t: float, k_max: int = 100000) -> dict:
    """sum_k 1/(t + 2k pi)^2 against the closed form 1/(2 - 2cos t).

    Truncated sum over |k| <= k_max plus an Euler-Maclaurin tail; for the
    default k_max the tail contributes below 1e-16.
    """
    t = float(t)
    if abs(math.remainder(t, 2.0 * math.pi)) < 1e-12:
        raise DomainError("t must not be a multiple of 2*pi")
    ks = np.arange(-k_max, k_max + 1)
    lhs = float(np.sum((t + 2.0 * math.pi * ks) ** (-2.0)))
    for sign in (1.0, -1.0):
        a = 2.0 * math.pi * (k_max + 0.5) + sign * t
        # integral tail plus the first midpoint correction
        lhs += 1.0 / (2.0 * math.pi * a) + (2.0 * math.pi) * (-2.0) * a ** (-3.0) / 24.0
    rhs = 1.0 / (2.0 - 2.0 * math.cos(t))
    return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs)}


def energy_identity_check(u: PeriodicFunction, n_radial: int = 64) -> dict:
    """Three routes to the same quadratic energy:

    * E_line: Fourier side, pi sum |k| |u_k|^2;
    * E_disk: (1/2) int_D |grad u_D|^2 by Gauss-Legendre (radius) x
      trapezoid (angle) quadrature of the harmonic extension;
    * E_circle: (1/4 pi) double trapezoid of (u(x)-u(y))^2 / (2-2cos(x-y)),
      with the diagonal filled by its limit u'(x)^2.
    """
    _require_circle(u)
    grid = u.grid
    n = grid.size
    c = u.coeffs()
    k = grid.wavenumbers
    e_line = math.pi * float(np.sum(np.abs(k) * np.abs(c) ** 2))

    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    rr = 0.5 * (nodes + 1.0)  # map to (0, 1)
    ww = 0.5 * weights
    theta = grid.nodes
    absk = np.abs(k).astype(float)
    # u_D(r, theta) = sum_k u_k r^{|k|} e^{ik theta}
    e_disk = 0.0
    phase = np.exp(1j * np.outer(theta, k))
    for r, w in zip(rr, ww):
        radial = r ** np.maximum(absk - 1.0, 0.0)
        dr = np.real(phase @ (c * absk * radial))
        dtheta_over_r = np.real(phase @ (c * 1j * k * radial))
        e_disk += w * r * (2.0 * math.pi / n) * float(np.sum(dr**2 + dtheta_over_r**2))
    e_disk *= 0.5

    diff = u.samples[:, None] - u.samples[None, :]
    dist = theta[:, None] - theta[None, :]
    denom = 2.0 - 2.0 * np.cos(dist)
    np.fill_diagonal(denom, 1.0)
    integrand = diff**2 / denom
    np.fill_diagonal(integrand, u.derivative().samples ** 2)
    e_circle = (2.0 * math.pi / n) ** 2 * float(np.sum(integrand)) / (4.0 * math.pi)
    return {"E_line": e_line, "E_disk": e_disk, "E_circle": e_circle}
