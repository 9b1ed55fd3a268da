"""Projected-gradient minimization of the periodic Lagrangian under an
integral constraint, Lagrange-multiplier recovery, post-hoc symmetry and
monotonicity diagnostics, and the maximum-principle probe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .errors import (DivergenceError, DomainError, HypothesisViolationError,
                     ProjectionError)
from .grids import PeriodicFunction
from .kernels import Kernel, WrappedKernel
from .operator import SymbolTable, apply_pv, apply_spectral
from .energy import Nonlinearity, constraint_value, energy, potential_integral


@dataclass(frozen=True)
class MinimizeConfig:
    sym: SymbolTable
    nl: Nonlinearity
    initial: PeriodicFunction
    c: float | None = None  # constraint level; None = unconstrained
    grad_tol: float = 1e-8
    max_iters: int = 50000
    armijo_c1: float = 1e-4
    armijo_shrink: float = 0.5
    step0: float = 1.0

    def __post_init__(self):
        if self.grad_tol <= 0:
            raise DomainError("grad_tol must be positive")
        if self.c is not None and not self.nl.has_constraint():
            raise DomainError("constraint level given but nonlinearity has no Gtilde")


def project_constraint(u: PeriodicFunction, nl: Nonlinearity, c: float) -> PeriodicFunction:
    """Scale u so that int Gtilde(sigma u) = c, with defect < 1e-12.

    Homogeneous constraints are solved in closed form; otherwise a
    safeguarded bracketed root find on sigma (the shipped Gtilde families
    are monotone in sigma > 0).
    """
    base = potential_integral(u, nl.Gt)
    if nl.homogeneity is not None:
        if base <= 0 or c <= 0:
            raise ProjectionError(
                f"constraint level {c:g} unreachable from int Gtilde(u) = {base:g}")
        return (c / base) ** (1.0 / nl.homogeneity) * u

    def defect(sigma: float) -> float:
        return potential_integral(sigma * u, nl.Gt) - c

    lo, hi = 1e-8, 1.0
    grow = 0
    while defect(hi) < 0 and grow < 200:
        hi *= 2.0
        grow += 1
    if defect(lo) > 0 or defect(hi) < 0:
        raise ProjectionError("could not bracket the constraint level")
    sigma = optimize.brentq(defect, lo, hi, xtol=1e-15, rtol=8.9e-16)
    out = sigma * u
    if abs(potential_integral(out, nl.Gt) - c) > 1e-12 * max(1.0, abs(c)):
        raise ProjectionError("projection defect above tolerance")
    return out


@dataclass(frozen=True)
class SymmetryDiagnostics:
    center: float
    evenness_defect: float
    monotonicity_defect: float
    critical_points: int
    degenerate: bool  # constant input: center/counts meaningless

    def to_dict(self) -> dict:
        return {"center": self.center, "evenness_defect": self.evenness_defect,
                "monotonicity_defect": self.monotonicity_defect,
                "critical_points": self.critical_points,
                "degenerate": self.degenerate}


def symmetry_diagnostics(u: PeriodicFunction, refine: int = 8) -> SymmetryDiagnostics:
    """Locate the center (sub-grid argmax), then measure evenness and
    monotone-decay defects of the centered profile and count its critical
    points on [0, L] (the two endpoints always count)."""
    L = u.grid.half_period
    n = u.grid.size
    scale = float(np.max(np.abs(u.samples)))
    if np.ptp(u.samples) < 1e-12 * max(1.0, scale):
        return SymmetryDiagnostics(center=0.0, evenness_defect=0.0,
                                   monotonicity_defect=0.0, critical_points=0,
                                   degenerate=True)
    fine = np.linspace(-L, L, refine * n, endpoint=False)
    uf = u.eval(fine)
    z = float(fine[int(np.argmax(uf))])
    du = u.derivative()
    d2u = u.derivative(2)
    # Newton refinement of u'(z) = 0 near the fine-grid argmax
    for _ in range(60):
        d1 = du.eval(z)
        d2 = d2u.eval(z)
        if abs(d2) < 1e-14 * max(1.0, scale):
            break
        step = d1 / d2
        if abs(step) > L / n:  # stay inside the located basin
            step = math.copysign(L / n, step)
        z -= step
        if abs(d1) < 1e-13 * max(1.0, scale):
            break
    xs = np.linspace(0.0, L, refine * n // 2 + 1)
    right = u.eval(z + xs)
    left = u.eval(z - xs)
    evenness = float(np.max(np.abs(right - left)))
    prof = 0.5 * (right + left)
    running_min = np.minimum.accumulate(prof)
    monotonicity = float(np.max(prof - running_min))
    # critical points: derivative sign changes strictly inside (0, L)
    dvals = du.eval(z + xs[1:-1])
    thresh = 1e-7 * max(float(np.max(np.abs(dvals))), 1e-30)
    signs = np.sign(dvals[np.abs(dvals) > thresh])
    interior = int(np.count_nonzero(np.diff(signs) != 0)) if signs.size else 0
    return SymmetryDiagnostics(center=z, evenness_defect=evenness,
                               monotonicity_defect=monotonicity,
                               critical_points=2 + interior, degenerate=False)


@dataclass(frozen=True)
class MinimizeResult:
    u: PeriodicFunction
    multiplier: float | None
    residual_norm: float
    constraint_defect: float | None
    iterations: int
    converged: bool
    energy_trace: np.ndarray = field(repr=False)
    diagnostics: SymmetryDiagnostics = None
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {"multiplier": self.multiplier, "residual_norm": self.residual_norm,
                "constraint_defect": self.constraint_defect,
                "iterations": self.iterations, "converged": self.converged,
                "final_energy": float(self.energy_trace[-1]),
                "diagnostics": self.diagnostics.to_dict(),
                "flags": list(self.flags)}


def _l2(u: PeriodicFunction) -> float:
    return u.l2_norm()


def _inner(u: PeriodicFunction, v: PeriodicFunction) -> float:
    return u.grid.spacing * float(np.sum(u.samples * v.samples))


def _precondition(sym: SymbolTable, v: PeriodicFunction) -> PeriodicFunction:
    """Divide mode k by 1 + ell(pi k/L) to tame the |k|^(2s) stiffness."""
    return PeriodicFunction.from_coeffs(
        v.grid, v.coeffs() / (1.0 + sym.full_multiplier()))


def multiplier_and_residual(u: PeriodicFunction, sym: SymbolTable,
                            nl: Nonlinearity):
    """Least-squares lambda and the Euler-Lagrange residual field."""
    rep = energy(u, sym, nl)
    r = rep.gradient
    if not nl.has_constraint():
        return None, r, rep
    _, gt = constraint_value(u, nl)
    denom = _inner(gt, gt)
    if denom < 1e-30:
        return None, r, rep  # degenerate constraint direction
    lam = _inner(r, gt) / denom
    return lam, r - lam * gt, rep


def minimize(cfg: MinimizeConfig) -> MinimizeResult:
    """Projected gradient descent with least-squares multiplier, spectral
    preconditioning, Armijo backtracking on the energy, and constraint
    re-projection after every step."""
    flags = []
    if np.any(cfg.sym.values < 0):
        flags.append("sign-changing symbol: no convergence guarantee")
    constrained = cfg.c is not None
    u = project_constraint(cfg.initial, cfg.nl, cfg.c) if constrained else cfg.initial
    lam, pg, rep = multiplier_and_residual(u, cfg.sym, cfg.nl)
    trace = [rep.total]
    step = cfg.step0
    it = 0
    converged = False
    stagnant = 0
    while it < cfg.max_iters:
        it += 1
        d = _precondition(cfg.sym, pg)
        if _l2(d) < cfg.grad_tol:
            converged = True
            break
        slope = _inner(pg, d)  # positive: d is a descent direction
        accepted = False
        for _ in range(60):
            cand = u - step * d
            if constrained:
                try:
                    cand = project_constraint(cand, cfg.nl, cfg.c)
                except ProjectionError:
                    step *= cfg.armijo_shrink
                    continue
            lam_c, pg_c, rep_c = multiplier_and_residual(cand, cfg.sym, cfg.nl)
            if rep_c.total <= trace[-1] - cfg.armijo_c1 * step * slope:
                # steps accepted on rounding-level decreases mean the energy
                # has flattened out; count them toward stagnation
                if trace[-1] - rep_c.total < 1e-14 * max(1.0, abs(trace[-1])):
                    stagnant += 1
                else:
                    stagnant = 0
                u, lam, pg = cand, lam_c, pg_c
                trace.append(rep_c.total)
                step = min(step * 1.5, 1e6)
                accepted = True
                break
            step *= cfg.armijo_shrink
        if accepted and stagnant >= 50 and _l2(
                _precondition(cfg.sym, pg)) < 100 * cfg.grad_tol:
            converged = True
            break
        if not accepted:
            # Armijo stalled at machine precision: treat as converged if the
            # projected gradient is already small, otherwise report failure
            if _l2(_precondition(cfg.sym, pg)) < 100 * cfg.grad_tol:
                converged = True
                break
            raise DivergenceError(
                f"no descent after 60 backtracks at iteration {it} "
                f"(energy {trace[-1]:g})")
        if trace[-1] < -1e12:
            raise DivergenceError("energy unbounded along the trajectory")
    lam, resid, rep = multiplier_and_residual(u, cfg.sym, cfg.nl)
    defect = None
    if constrained:
        defect = abs(potential_integral(u, cfg.nl.Gt) - cfg.c)
    return MinimizeResult(u=u, multiplier=lam, residual_norm=_l2(resid),
                          constraint_defect=defect, iterations=it,
                          converged=converged, energy_trace=np.array(trace),
                          diagnostics=symmetry_diagnostics(u),
                          flags=tuple(flags))


def max_principle_probe(kernel: Kernel, v: PeriodicFunction, x0: float,
                        wrapped: WrappedKernel | None = None) -> float:
    """Operator value at an interior zero of an odd, nonpositive-on-(0, L)
    test function.  For admissible kernels the value must be strictly
    positive unless v vanishes identically."""
    L = v.grid.half_period
    scale = max(1.0, float(np.max(np.abs(v.samples))))
    xs = np.linspace(0.0, L, 4 * v.grid.size)
    odd_defect = float(np.max(np.abs(v.eval(xs) + v.eval(-xs))))
    if odd_defect > 1e-10 * scale:
        raise HypothesisViolationError(f"oddness defect {odd_defect:g}")
    if float(np.max(v.eval(xs[1:-1]))) > 1e-12 * scale:
        raise HypothesisViolationError("v must be nonpositive on (0, L)")
    if not 0.0 < x0 < L:
        raise HypothesisViolationError("probe point must lie inside (0, L)")
    if abs(v.eval(x0)) > 1e-10 * scale:
        raise HypothesisViolationError("v(x0) must vanish")
    return apply_pv(kernel, v, x0, wrapped=wrapped)
