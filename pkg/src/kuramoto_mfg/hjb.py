"""Stationary HJB solve on the torus and the equilibrium it induces.

The dimensionless equation is

    -v_xx + lambda * v + (1/2) v_x^2 = -zeta * cos(x)   on the torus,

whose unique smooth solution is even about 0 and pi. The equilibrium
density is the Gibbs density f = exp(-v)/Z and the order parameter is
the first cosine moment A = int cos(x) f(x) dx.

Solver strategy: continuation in zeta from the explicit solution v = 0
at zeta = 0, with damped Newton steps on each continuation leg. The
Newton linearization at an iterate v with u = v_x is

    L h = -h_xx + u h_x + lambda h,

the same operator used by the sensitivity module for the parameter
variations, discretized with the grid's spectral matrices. Each iterate
is symmetrized (v <- (v(x) + v(-x))/2); the deviation removed this way
stays at roundoff for a converging solve and is reported as
``sym_defect``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import DEFAULTS
from .errors import InvalidParams, NonConvergence
from .grid import (GridFn, TorusGrid, diff, diff_values, integrate, make_grid,
                   spectral_cleanup)

_SOLVER = DEFAULTS["solver"]


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter pair: discount lam > 0, coupling zeta >= 0."""

    lam: float
    zeta: float

    def __post_init__(self):
        if not (self.lam > 0):
            raise InvalidParams(f"lambda must be positive, got {self.lam}")
        if not (self.zeta >= 0):
            raise InvalidParams(f"zeta must be nonnegative, got {self.zeta}")


@dataclass(frozen=True)
class SolverOptions:
    tol: float = _SOLVER["tol"]
    max_newton: int = _SOLVER["max_newton"]
    max_step: float = _SOLVER["max_step"]
    min_step: float = _SOLVER["min_step"]


@dataclass(frozen=True)
class HjbSolution:
    """Converged solve at fixed (lambda, zeta): value function v,
    slope u = v_x, density f, normalizer Z, order parameter A."""

    params: ModelParams
    grid: TorusGrid
    v: GridFn
    u: GridFn
    f: GridFn
    normalizer: float
    A: float
    residual: float
    sym_defect: float = 0.0


def linearized_operator(grid: TorusGrid, lam: float, u: np.ndarray) -> np.ndarray:
    """Dense matrix of h -> -h_xx + u h_x + lambda h."""
    return -grid.second_diff_matrix + lam * np.eye(grid.m) + u[:, None] * grid.diff_matrix


def _residual_values(grid: TorusGrid, lam: float, zeta: float, v: np.ndarray) -> np.ndarray:
    u = diff_values(grid, v)
    return -diff_values(grid, u) + lam * v + 0.5 * u * u + zeta * np.cos(grid.nodes)


def _symmetrize(grid: TorusGrid, v: np.ndarray) -> tuple[np.ndarray, float]:
    refl = grid.reflect_values(v)
    defect = 0.5 * float(np.max(np.abs(v - refl)))
    return spectral_cleanup(grid, 0.5 * (v + refl)), defect


class _NewtonFailure(Exception):
    pass


def _newton(grid: TorusGrid, lam: float, zeta: float, v0: np.ndarray,
            opts: SolverOptions) -> tuple[np.ndarray, float, float]:
    """Damped Newton from v0; returns (v, residual, sym_defect)."""
    v, defect = _symmetrize(grid, v0)
    max_defect = defect
    res = _residual_values(grid, lam, zeta, v)
    res_norm = float(np.max(np.abs(res)))
    for _ in range(opts.max_newton):
        if res_norm <= opts.tol:
            break
        u = diff_values(grid, v)
        try:
            delta = np.linalg.solve(linearized_operator(grid, lam, u), -res)
        except np.linalg.LinAlgError as exc:
            raise _NewtonFailure("linear solve failed") from exc
        step = 1.0
        while step > 2.0 ** -24:
            trial, defect = _symmetrize(grid, v + step * delta)
            trial_res = _residual_values(grid, lam, zeta, trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < res_norm:
                break
            step *= 0.5
        else:
            raise _NewtonFailure("damping stalled")
        v, res, res_norm = trial, trial_res, trial_norm
        max_defect = max(max_defect, defect)
    else:
        raise _NewtonFailure("iteration budget exhausted")
    # Polish: quadratic convergence usually buys a few extra digits below
    # the tolerance, which the finite-difference cross-checks rely on.
    for _ in range(2):
        u = diff_values(grid, v)
        try:
            delta = np.linalg.solve(linearized_operator(grid, lam, u), -res)
        except np.linalg.LinAlgError:
            break
        trial, defect = _symmetrize(grid, v + delta)
        trial_res = _residual_values(grid, lam, zeta, trial)
        trial_norm = float(np.max(np.abs(trial_res)))
        if trial_norm >= res_norm:
            break
        v, res, res_norm = trial, trial_res, trial_norm
        max_defect = max(max_defect, defect)
    return v, res_norm, max_defect


def solve_hjb(params: ModelParams, grid: TorusGrid,
              opts: Optional[SolverOptions] = None,
              v0: Optional[np.ndarray] = None,
              zeta0: float = 0.0) -> HjbSolution:
    """Solve the HJB equation at ``params`` on ``grid``.

    Continuation starts from v = 0 at zeta = 0 unless a warm start
    ``v0`` (the solution at ``zeta0``) is supplied. Continuation legs
    never exceed ``opts.max_step`` in zeta and are halved on Newton
    failure down to ``opts.min_step`` before NonConvergence is raised.
    """
    opts = opts or SolverOptions()
    lam, zeta_target = params.lam, params.zeta
    if v0 is None:
        v = np.zeros(grid.m)
        zeta = 0.0
    else:
        v = np.asarray(v0, dtype=float).copy()
        zeta = float(zeta0)

    max_defect = 0.0
    if zeta == zeta_target:
        v, res_norm, max_defect = _run_leg(grid, lam, zeta_target, v, opts)
    else:
        res_norm = None
        while zeta != zeta_target:
            step = np.clip(zeta_target - zeta, -opts.max_step, opts.max_step)
            while True:
                try:
                    v_new, res_norm, defect = _run_leg(grid, lam, zeta + step, v, opts)
                    break
                except _NewtonFailure:
                    step *= 0.5
                    if abs(step) < opts.min_step:
                        raise NonConvergence(
                            f"continuation stalled at zeta={zeta:.6g} "
                            f"(target {zeta_target:.6g}, lambda={lam:.6g}, M={grid.m})"
                        ) from None
            v, zeta = v_new, zeta + step
            max_defect = max(max_defect, defect)

    v_fn = GridFn(grid, v)
    u_fn = diff(v_fn)
    f_fn, normalizer = _density_from_v(grid, v)
    a = integrate(GridFn(grid, np.cos(grid.nodes) * f_fn.values))
    return HjbSolution(params=params, grid=grid, v=v_fn, u=u_fn, f=f_fn,
                       normalizer=normalizer, A=a, residual=res_norm,
                       sym_defect=max_defect)


def _run_leg(grid, lam, zeta, v, opts):
    try:
        return _newton(grid, lam, zeta, v, opts)
    except _NewtonFailure:
        raise


def _density_from_v(grid: TorusGrid, v: np.ndarray) -> tuple[GridFn, float]:
    # Shift by min(v) before exponentiating; Z is reassembled exactly.
    shift = float(np.min(v))
    g = np.exp(-(v - shift))
    z_shifted = grid.spacing * float(np.sum(g))
    f = GridFn(grid, g / z_shifted)
    return f, z_shifted * np.exp(-shift)


def equilibrium_density(sol: HjbSolution) -> GridFn:
    """Gibbs density f = exp(-v)/Z recomputed from the stored v."""
    f, _ = _density_from_v(sol.grid, sol.v.values)
    return f


def order_parameter(sol: HjbSolution) -> float:
    """First cosine moment of the equilibrium density."""
    return integrate(GridFn(sol.grid, np.cos(sol.grid.nodes) * sol.f.values))


def hjb_residual(sol: HjbSolution) -> float:
    """Sup-norm residual of the stored v, with v_xx = diff(diff(v))."""
    res = _residual_values(sol.grid, sol.params.lam, sol.params.zeta, sol.v.values)
    return float(np.max(np.abs(res)))


def solution_to_json(sol: HjbSolution) -> str:
    doc = {
        "lambda": sol.params.lam,
        "zeta": sol.params.zeta,
        "M": sol.grid.m,
        "residual": sol.residual,
        "A": sol.A,
        "normalizer": sol.normalizer,
        "v": sol.v.values.tolist(),
        "u": sol.u.values.tolist(),
        "f": sol.f.values.tolist(),
    }
    return json.dumps(doc)


def solution_from_json(text: str) -> HjbSolution:
    """Rebuild a solution document. No validity checks are performed
    here; ``cli`` verification re-derives residual, parity and mass."""
    doc = json.loads(text)
    grid = make_grid(int(doc["M"]))
    params = ModelParams(lam=float(doc["lambda"]), zeta=float(doc["zeta"]))
    v = GridFn(grid, np.asarray(doc["v"], dtype=float))
    u = GridFn(grid, np.asarray(doc["u"], dtype=float))
    f = GridFn(grid, np.asarray(doc["f"], dtype=float))
    return HjbSolution(params=params, grid=grid, v=v, u=u, f=f,
                       normalizer=float(doc["normalizer"]), A=float(doc["A"]),
                       residual=float(doc["residual"]))
