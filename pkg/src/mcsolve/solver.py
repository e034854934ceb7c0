"""Newton iteration, adaptive refinement and continuation."""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np
import scipy.linalg

from .errors import ContinuationError, DivergenceError
from .geometry import Disk, Rectangle
from .operators import (
    Capillary,
    Dirichlet,
    ProblemSpec,
    assemble_operator,
    boundary_function,
    check_compatibility,
    residual,
)
from .spectral import DerivativeSet, ScalarField, assemble, resample, sample

log = logging.getLogger(__name__)

InitialGuess = Union[None, str, float, ScalarField, Callable]


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings; ``None`` means "use the geometry default"."""

    tol_newton: float | None = None
    tol_bvp: float = 1e-10
    eps_reg: float = 1e-8
    n_init: int | None = None
    m_init: int | None = None
    max_newton_iters: int = 50
    max_refinements: int = 4
    refine_min_step: int = 8
    refine_fraction: float = 0.2
    initial_guess: InitialGuess = None
    continuation_steps: int = 0
    divergence_threshold: float = 1e6
    max_unknowns: int = 6500

    def __post_init__(self):
        if self.tol_newton is not None and not self.tol_newton > 0:
            raise ValueError("tol_newton must be positive")
        if not self.tol_bvp > 0:
            raise ValueError("tol_bvp must be positive")
        if not self.eps_reg > 0:
            raise ValueError("eps_reg must be positive")
        if self.n_init is not None and self.n_init < 4:
            raise ValueError("n_init must be at least 4")
        if self.max_newton_iters < 1 or self.max_refinements < 0:
            raise ValueError("iteration limits must be non-negative")

    def newton_tolerance(self, domain) -> float:
        if self.tol_newton is not None:
            return self.tol_newton
        return 1e-14 if isinstance(domain, Rectangle) else 1e-13

    def initial_resolution(self, domain) -> tuple[int, int | None]:
        if isinstance(domain, Rectangle):
            return (self.n_init or 55, None)
        n = self.n_init or 50
        if isinstance(domain, Disk) and n % 2:
            raise ValueError("disk grids need an even number of Chebyshev points")
        return n, self.m_init or 80

    def refine(self, n: int, m: int | None, domain) -> tuple[int, int | None]:
        """Next grid size: ``n + max(8, ceil(0.2 n))``, ``m`` scaled in proportion."""
        n_new = n + max(self.refine_min_step, math.ceil(self.refine_fraction * n))
        if isinstance(domain, Disk) and n_new % 2:
            n_new += 1
        if m is None:
            return n_new, None
        m_new = math.ceil(m * n_new / n)
        return n_new, m_new + (m_new % 2)


@dataclass(frozen=True, eq=False)
class NewtonResult:
    v: ScalarField
    step_residuals: list[float]
    converged: bool
    iterations: int


@dataclass(frozen=True, eq=False)
class LevelRecord:
    resolution: tuple[int, int]
    step_residuals: list[float]
    newton_converged: bool
    bvp_residual: float
    max_abs_residual: float
    assemble_seconds: float
    newton_seconds: float


@dataclass(frozen=True, eq=False)
class Solution:
    v: ScalarField
    spec: ProblemSpec
    converged: bool
    status: str
    bvp_residual: float
    max_abs_residual: float
    levels: list[LevelRecord]
    config: SolverConfig
    lam: float = 1.0
    lambdas: list[float] = field(default_factory=list)

    @property
    def derivs(self) -> DerivativeSet:
        return self.v.derivs

    @property
    def resolution(self) -> tuple[int, int]:
        return self.v.derivs.resolution

    @property
    def newton_histories(self) -> list[list[float]]:
        return [lvl.step_residuals for lvl in self.levels]

    @property
    def step_residuals(self) -> list[float]:
        return self.levels[-1].step_residuals if self.levels else []


def relative(x: np.ndarray, v: np.ndarray, eps: float) -> float:
    return float(np.linalg.norm(x) / (np.linalg.norm(v) + eps))


def _lu_step(L: np.ndarray, N: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu = scipy.linalg.lu_factor(L, overwrite_a=True, check_finite=False)
        except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
            raise DivergenceError(f"Frechet matrix is singular: {exc}") from exc
    if np.any(np.diag(lu[0]) == 0.0):
        raise DivergenceError("zero pivot in the Frechet matrix factorisation")
    return -scipy.linalg.lu_solve(lu, N, check_finite=False)


def newton_solve(spec: ProblemSpec, derivs: DerivativeSet, v0, cfg: SolverConfig = SolverConfig()) -> NewtonResult:
    """Undamped Newton: solve ``L(v) dv = -N(v)`` by dense LU until the relative step is small."""
    v = np.array(getattr(v0, "values", v0), dtype=float)
    if v.ndim == 0:
        v = np.full(derivs.size, float(v))
    if v.shape != (derivs.size,):
        raise ValueError(f"initial guess has {v.size} values, grid has {derivs.size}")
    tol = cfg.newton_tolerance(spec.domain)
    history: list[float] = []
    for it in range(1, cfg.max_newton_iters + 1):
        op = assemble_operator(spec, derivs, v)
        if not np.all(np.isfinite(op.residual)) or not np.all(np.isfinite(op.matrix)):
            raise DivergenceError("non-finite residual or Frechet matrix", history, ScalarField(v, derivs))
        try:
            dv = _lu_step(op.matrix, op.residual)
        except DivergenceError as exc:
            raise DivergenceError(str(exc), history, ScalarField(v, derivs)) from exc
        v = v + dv
        step = relative(dv, v, cfg.eps_reg)
        history.append(step)
        log.debug("newton %d: step residual %.3e", it, step)
        if not np.isfinite(step) or step > cfg.divergence_threshold:
            raise DivergenceError(f"Newton step residual {step:.3e} at iteration {it}", history)
        if step < tol:
            return NewtonResult(ScalarField(v, derivs), history, True, it)
    return NewtonResult(ScalarField(v, derivs), history, False, cfg.max_newton_iters)


def default_guess(spec: ProblemSpec) -> float:
    if isinstance(spec.pde, Capillary) and spec.all_capillary:
        return 1.0
    return 0.0


def initial_field(spec: ProblemSpec, derivs: DerivativeSet, guess: InitialGuess) -> ScalarField:
    if guess is None:
        guess = default_guess(spec)
    if isinstance(guess, ScalarField):
        return guess if guess.derivs is derivs else resample(guess, derivs)
    if isinstance(guess, str):
        key = guess.strip().lower()
        if key in ("zero", "one"):
            guess = 0.0 if key == "zero" else 1.0
        else:
            guess = boundary_function(guess, spec.domain)
    if callable(guess):
        return sample(derivs, guess)
    return ScalarField(np.full(derivs.size, float(guess)), derivs)


def _unknowns(domain, n: int, m: int | None) -> int:
    if m is None:
        return n * n
    return (n // 2) * m if isinstance(domain, Disk) else n * m


def adaptive_solve(spec: ProblemSpec, cfg: SolverConfig = SolverConfig()) -> Solution:
    """Newton solves on successively finer grids until the relative residual of N is below tol_bvp.

    A level is accepted as soon as the relative BVP residual on that grid is
    below ``tol_bvp``; otherwise the grid grows and the iterate is resampled
    onto it as the next initial guess. Newton may stop at its iteration limit
    without reaching ``tol_newton`` (the step residual stalls at the rounding
    floor of the collocation matrices); the per-level record keeps that flag.
    """
    spec = check_compatibility(spec)
    n, m = cfg.initial_resolution(spec.domain)
    t0 = time.perf_counter()
    derivs = assemble(spec.domain, n, m)
    v = initial_field(spec, derivs, cfg.initial_guess)
    levels: list[LevelRecord] = []
    for level in range(cfg.max_refinements + 1):
        t1 = time.perf_counter()
        assemble_time = t1 - t0
        try:
            res = newton_solve(spec, derivs, v, cfg)
        except DivergenceError as exc:
            raise DivergenceError(
                f"{exc} (grid {derivs.resolution}, refinement level {level})", exc.history, exc.field
            ) from exc
        t2 = time.perf_counter()
        N = residual(spec, derivs, res.v)
        bvp = relative(N, res.v.values, cfg.eps_reg)
        levels.append(
            LevelRecord(derivs.resolution, res.step_residuals, res.converged, bvp, float(np.max(np.abs(N))),
                        assemble_time, t2 - t1)
        )
        log.info("grid %s: %d Newton steps, bvp residual %.3e", derivs.resolution, res.iterations, bvp)
        if bvp < cfg.tol_bvp:
            return Solution(res.v, spec, True, "converged", bvp, levels[-1].max_abs_residual, levels, cfg)
        if level == cfg.max_refinements:
            break
        n_next, m_next = cfg.refine(n, m, spec.domain)
        if _unknowns(spec.domain, n_next, m_next) > cfg.max_unknowns:
            log.info("refinement to %s would exceed %d unknowns", (n_next, m_next), cfg.max_unknowns)
            break
        n, m = n_next, m_next
        t0 = time.perf_counter()
        derivs = assemble(spec.domain, n, m)
        v = resample(res.v, derivs)
    return Solution(res.v, spec, False, "refinement budget exhausted", bvp, levels[-1].max_abs_residual, levels, cfg)


def scale_dirichlet(spec: ProblemSpec, lam: float) -> ProblemSpec:
    """Copy of ``spec`` with every Dirichlet datum multiplied by ``lam``."""
    bcs = {}
    for comp, bc in spec.bcs.items():
        if isinstance(bc, Dirichlet):
            f = boundary_function(bc.g, spec.domain)
            bcs[comp] = Dirichlet(lambda c1, c2, f=f: lam * np.asarray(f(c1, c2), dtype=float))
        else:
            bcs[comp] = bc
    return replace(spec, bcs=bcs)


def uniform_schedule(steps: int) -> list[float]:
    return list(np.linspace(0.0, 1.0, steps + 1))


def continuation_solve(
    spec: ProblemSpec,
    cfg: SolverConfig = SolverConfig(),
    schedule: Sequence[float] | None = None,
    raise_on_failure: bool = False,
) -> Solution:
    """Solve with Dirichlet data lam * g along ``schedule``, warm-starting each step.

    On failure the last converged solution is returned with ``status`` set
    to ``"partial"`` and ``lam`` the last successful parameter (or a
    ContinuationError is raised when ``raise_on_failure`` is set or no step
    succeeded).
    """
    if not spec.all_dirichlet:
        raise ValueError("continuation scales Dirichlet data; every component must be Dirichlet")
    if schedule is None:
        schedule = uniform_schedule(max(cfg.continuation_steps, 1))
    lams = [float(x) for x in schedule]
    if lams[0] != 0.0 or lams[-1] != 1.0 or any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("schedule must increase strictly from 0 to 1")
    guess = cfg.initial_guess if cfg.initial_guess is not None else 0.0
    last: Solution | None = None
    done: list[float] = []
    for lam in lams:
        step_cfg = replace(cfg, initial_guess=last.v if last is not None else guess)
        try:
            sol = adaptive_solve(scale_dirichlet(spec, lam), step_cfg)
        except DivergenceError as exc:
            log.info("continuation failed at lambda=%.4g: %s", lam, exc)
            sol = None
        if sol is None or not sol.converged:
            msg = f"continuation failed at lambda={lam:.6g}"
            if last is None or raise_on_failure:
                raise ContinuationError(msg, last_lambda=done[-1] if done else None, solution=last)
            return replace(last, status="partial", converged=False, lambdas=done)
        done.append(lam)
        last = sol
    return replace(last, spec=spec, lambdas=done)
