#!/usr/bin/env python3
"""
M-Estimation - Newton solver for estimating equations and sandwich covariance
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ...core.entities.errors import (
    DimensionMismatch,
    InadmissibleInit,
    NonConvergence,
    SingularBread,
    SingularJacobian,
)
from ...core.entities.subject_data import Dataset
from ...core.interfaces.estimating_system import IEstimatingSystem
from ..config.settings import SolverConfig, settings

logger = logging.getLogger(__name__)

# Reciprocal condition number below which a matrix is treated as singular
_SINGULAR_RCOND = 1e-14


@dataclass
class SolveReport:
    """Outcome of one call to `solve`"""
    theta_hat: np.ndarray
    iterations: int
    final_score_norm: float
    converged: bool
    tolerance: float = 0.0


def score_norm(system: IEstimatingSystem, data: Dataset, theta: np.ndarray) -> float:
    """Max-norm of the summed estimating function"""
    return float(np.max(np.abs(system.scores(data, theta).sum(axis=0))))


def solve(
    system: IEstimatingSystem,
    data: Dataset,
    init: Optional[np.ndarray] = None,
    config: Optional[SolverConfig] = None,
) -> SolveReport:
    """
    Solve sum_i U(record_i; theta) = 0 by Newton's method with step-halving.

    Independent parameter blocks are solved one after another. A step is halved
    (up to `max_halvings` times) while it leaves the admissible region or fails to
    reduce the max-norm of the summed score.

    Raises:
        InadmissibleInit: the starting point is outside the admissible region
        SingularJacobian: a Newton step cannot be computed
        NonConvergence: the iteration or halving budget ran out
    """
    config = config or settings.solver_config
    theta = system.initial_theta(data) if init is None else np.array(init, dtype=float)
    if theta.shape != (system.dim_theta,):
        raise DimensionMismatch(f"init has shape {theta.shape}, system expects ({system.dim_theta},)")
    if not system.is_admissible(data, theta):
        raise InadmissibleInit(f"initial value {theta} is outside the admissible region")

    tolerance = config.tolerance_for(data.n)
    iterations = 0
    for block_slice, block in system.blocks():
        theta[block_slice], used = _newton(block, data, theta[block_slice], tolerance, config)
        iterations += used

    report = SolveReport(
        theta_hat=theta,
        iterations=iterations,
        final_score_norm=score_norm(system, data, theta),
        converged=True,
        tolerance=tolerance,
    )
    logger.debug("solved %d parameters in %d Newton steps (score norm %.3g)",
                 system.dim_theta, iterations, report.final_score_norm)
    return report


def _newton(
    system: IEstimatingSystem,
    data: Dataset,
    theta: np.ndarray,
    tolerance: float,
    config: SolverConfig,
) -> Tuple[np.ndarray, int]:
    theta = theta.copy()
    score = system.scores(data, theta).sum(axis=0)
    norm = float(np.max(np.abs(score)))
    iterations = 0

    while not norm <= tolerance:
        if iterations >= config.max_iterations:
            raise NonConvergence(SolveReport(theta, iterations, norm, False, tolerance),
                                 f"no convergence within {config.max_iterations} Newton steps")

        jac = system.jacobian_sum(data, theta)
        if not np.all(np.isfinite(jac)) or _rcond(jac) < _SINGULAR_RCOND:
            raise SingularJacobian(f"score derivative is singular at theta={theta}")
        step = np.linalg.solve(jac, -score)

        factor = 1.0
        for _ in range(config.max_halvings + 1):
            candidate = theta + factor * step
            if system.is_admissible(data, candidate):
                cand_score = system.scores(data, candidate).sum(axis=0)
                cand_norm = float(np.max(np.abs(cand_score)))
                if cand_norm < norm:
                    theta, score, norm = candidate, cand_score, cand_norm
                    break
            factor /= 2.0
        else:
            raise NonConvergence(SolveReport(theta, iterations, norm, False, tolerance),
                                 f"step-halving failed after {config.max_halvings} halvings")

        iterations += 1
        logger.debug("newton step %d: factor=%g score norm=%.3g", iterations, factor, norm)

    return theta, iterations


def _rcond(matrix: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.linalg.cond(matrix)
    return 0.0 if not np.isfinite(cond) else 1.0 / cond


def sandwich_covariance(
    system: IEstimatingSystem,
    data: Dataset,
    theta_hat: np.ndarray,
    workers: int = 1,
) -> np.ndarray:
    """
    Robust covariance A^-1 B A^-T / n of the estimating-equation solution,
    A = -sum(jacobian)/n and B = sum(score score^T)/n.

    With `workers` > 1 the per-subject sums are accumulated over contiguous
    chunks in a thread pool.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    n = data.n
    jac_sum, meat_sum = _accumulate(system, data, theta_hat, workers)

    bread = -jac_sum / n
    meat = meat_sum / n
    if not np.all(np.isfinite(bread)) or _rcond(bread) < _SINGULAR_RCOND:
        raise SingularBread("bread matrix A is not invertible")
    bread_inv = np.linalg.inv(bread)

    cov = bread_inv @ meat @ bread_inv.T / n
    return (cov + cov.T) / 2.0


def _accumulate(
    system: IEstimatingSystem,
    data: Dataset,
    theta: np.ndarray,
    workers: int,
) -> Tuple[np.ndarray, np.ndarray]:
    def chunk_sums(chunk: Dataset) -> Tuple[np.ndarray, np.ndarray]:
        scores = system.scores(chunk, theta)
        return system.jacobian_sum(chunk, theta), scores.T @ scores

    if workers <= 1 or data.n < 2 * workers:
        return chunk_sums(data)

    chunks = [data.take(idx) for idx in np.array_split(np.arange(data.n), workers)]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="Sandwich") as executor:
        parts = list(executor.map(chunk_sums, chunks))
    return sum(p[0] for p in parts), sum(p[1] for p in parts)


def contrast_variance(cov: np.ndarray, c: np.ndarray) -> float:
    """Variance of c'theta_hat"""
    cov = np.asarray(cov, dtype=float)
    c = np.asarray(c, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or c.shape != (cov.shape[0],):
        raise DimensionMismatch(f"contrast of length {c.shape} does not fit covariance {cov.shape}")
    return float(c @ cov @ c)
