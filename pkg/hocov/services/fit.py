"""
Weighted-least-squares variogram fitting.

The objective compares empirical and model semivariograms on the log scale,

    Q(theta) = sum_i [log(2 gamma_hat(h_i)) - log(2 gamma(h_i, theta))]^2 N(h_i) / 2,

and is minimized in two stages: a locally-biased DIRECT search over the box of
free parameters, then a bounded derivative-free polish started from the
global optimum.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from hocov.core.config import settings
from hocov.core.errors import DataError, DomainError, UndefinedObjectiveError
from hocov.schemas.data import Dataset, EmpiricalVariogram
from hocov.schemas.fit import FitProblem, FitResult, TraceEntry
from hocov.schemas.models import (
    CovarianceModel,
    ModelFamily,
    ParameterVector,
    family_parameters,
)
from hocov.services.covmodels import semivariogram_of
from hocov.services.optimizers import OptimizeOutcome, bounded_polish, direct_l

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObjectiveTerms:
    """Q(theta) together with the number of bins left out of the sum."""

    value: float
    excluded: int


def problem_model(problem: FitProblem, theta: ParameterVector) -> CovarianceModel:
    """The covariance model a problem describes, at parameters theta."""
    return CovarianceModel(family=problem.family, r=problem.r, s=problem.s, theta=theta)


def wls_terms(problem: FitProblem, theta: ParameterVector) -> ObjectiveTerms:
    """
    Evaluate the WLS objective and count excluded bins.

    Bins with gamma_hat = 0 or a nonpositive model value are left out for
    this theta. The sum is exactly rounded, so bin order cannot change it.

    Raises:
        UndefinedObjectiveError: every bin was excluded
    """
    empirical = problem.empirical
    observed = empirical.gamma
    modelled = np.atleast_1d(
        np.asarray(semivariogram_of(problem_model(problem, theta), empirical.lags), dtype=float)
    )

    usable = (observed > 0) & np.isfinite(modelled) & (modelled > 0)
    excluded = int(len(observed) - np.count_nonzero(usable))
    if not usable.any():
        raise UndefinedObjectiveError(
            "every bin was excluded from the WLS objective",
            context={"theta": theta.model_dump(), "bins": len(observed)},
        )

    residuals = np.log(2.0 * observed[usable]) - np.log(2.0 * modelled[usable])
    value = math.fsum(residuals**2 * empirical.weights[usable] / 2.0)
    if excluded:
        logger.debug("WLS objective excluded %d of %d bins", excluded, len(observed))
    return ObjectiveTerms(value=value, excluded=excluded)


def wls_objective(problem: FitProblem, theta: ParameterVector) -> float:
    """Q(theta) over the retained bins."""
    return wls_terms(problem, theta).value


def _box(problem: FitProblem) -> Tuple[np.ndarray, np.ndarray]:
    lower = np.array([problem.bounds[name][0] for name in problem.free_params], dtype=float)
    upper = np.array([problem.bounds[name][1] for name in problem.free_params], dtype=float)
    return lower, upper


def _theta_from(problem: FitProblem, x: Iterable[float]) -> ParameterVector:
    values: Dict[str, float] = dict(problem.fixed_params)
    values.update({name: float(v) for name, v in zip(problem.free_params, x)})
    return ParameterVector(**values)


def _vector_of(problem: FitProblem, theta: ParameterVector) -> np.ndarray:
    return np.array([theta.get(name) for name in problem.free_params], dtype=float)


def _objective_on(problem: FitProblem):
    def objective(x: np.ndarray) -> float:
        return wls_objective(problem, _theta_from(problem, x))

    return objective


def _trace(problem: FitProblem, stage: str, outcome: OptimizeOutcome) -> List[TraceEntry]:
    return [
        TraceEntry(stage=stage, theta=_theta_from(problem, x), value=value)
        for x, value in outcome.history
    ]


def _global_stage(problem: FitProblem, budget: int) -> OptimizeOutcome:
    if budget < problem.n_free + 1:
        raise DomainError(
            f"global budget must be at least {problem.n_free + 1}, got {budget}"
        )
    lower, upper = _box(problem)
    return direct_l(_objective_on(problem), lower, upper, budget)


def global_search(problem: FitProblem, budget: int) -> Tuple[ParameterVector, float]:
    """
    Locally-biased DIRECT over the free-parameter box.

    Returns:
        The best rectangle center found within the budget and its Q
    """
    if problem.n_free == 0:
        theta = _theta_from(problem, ())
        return theta, wls_objective(problem, theta)
    outcome = _global_stage(problem, budget)
    return _theta_from(problem, outcome.x), outcome.fun


def local_polish(
    problem: FitProblem,
    start: ParameterVector,
    tol: Optional[float] = None,
    max_evals: Optional[int] = None,
) -> FitResult:
    """
    Bounded derivative-free refinement of ``start``.

    The result never has a larger Q than the start.

    Raises:
        DomainError: start outside the bounds
        UndefinedObjectiveError: Q undefined at the start
    """
    if problem.n_free == 0:
        return _fixed_result(problem)

    lower, upper = _box(problem)
    x0 = _vector_of(problem, start)
    outside = [
        name
        for name, value, lo, hi in zip(problem.free_params, x0, lower, upper)
        if not lo <= value <= hi
    ]
    if outside:
        raise DomainError(f"start lies outside the bounds for {outside}")

    outcome = bounded_polish(_objective_on(problem), x0, lower, upper, tol, max_evals)
    theta_hat = _theta_from(problem, outcome.x)
    start_value = outcome.history[0][1]
    return FitResult(
        theta_hat=theta_hat,
        objective=outcome.fun,
        global_stage_value=start_value,
        evaluations=outcome.nfev,
        local_evaluations=outcome.nfev,
        excluded_bins=wls_terms(problem, theta_hat).excluded,
        trace=_trace(problem, "local", outcome),
    )


def _fixed_result(problem: FitProblem) -> FitResult:
    theta = _theta_from(problem, ())
    terms = wls_terms(problem, theta)
    return FitResult(
        theta_hat=theta,
        objective=terms.value,
        global_stage_value=terms.value,
        evaluations=1,
        excluded_bins=terms.excluded,
        trace=[TraceEntry(stage="fixed", theta=theta, value=terms.value)],
    )


def fit(
    problem: FitProblem,
    global_budget: Optional[int] = None,
    local_tol: Optional[float] = None,
    local_max_evals: Optional[int] = None,
) -> FitResult:
    """
    Two-stage WLS fit: global DIRECT-L search, then a local polish from its optimum.

    Args:
        problem: Fitting problem
        global_budget: DIRECT-L evaluations; 500 per free parameter if None
        local_tol: Final trust-region radius of the polish
        local_max_evals: Evaluation cap of the polish

    Returns:
        FitResult with Q(theta_hat) <= Q(theta_bar)
    """
    if problem.n_free == 0:
        result = _fixed_result(problem)
        logger.info("All parameters fixed: Q=%.6g", result.objective)
        return result

    budget = global_budget or settings.GLOBAL_BUDGET_PER_PARAM * problem.n_free
    logger.info(
        "Fitting %s with free parameters %s (global budget %d)",
        problem.family.value, problem.free_params, budget,
    )

    global_outcome = _global_stage(problem, budget)
    logger.info("Global stage: Q=%.6g after %d evaluations", global_outcome.fun, global_outcome.nfev)

    lower, upper = _box(problem)
    local_outcome = bounded_polish(
        _objective_on(problem), global_outcome.x, lower, upper, local_tol, local_max_evals
    )
    logger.info("Local stage: Q=%.6g after %d evaluations", local_outcome.fun, local_outcome.nfev)

    # the polish restarts from a unit-box image of the global optimum
    best_x, best_value = local_outcome.x, local_outcome.fun
    if best_value > global_outcome.fun:
        best_x, best_value = global_outcome.x, global_outcome.fun
    theta_hat = _theta_from(problem, best_x)

    return FitResult(
        theta_hat=theta_hat,
        objective=best_value,
        global_stage_value=global_outcome.fun,
        evaluations=global_outcome.nfev + local_outcome.nfev,
        global_evaluations=global_outcome.nfev,
        local_evaluations=local_outcome.nfev,
        excluded_bins=wls_terms(problem, theta_hat).excluded,
        trace=_trace(problem, "global", global_outcome) + _trace(problem, "local", local_outcome),
    )


def default_bounds(
    data: Dataset, family: ModelFamily, free: Sequence[str]
) -> Dict[str, Tuple[float, float]]:
    """
    Scale-aware search box for the free parameters.

    sill in [1e-6 v, 10 v] and nugget in [0, 10 v] with v the sample variance;
    range and decay in [d_min, d_max] over the observed pair distances.
    """
    allowed = family_parameters(family)
    unknown = [name for name in free if name not in allowed]
    if unknown:
        raise DomainError(f"{family.value} has no parameters {unknown}")

    variance = float(np.var(data.observations, ddof=1))
    if not variance > 0:
        raise DataError("observed values are constant; no variance scale for the bounds")
    distances = pdist(data.coordinates)

    boxes = {
        "nugget": (0.0, 10.0 * variance),
        "sill": (1e-6 * variance, 10.0 * variance),
        "range": (float(distances.min()), float(distances.max())),
        "decay": (float(distances.min()), float(distances.max())),
    }
    return {name: boxes[name] for name in free}


def make_problem(
    family: ModelFamily,
    empirical: EmpiricalVariogram,
    free: Sequence[str],
    fixed: Dict[str, float],
    bounds: Dict[str, Tuple[float, float]],
    r: int = 1,
    s: int = 0,
) -> FitProblem:
    """Build a FitProblem, keeping only the bounds of free parameters."""
    return FitProblem(
        family=family,
        r=r,
        s=s,
        empirical=empirical,
        free_params=list(free),
        fixed_params={name: float(v) for name, v in fixed.items()},
        bounds={name: bounds[name] for name in free if name in bounds},
    )
