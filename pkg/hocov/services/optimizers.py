"""
Derivative-free optimizers on boxes.

``DirectL`` is a locally-biased DIRECT search: the box is mapped to the unit
hypercube, rectangles are ranked by (size, center value), one rectangle per
size group is considered, the potentially optimal ones are read off the lower
right convex hull and each is trisected along its longest sides.

``bounded_polish`` refines a start point with scipy's COBYQA, a
quadratic-model trust-region method that keeps every iterate inside the
bounds, and returns the best point seen.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import Bounds, minimize

from hocov.core.config import settings
from hocov.core.errors import DomainError
from hocov.core.logging import LoggerMixin

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class OptimizeOutcome:
    """Best point of an optimization run with its evaluation count and milestones."""

    x: np.ndarray
    fun: float
    nfev: int
    history: List[Tuple[np.ndarray, float]] = field(default_factory=list)


def _check_box(lower: ArrayLike, upper: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(lower, dtype=float).reshape(-1)
    hi = np.asarray(upper, dtype=float).reshape(-1)
    if lo.shape != hi.shape or lo.size == 0:
        raise DomainError("bounds must be nonempty and of equal length")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
        raise DomainError("bounds must be finite with lower < upper")
    return lo, hi


class _Tracker:
    """Counts evaluations and remembers every new best point."""

    def __init__(self, func: Objective, lower: np.ndarray, upper: np.ndarray):
        self.func = func
        self.lower = lower
        self.span = upper - lower
        self.nfev = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = np.inf
        self.history: List[Tuple[np.ndarray, float]] = []

    def __call__(self, unit: np.ndarray) -> float:
        x = self.lower + np.clip(unit, 0.0, 1.0) * self.span
        value = float(self.func(x))
        self.nfev += 1
        if value < self.best_f:
            self.best_f = value
            self.best_x = x.copy()
            self.history.append((x.copy(), value))
        return value

    def outcome(self) -> OptimizeOutcome:
        assert self.best_x is not None
        return OptimizeOutcome(self.best_x, self.best_f, self.nfev, list(self.history))


class DirectL(LoggerMixin):
    """
    Locally-biased DIRECT global search within an evaluation budget.

    Rectangle sizes are the length of the longest side, 3^-level. Within a
    size group only the lowest center value is a candidate, ties going to
    the lowest rectangle index. A division samples c +- delta e_i along every
    longest side and splits the dimensions in order of min(f+, f-).
    """

    def __init__(
        self,
        func: Objective,
        lower: ArrayLike,
        upper: ArrayLike,
        budget: int,
        epsilon: Optional[float] = None,
    ):
        self.lower, self.upper = _check_box(lower, upper)
        self.dim = self.lower.size
        if budget < self.dim + 1:
            raise DomainError(f"budget must be at least {self.dim + 1}, got {budget}")
        self.budget = int(budget)
        self.epsilon = settings.DIRECT_EPSILON if epsilon is None else float(epsilon)
        self._tracker = _Tracker(func, self.lower, self.upper)
        self.centers: List[np.ndarray] = []
        self.levels: List[np.ndarray] = []
        self.values: List[float] = []

    def _add(self, center: np.ndarray, levels: np.ndarray, value: float) -> None:
        self.centers.append(center)
        self.levels.append(levels)
        self.values.append(value)

    def _potentially_optimal(self) -> List[int]:
        # best rectangle per size group; key is the longest-side level
        groups: Dict[int, int] = {}
        for index, (levels, value) in enumerate(zip(self.levels, self.values)):
            key = int(levels.min())
            best = groups.get(key)
            if best is None or value < self.values[best]:
                groups[key] = index

        # points (size, value) by increasing size
        points = sorted(
            ((3.0 ** -key, self.values[index], index) for key, index in groups.items()),
            key=lambda p: p[0],
        )
        f_min = min(p[1] for p in points)
        start = max(i for i, p in enumerate(points) if p[1] == f_min)
        candidates = points[start:]

        hull: List[Tuple[float, float, int]] = []
        for point in candidates:
            while len(hull) >= 2:
                (x1, y1, _), (x2, y2, _) = hull[-2], hull[-1]
                cross = (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1)
                if cross > 0:
                    break
                hull.pop()
            hull.append(point)

        threshold = f_min - self.epsilon * abs(f_min)
        selected = []
        for position, (size, value, index) in enumerate(hull):
            if position == len(hull) - 1:
                selected.append(index)
                continue
            next_size, next_value, _ = hull[position + 1]
            slope = (next_value - value) / (next_size - size)
            if value - slope * size <= threshold:
                selected.append(index)
        return sorted(selected)

    def _divide(self, index: int) -> None:
        evaluate = self._tracker
        center = self.centers[index]
        levels = self.levels[index].copy()
        longest = np.flatnonzero(levels == levels.min())
        delta = 3.0 ** -(int(levels.min()) + 1)

        samples = {}
        for axis in longest:
            step = np.zeros(self.dim)
            step[axis] = delta
            samples[int(axis)] = (
                (center + step, evaluate(center + step)),
                (center - step, evaluate(center - step)),
            )

        for axis in sorted(samples, key=lambda a: (min(samples[a][0][1], samples[a][1][1]), a)):
            levels[axis] += 1
            for point, value in samples[axis]:
                self._add(point, levels.copy(), value)
        self.levels[index] = levels

    def minimize(self) -> OptimizeOutcome:
        """Run the search until no further division fits the budget."""
        center = np.full(self.dim, 0.5)
        self._add(center, np.zeros(self.dim, dtype=np.int64), self._tracker(center))

        iterations = 0
        while True:
            divided = False
            for index in self._potentially_optimal():
                cost = 2 * int(np.count_nonzero(self.levels[index] == self.levels[index].min()))
                if self._tracker.nfev + cost > self.budget:
                    break
                self._divide(index)
                divided = True
            else:
                if divided:
                    iterations += 1
                    continue
            break

        outcome = self._tracker.outcome()
        self.logger.info(
            "DIRECT-L: %d evaluations, %d iterations, %d rectangles, best %.6g",
            outcome.nfev, iterations, len(self.values), outcome.fun,
        )
        return outcome


def direct_l(
    func: Objective,
    lower: ArrayLike,
    upper: ArrayLike,
    budget: int,
    epsilon: Optional[float] = None,
) -> OptimizeOutcome:
    """Locally-biased DIRECT on the box [lower, upper]."""
    return DirectL(func, lower, upper, budget, epsilon).minimize()


def bounded_polish(
    func: Objective,
    x0: Sequence[float],
    lower: ArrayLike,
    upper: ArrayLike,
    tol: Optional[float] = None,
    max_evals: Optional[int] = None,
    initial_radius: Optional[float] = None,
) -> OptimizeOutcome:
    """
    Local derivative-free refinement inside a box.

    The search runs in unit-box coordinates and stops when the trust-region
    radius falls below ``tol`` or after ``max_evals`` evaluations. The start
    is evaluated first and the best point seen is returned, so the result
    never exceeds f(x0).
    """
    lo, hi = _check_box(lower, upper)
    start = np.asarray(x0, dtype=float).reshape(-1)
    if start.shape != lo.shape:
        raise DomainError("start point and bounds differ in dimension")
    if np.any(start < lo) or np.any(start > hi):
        raise DomainError("start point lies outside the bounds")

    tol = settings.LOCAL_TOL if tol is None else float(tol)
    max_evals = settings.LOCAL_MAX_EVALS if max_evals is None else int(max_evals)
    radius = settings.LOCAL_INITIAL_RADIUS if initial_radius is None else float(initial_radius)
    if tol <= 0 or max_evals < 1:
        raise DomainError("tol must be positive and max_evals at least 1")

    tracker = _Tracker(func, lo, hi)
    unit_start = (start - lo) / (hi - lo)
    tracker(unit_start)

    if max_evals > 1:
        result = minimize(
            tracker,
            unit_start,
            method="COBYQA",
            bounds=Bounds(np.zeros(lo.size), np.ones(lo.size)),
            options={
                "maxfev": max_evals - 1,
                "initial_tr_radius": max(radius, tol),
                "final_tr_radius": tol,
            },
        )
        logger.debug("COBYQA finished: %s (nfev=%d)", result.message, tracker.nfev)

    return tracker.outcome()
