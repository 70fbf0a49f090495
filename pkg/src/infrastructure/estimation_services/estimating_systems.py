#!/usr/bin/env python3
"""
Estimating Systems - Log-link scores for binary and count outcomes, stacks, and the
augmented score for randomized trials
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...core.entities.subject_data import Dataset
from ...core.interfaces.estimating_system import IEstimatingSystem
from ..config.settings import settings
from .design import DesignMatrixBuilder


class _DesignBound(IEstimatingSystem):
    """Shared plumbing: an outcome column and a fitted design builder"""

    def __init__(self, builder: DesignMatrixBuilder, outcome: str, label: str):
        self.builder = builder
        self.outcome = outcome
        self.label = label
        self._cache: Optional[Tuple[Dataset, np.ndarray]] = None

    @property
    def dim_theta(self) -> int:
        return len(self.builder.column_names)

    @property
    def parameter_names(self) -> List[str]:
        return [f"{self.label}:{name}" for name in self.builder.column_names]

    def design(self, data: Dataset) -> np.ndarray:
        cache = self._cache
        if cache is not None and cache[0] is data:
            return cache[1]
        design = self.builder.transform(data)
        self._cache = (data, design)
        return design

    def response(self, data: Dataset) -> np.ndarray:
        return data.column(self.outcome).astype(float)

    def initial_theta(self, data: Dataset) -> np.ndarray:
        """Intercept at log of the outcome mean, every slope at zero"""
        theta = np.zeros(self.dim_theta)
        with np.errstate(divide="ignore"):
            theta[0] = np.log(self.response(data).mean())
        return theta

    def jacobians(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        x = self.design(data)
        w = self._jacobian_weights(data, theta)
        return w[:, None, None] * x[:, :, None] * x[:, None, :]

    def jacobian_sum(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        x = self.design(data)
        return x.T @ (self._jacobian_weights(data, theta)[:, None] * x)

    def _jacobian_weights(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LogBinomialScore(_DesignBound):
    """
    Binary outcome with E(Y|x) = exp(x'theta); score x(Y - p)/(1 - p)
    """

    def __init__(self, builder: DesignMatrixBuilder, outcome: str = "y1", label: str = "primary"):
        super().__init__(builder, outcome, label)

    def mean(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        return np.exp(self.design(data) @ theta)

    def scores(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        p = self.mean(data, theta)
        r = (self.response(data) - p) / (1.0 - p)
        return self.design(data) * r[:, None]

    def _jacobian_weights(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        p = self.mean(data, theta)
        return p * (self.response(data) - 1.0) / (1.0 - p) ** 2

    def is_admissible(self, data: Dataset, theta: np.ndarray) -> bool:
        if not np.all(np.isfinite(theta)):
            return False
        with np.errstate(over="ignore"):
            p = self.mean(data, theta)
        return bool(np.all(p < settings.solver_config.admissible_upper))


class MeanResidualScore(_DesignBound):
    """
    Count outcome with E(Y|x) = exp(x'theta); score x(Y - mu)
    """

    def __init__(self, builder: DesignMatrixBuilder, outcome: str = "y2", label: str = "secondary"):
        super().__init__(builder, outcome, label)

    def mean(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        return np.exp(self.design(data) @ theta)

    def scores(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        r = self.response(data) - self.mean(data, theta)
        return self.design(data) * r[:, None]

    def _jacobian_weights(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        return -self.mean(data, theta)

    def is_admissible(self, data: Dataset, theta: np.ndarray) -> bool:
        if not np.all(np.isfinite(theta)):
            return False
        with np.errstate(over="ignore"):
            return bool(np.all(np.isfinite(self.mean(data, theta))))


class StackedSystem(IEstimatingSystem):
    """
    Independent systems stacked into one parameter vector.

    The blocks share no parameters, so they can be solved one at a time; the sandwich
    must still use the full stack to pick up cross-block covariance.
    """

    def __init__(self, systems: Sequence[IEstimatingSystem]):
        self.systems = list(systems)
        bounds = np.cumsum([0] + [s.dim_theta for s in self.systems])
        self._slices = [slice(int(a), int(b)) for a, b in zip(bounds, bounds[1:])]

    @property
    def dim_theta(self) -> int:
        return self._slices[-1].stop

    @property
    def parameter_names(self) -> List[str]:
        return [name for s in self.systems for name in s.parameter_names]

    def blocks(self) -> List[Tuple[slice, IEstimatingSystem]]:
        return list(zip(self._slices, self.systems))

    def offset_of(self, block: int, name: str) -> int:
        """Position in the stacked theta of a named column of one block"""
        system = self.systems[block]
        return self._slices[block].start + system.parameter_names.index(f"{system.label}:{name}")

    def scores(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        return np.hstack([s.scores(data, theta[sl]) for sl, s in self.blocks()])

    def jacobians(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        out = np.zeros((data.n, self.dim_theta, self.dim_theta))
        for sl, s in self.blocks():
            out[:, sl, sl] = s.jacobians(data, theta[sl])
        return out

    def jacobian_sum(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim_theta, self.dim_theta))
        for sl, s in self.blocks():
            out[sl, sl] = s.jacobian_sum(data, theta[sl])
        return out

    def initial_theta(self, data: Dataset) -> np.ndarray:
        return np.concatenate([s.initial_theta(data) for s in self.systems])

    def is_admissible(self, data: Dataset, theta: np.ndarray) -> bool:
        return all(s.is_admissible(data, theta[sl]) for sl, s in self.blocks())


class AugmentedLogRRSystem(IEstimatingSystem):
    """
    Two-arm log relative-risk score minus its projection on auxiliary data.

    theta = (log control risk, log relative risk). The augmentation is
    (T - pi1) * {E[U | aux, T=1] - E[U | aux, T=0]}, with the conditional risks
    E(Y1 | aux, T=t) supplied by `arm_means` and pi1 held at its plug-in value.
    """

    def __init__(self, arm_means, pi1: float):
        self.arm_means = arm_means
        self.pi1 = float(pi1)
        self._cache: Optional[Tuple[Dataset, Tuple[np.ndarray, np.ndarray]]] = None

    @property
    def dim_theta(self) -> int:
        return 2

    @property
    def parameter_names(self) -> List[str]:
        return ["primary:intercept", "primary:t"]

    def _predictions(self, data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
        cache = self._cache
        if cache is not None and cache[0] is data:
            return cache[1]
        predictions = self.arm_means.predict(data)
        self._cache = (data, predictions)
        return predictions

    def scores(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        t = data.t.astype(float)
        y = data.y1.astype(float)
        e1, e0 = self._predictions(data)
        p = np.exp(theta[0] + theta[1] * t)
        p1 = np.exp(theta[0] + theta[1])
        p0 = np.exp(theta[0])

        r = (y - p) / (1.0 - p)
        a1 = (e1 - p1) / (1.0 - p1)
        a0 = (e0 - p0) / (1.0 - p0)
        centred = t - self.pi1
        return np.column_stack([r - centred * (a1 - a0), t * r - centred * a1])

    def jacobians(self, data: Dataset, theta: np.ndarray) -> np.ndarray:
        t = data.t.astype(float)
        y = data.y1.astype(float)
        e1, e0 = self._predictions(data)
        p = np.exp(theta[0] + theta[1] * t)
        p1 = np.exp(theta[0] + theta[1])
        p0 = np.exp(theta[0])

        w = p * (y - 1.0) / (1.0 - p) ** 2
        c1 = p1 * (e1 - 1.0) / (1.0 - p1) ** 2
        c0 = p0 * (e0 - 1.0) / (1.0 - p0) ** 2
        centred = t - self.pi1

        out = np.empty((data.n, 2, 2))
        out[:, 0, 0] = w - centred * (c1 - c0)
        out[:, 0, 1] = w * t - centred * c1
        out[:, 1, 0] = w * t - centred * c1
        out[:, 1, 1] = w * t - centred * c1
        return out

    def initial_theta(self, data: Dataset) -> np.ndarray:
        return np.array([np.log(data.y1.mean()), 0.0])

    def is_admissible(self, data: Dataset, theta: np.ndarray) -> bool:
        if not np.all(np.isfinite(theta)):
            return False
        upper = settings.solver_config.admissible_upper
        return bool(np.exp(theta[0]) < upper and np.exp(theta[0] + theta[1]) < upper)


def two_arm_builder(data: Dataset) -> DesignMatrixBuilder:
    """Intercept and treatment only"""
    return DesignMatrixBuilder((), include_treatment=True).fit(data)
