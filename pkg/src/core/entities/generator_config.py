#!/usr/bin/env python3
"""
GeneratorConfig Entity - Parameters of the simulated cohort and its scenario presets

Risks are log-linear in treatment, age and site and scaled by the unmeasured
multiplier A:
    P(Y1^(j) = 1 | T, A, W) = A exp(mu1_j + beta1_j T + alpha1_j age + lambda_j[site])
    P(Y2^(j) = 1 | T, A, W) = A exp(mu2_j + beta2_j T + alpha2_j age + mu_site_j[site])
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from .errors import InvalidConfig

DEFAULT_AGE_LEVELS: Tuple[float, ...] = tuple(15.0 + 0.5 * i for i in range(13))
DEFAULT_SITE_LEVELS: Tuple[int, ...] = (0, 1, 2)

# Probabilities within this distance of 1 still count as valid Bernoulli parameters
_VALIDITY_SLACK = 1e-12


class StudyDesign(str, Enum):
    """How treatment is assigned"""
    RANDOMIZED = "randomized"
    OBSERVATIONAL = "observational"


class GeneratorConfig(BaseModel):
    """
    Complete data-generating process for one scenario.

    `a_probs` lists P(A = a_low, a_medium, a_high | site, age) with sites outermost,
    i.e. row index = site_index * len(age_levels) + age_index. Per-type site effects
    are one tuple per type with one value per site level.
    """
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    n: int = Field(default=5000, ge=1)
    design: StudyDesign = StudyDesign.RANDOMIZED
    n_nt: int = Field(default=20, ge=1)
    site_levels: Tuple[int, ...] = DEFAULT_SITE_LEVELS
    age_levels: Tuple[float, ...] = DEFAULT_AGE_LEVELS
    a_values: Tuple[float, float, float] = (0.0, 1.0, 2.0)
    a_probs: Tuple[Tuple[float, float, float], ...]
    treatment_params: Tuple[float, float, float, float] = (-4.9, 0.2, 0.3, 0.35)

    targeted_types: Tuple[int, ...] = (16, 18)
    mu1: Tuple[float, ...]
    beta1: Tuple[float, ...]
    alpha1: Tuple[float, ...]
    lambda_site: Tuple[Tuple[float, ...], ...]

    mu2: Tuple[float, ...]
    beta2: Tuple[float, ...]
    alpha2: Tuple[float, ...]
    mu_site: Tuple[Tuple[float, ...], ...]

    @classmethod
    def create(cls, **fields: Any) -> "GeneratorConfig":
        """Validated construction; every failure surfaces as InvalidConfig"""
        try:
            return cls(**fields)
        except PydanticValidationError as e:
            raise InvalidConfig(_first_message(e)) from None

    def with_updates(self, **changes: Any) -> "GeneratorConfig":
        return GeneratorConfig.create(**{**self.model_dump(), **changes})

    @model_validator(mode="after")
    def _check(self) -> "GeneratorConfig":
        n_types = len(self.targeted_types)
        n_sites = len(self.site_levels)
        for field_name in ("mu1", "beta1", "alpha1", "lambda_site"):
            if len(getattr(self, field_name)) != n_types:
                raise ValueError(f"{field_name} needs one entry per targeted type ({n_types})")
        for field_name in ("mu2", "beta2", "alpha2", "mu_site"):
            if len(getattr(self, field_name)) != self.n_nt:
                raise ValueError(f"{field_name} needs one entry per non-targeted type ({self.n_nt})")
        for field_name in ("lambda_site", "mu_site"):
            if any(len(effects) != n_sites for effects in getattr(self, field_name)):
                raise ValueError(f"{field_name} needs one value per site level ({n_sites})")

        if min(self.a_values) < 0:
            raise ValueError(f"a_values must be nonnegative, got {self.a_values}")
        probs = np.asarray(self.a_probs, dtype=float)
        if probs.shape != (n_sites * len(self.age_levels), 3):
            raise ValueError(f"a_probs needs {n_sites * len(self.age_levels)} rows of 3 probabilities")
        if np.any(probs < 0) or np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("every a_probs row must be nonnegative and sum to 1")

        for t in (0, 1):
            for j in range(n_types):
                worst = float(self.primary_risk(j, t).max())
                if worst > 1.0 + _VALIDITY_SLACK:
                    raise ValueError(f"type {self.targeted_types[j]} risk reaches {worst:.4f} > 1 (T={t})")
            for j in range(self.n_nt):
                worst = float(self.secondary_risk(j, t).max())
                if worst > 1.0 + _VALIDITY_SLACK:
                    raise ValueError(f"non-targeted type {j + 1} risk reaches {worst:.4f} > 1 (T={t})")
        if self.design is StudyDesign.OBSERVATIONAL:
            worst = float(self.treatment_probability().max())
            if worst > 1.0 + _VALIDITY_SLACK:
                raise ValueError(f"treatment probability reaches {worst:.4f} > 1")
        return self

    # Arrays over the finite (site, age, A) grid, shape (sites, ages, 3)

    def grid(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable site values, ages and A multipliers"""
        sites = np.asarray(self.site_levels, dtype=float)[:, None, None]
        ages = np.asarray(self.age_levels, dtype=float)[None, :, None]
        a = np.asarray(self.a_values, dtype=float)[None, None, :]
        return sites, ages, a

    def a_prob_table(self) -> np.ndarray:
        return np.asarray(self.a_probs, dtype=float).reshape(len(self.site_levels), len(self.age_levels), 3)

    def cell_weights(self) -> np.ndarray:
        """P(site, age, A): W uniform over its grid, A | W from a_probs"""
        return self.a_prob_table() / (len(self.site_levels) * len(self.age_levels))

    def _site_effect(self, effects: Tuple[float, ...]) -> np.ndarray:
        return np.asarray(effects, dtype=float)[:, None, None]

    def primary_risk(self, j: int, t: int, intercept: Optional[float] = None) -> np.ndarray:
        _, ages, a = self.grid()
        mu = self.mu1[j] if intercept is None else intercept
        return a * np.exp(mu + self.beta1[j] * t + self.alpha1[j] * ages + self._site_effect(self.lambda_site[j]))

    def secondary_risk(self, j: int, t: int, intercept: Optional[float] = None) -> np.ndarray:
        _, ages, a = self.grid()
        mu = self.mu2[j] if intercept is None else intercept
        return a * np.exp(mu + self.beta2[j] * t + self.alpha2[j] * ages + self._site_effect(self.mu_site[j]))

    def composite_risk(self, t: int) -> np.ndarray:
        """P(infected by at least one targeted type), types independent given (T, A, W)"""
        escape = np.ones((len(self.site_levels), len(self.age_levels), 3))
        for j in range(len(self.targeted_types)):
            escape = escape * (1.0 - self.primary_risk(j, t))
        return 1.0 - escape

    def treatment_kernel(self) -> np.ndarray:
        gamma, delta, eta, theta = self.treatment_params
        sites, ages, a = self.grid()
        return 1.0 / (1.0 + np.exp(-(gamma + delta * ages + eta * sites + theta * a)))

    def treatment_probability(self) -> np.ndarray:
        """P(T=1 | A, W); the observational kernel is rescaled to a marginal of 0.5"""
        shape = (len(self.site_levels), len(self.age_levels), 3)
        if self.design is StudyDesign.RANDOMIZED:
            return np.full(shape, 0.5)
        kernel = self.treatment_kernel()
        return 0.5 * kernel / float(np.sum(self.cell_weights() * kernel))


class ScenarioPreset(BaseModel):
    """
    A named scenario as stored in a preset file; intercepts are calibrated from the
    target incidences when the preset is turned into a GeneratorConfig.
    """
    model_config = ConfigDict(frozen=True)

    name: str
    design: StudyDesign
    target_incidences: Tuple[float, ...] = (0.05, 0.05)
    a_values: Tuple[float, float, float] = (0.0, 1.0, 2.0)
    n: int = Field(default=5000, ge=1)
    targeted_types: Tuple[int, ...] = (16, 18)
    treatment_params: Tuple[float, float, float, float] = (-4.9, 0.2, 0.3, 0.35)
    beta1: Tuple[float, ...] = (float(np.log(0.5)),)
    alpha1: Tuple[float, ...] = (0.15,)
    lambda_site: Tuple[float, ...] = (-0.2, 0.0, 0.2)
    n_nt: int = Field(default=20, ge=1)
    mu2_spread: float = 0.5
    alpha2: float = 0.02
    mu_site: Tuple[float, ...] = (0.2, 0.0, -0.2)
    beta2: Tuple[float, ...] = (0.0,)
    target_mean_y2: float = Field(default=1.75, gt=0)
    a_probs_file: str = "a_probs_default.csv"
    description: str = ""
    path: Optional[Path] = None

    @model_validator(mode="after")
    def _check(self) -> "ScenarioPreset":
        if len(self.target_incidences) != len(self.targeted_types):
            raise ValueError("target_incidences needs one value per targeted type")
        if not all(0.0 < p < 1.0 for p in self.target_incidences):
            raise ValueError("target incidences must lie in (0, 1)")
        for field_name, size in (("beta1", len(self.targeted_types)), ("alpha1", len(self.targeted_types)),
                                 ("beta2", self.n_nt)):
            if len(getattr(self, field_name)) not in (1, size):
                raise ValueError(f"{field_name} needs 1 or {size} values")
        return self

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "design": self.design.value,
            "target_incidences": list(self.target_incidences),
            "a_values": list(self.a_values),
            "path": str(self.path) if self.path else "",
        }


def broadcast(values: Tuple[float, ...], size: int) -> Tuple[float, ...]:
    """Repeat a single value `size` times; longer tuples pass through"""
    return tuple(values) * size if len(values) == 1 else tuple(values)


def _first_message(error: PydanticValidationError) -> str:
    details = error.errors()
    if not details:
        return str(error)
    first = details[0]
    where = ".".join(str(p) for p in first.get("loc", ()))
    message = first.get("msg", str(error)).removeprefix("Value error, ")
    return f"{where}: {message}" if where else message
