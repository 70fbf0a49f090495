#!/usr/bin/env python3
"""
Preset Repository - Scenario files (flat KEY=VALUE) and the shipped A-probability table
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from dotenv import dotenv_values
from pydantic import ValidationError as PydanticValidationError

from ...core.entities.errors import InvalidConfig, InvalidScenario
from ...core.entities.generator_config import (
    DEFAULT_AGE_LEVELS,
    DEFAULT_SITE_LEVELS,
    GeneratorConfig,
    ScenarioPreset,
    broadcast,
)
from ...core.interfaces.scenario_repository import IScenarioRepository
from ..config.settings import settings
from .enumeration import calibrate_intercepts

logger = logging.getLogger(__name__)

PRESET_SUFFIX = ".env"


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


# File key -> (ScenarioPreset field, parser)
PRESET_KEYS = {
    "SCENARIO": ("name", str),
    "DESIGN": ("design", str.lower),
    "N": ("n", int),
    "TARGETED_TYPES": ("targeted_types", _ints),
    "TARGET_INCIDENCES": ("target_incidences", _floats),
    "A_VALUES": ("a_values", _floats),
    "A_PROBS_FILE": ("a_probs_file", str),
    "TREATMENT_PARAMS": ("treatment_params", _floats),
    "BETA1": ("beta1", _floats),
    "ALPHA1": ("alpha1", _floats),
    "LAMBDA_SITE": ("lambda_site", _floats),
    "N_NT": ("n_nt", int),
    "MU2_SPREAD": ("mu2_spread", float),
    "ALPHA2": ("alpha2", float),
    "MU_SITE": ("mu_site", _floats),
    "BETA2": ("beta2", _floats),
    "TARGET_MEAN_Y2": ("target_mean_y2", float),
    "DESCRIPTION": ("description", str),
}

# Starting intercept before calibration; small enough to satisfy the validity bound
_PLACEHOLDER_INTERCEPT = -10.0


def parse_preset(path: Path) -> ScenarioPreset:
    """Read one preset file"""
    values = dotenv_values(path)
    fields: Dict[str, Any] = {"name": path.stem, "path": path}
    for key, raw in values.items():
        if key not in PRESET_KEYS:
            raise InvalidScenario(f"{path.name}: unknown key '{key}'")
        field_name, parser = PRESET_KEYS[key]
        try:
            fields[field_name] = parser((raw or "").strip())
        except ValueError:
            raise InvalidScenario(f"{path.name}: cannot parse {key}={raw!r}") from None
    if "design" not in fields:
        raise InvalidScenario(f"{path.name}: DESIGN is required")
    try:
        return ScenarioPreset(**fields)
    except PydanticValidationError as e:
        raise InvalidScenario(f"{path.name}: {e.errors()[0].get('msg', e)}") from None


def load_a_probs(path: Path) -> tuple:
    """
    Rows (p_low, p_medium, p_high) ordered by site, then age, matching the default grid
    """
    if not path.is_file():
        raise InvalidScenario(f"A-probability table not found: {path}")
    table = pd.read_csv(path)
    expected = {"site", "age", "p_low", "p_medium", "p_high"}
    if not expected <= set(table.columns):
        raise InvalidScenario(f"{path.name} needs columns {sorted(expected)}")
    table = table.sort_values(["site", "age"], kind="stable")
    grid = [(s, a) for s in DEFAULT_SITE_LEVELS for a in DEFAULT_AGE_LEVELS]
    found = list(zip(table["site"].astype(int), table["age"].astype(float)))
    if found != grid:
        raise InvalidScenario(f"{path.name} must list every (site, age) cell of the grid exactly once")
    return tuple(tuple(row) for row in table[["p_low", "p_medium", "p_high"]].to_numpy(dtype=float))


class PresetRepository(IScenarioRepository):
    """Scenario presets stored as flat KEY=VALUE files in one directory"""

    def __init__(self, preset_dir: Optional[Path] = None):
        self.preset_dir = Path(preset_dir or settings.preset_config.preset_dir)

    def list_presets(self) -> List[ScenarioPreset]:
        if not self.preset_dir.is_dir():
            raise InvalidScenario(f"preset directory not found: {self.preset_dir}")
        return [parse_preset(path) for path in sorted(self.preset_dir.glob(f"*{PRESET_SUFFIX}"))]

    def load(self, name_or_path: str) -> ScenarioPreset:
        candidate = Path(name_or_path)
        if candidate.is_file():
            return parse_preset(candidate)
        named = self.preset_dir / f"{name_or_path}{PRESET_SUFFIX}"
        if named.is_file():
            return parse_preset(named)
        available = ", ".join(p.stem for p in sorted(self.preset_dir.glob(f"*{PRESET_SUFFIX}")))
        raise InvalidScenario(f"unknown scenario '{name_or_path}' (available: {available})")

    def build_config(self, preset: ScenarioPreset, n: Optional[int] = None) -> GeneratorConfig:
        """
        Generator config for a preset with mu1 calibrated to the target incidences and
        the non-targeted intercepts shifted to the target mean of y2
        """
        base_dir = preset.path.parent if preset.path else self.preset_dir
        a_probs = load_a_probs(base_dir / preset.a_probs_file)
        k = len(preset.targeted_types)
        spread = np.linspace(-preset.mu2_spread, preset.mu2_spread, preset.n_nt)

        try:
            config = GeneratorConfig.create(
                name=preset.name,
                n=n or preset.n,
                design=preset.design,
                n_nt=preset.n_nt,
                a_values=preset.a_values,
                a_probs=a_probs,
                treatment_params=preset.treatment_params,
                targeted_types=preset.targeted_types,
                mu1=(_PLACEHOLDER_INTERCEPT,) * k,
                beta1=broadcast(preset.beta1, k),
                alpha1=broadcast(preset.alpha1, k),
                lambda_site=(preset.lambda_site,) * k,
                mu2=tuple(float(_PLACEHOLDER_INTERCEPT + s) for s in spread),
                beta2=broadcast(preset.beta2, preset.n_nt),
                alpha2=(preset.alpha2,) * preset.n_nt,
                mu_site=(preset.mu_site,) * preset.n_nt,
            )
        except InvalidConfig as e:
            raise InvalidScenario(f"scenario '{preset.name}': {e}") from None
        return calibrate_intercepts(config, preset.target_incidences, preset.target_mean_y2)
