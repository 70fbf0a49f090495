#!/usr/bin/env python3
"""
Configuration Settings - Solver tolerances, bootstrap, study and preset defaults
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

_REPO_ROOT = Path(__file__).resolve().parents[3]


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


@dataclass
class SolverConfig:
    """Newton solver for estimating equations"""
    rel_tolerance: float = field(default_factory=lambda: _env_float("NCO_SOLVER_REL_TOL", 1e-10))
    abs_tolerance: float = field(default_factory=lambda: _env_float("NCO_SOLVER_ABS_TOL", 1e-8))
    max_iterations: int = field(default_factory=lambda: _env_int("NCO_SOLVER_MAX_ITER", 100))
    max_halvings: int = field(default_factory=lambda: _env_int("NCO_SOLVER_MAX_HALVINGS", 30))
    # exp(linear predictor) must stay below this for log-link binary scores
    admissible_upper: float = 1.0 - 1e-10

    def tolerance_for(self, n: int) -> float:
        """Score max-norm tolerance: the looser of relative-to-n and absolute"""
        return max(self.rel_tolerance * n, self.abs_tolerance)


@dataclass
class BootstrapConfig:
    """Nonparametric bootstrap for the Mantel-Haenszel-type estimators"""
    replicates: int = field(default_factory=lambda: _env_int("NCO_BOOTSTRAP_REPLICATES", 500))
    seed: int = field(default_factory=lambda: _env_int("NCO_BOOTSTRAP_SEED", 20210601))
    workers: int = field(default_factory=lambda: _env_int("NCO_BOOTSTRAP_WORKERS", 1))


@dataclass
class StudyConfig:
    """Desk-scale simulation study defaults"""
    n: int = field(default_factory=lambda: _env_int("NCO_STUDY_N", 5000))
    reps: int = field(default_factory=lambda: _env_int("NCO_STUDY_REPS", 1000))
    seed: int = field(default_factory=lambda: _env_int("NCO_STUDY_SEED", 1))
    workers: int = field(default_factory=lambda: _env_int("NCO_STUDY_WORKERS", 1))
    output_dir: str = field(default_factory=lambda: os.getenv("NCO_OUTPUT_DIR", "results"))


@dataclass
class PresetConfig:
    """Where scenario files live"""
    preset_dir: Path = field(
        default_factory=lambda: Path(os.getenv("NCO_PRESET_DIR", str(_REPO_ROOT / "config" / "presets")))
    )


class Settings:
    """Main settings class"""

    def __init__(self):
        self.solver_config = SolverConfig()
        self.bootstrap_config = BootstrapConfig()
        self.study_config = StudyConfig()
        self.preset_config = PresetConfig()
        self.ci_level = _env_float("NCO_CI_LEVEL", 0.95)
        self.log_level = os.getenv("NCO_LOG_LEVEL", "INFO")

    def describe(self) -> Dict[str, Any]:
        """Flat view of the active configuration"""
        return {
            "solver": vars(self.solver_config),
            "bootstrap": vars(self.bootstrap_config),
            "study": vars(self.study_config),
            "preset_dir": str(self.preset_config.preset_dir),
            "ci_level": self.ci_level,
            "log_level": self.log_level,
        }


# Global settings instance
settings = Settings()
