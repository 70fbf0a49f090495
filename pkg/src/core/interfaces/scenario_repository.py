#!/usr/bin/env python3
"""
Scenario Repository Interface - Contract for scenario presets and their configs
"""

from abc import ABC, abstractmethod
from typing import List, Optional

from ..entities.generator_config import GeneratorConfig, ScenarioPreset


class IScenarioRepository(ABC):
    """Interface for scenario preset storage"""

    @abstractmethod
    def list_presets(self) -> List[ScenarioPreset]:
        """All presets shipped in the preset directory"""
        pass

    @abstractmethod
    def load(self, name_or_path: str) -> ScenarioPreset:
        """Preset by name, or from an explicit file path"""
        pass

    @abstractmethod
    def build_config(self, preset: ScenarioPreset, n: Optional[int] = None) -> GeneratorConfig:
        """Calibrated generator configuration for a preset"""
        pass
