#!/usr/bin/env python3
"""
Simulation Service Interface - Contract for cohort generation and its exact oracles
"""

from abc import ABC, abstractmethod

from ..entities.generator_config import GeneratorConfig
from ..entities.simulated_cohort import SimulatedCohort


class ISimulationService(ABC):
    """Interface for the data-generating process"""

    @abstractmethod
    def generate(self, config: GeneratorConfig, seed: int, rep_index: int) -> SimulatedCohort:
        """Cohort for one replication; a pure function of its arguments"""
        pass

    @abstractmethod
    def rep_seed(self, seed: int, rep_index: int) -> int:
        """Recorded identifier of the replication's random stream"""
        pass

    @abstractmethod
    def true_beta1(self, config: GeneratorConfig) -> float:
        """Interventional log relative risk of the composite primary outcome"""
        pass
