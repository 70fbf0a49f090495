#!/usr/bin/env python3
"""
Simulation Service - Generator and enumeration oracles behind ISimulationService
"""

from ...core.entities.generator_config import GeneratorConfig
from ...core.entities.simulated_cohort import SimulatedCohort
from ...core.interfaces.simulation_service import ISimulationService
from .enumeration import true_beta1_composite
from .generator import generate
from .rng import rep_seed


class CohortSimulator(ISimulationService):
    """Simulated cohorts keyed by (seed, replication index)"""

    def generate(self, config: GeneratorConfig, seed: int, rep_index: int) -> SimulatedCohort:
        return generate(config, seed, rep_index)

    def rep_seed(self, seed: int, rep_index: int) -> int:
        return rep_seed(seed, rep_index)

    def true_beta1(self, config: GeneratorConfig) -> float:
        return true_beta1_composite(config)
