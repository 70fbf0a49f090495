#!/usr/bin/env python3
"""
Main Application Composition Root - Dependency Injection Setup
"""

import logging
from typing import Any, Dict

from ..core.use_cases.dataset_analysis import DatasetAnalysisUseCase
from ..core.use_cases.plot_data import PlotDataUseCase
from ..core.use_cases.simulation_study import SimulationStudyUseCase
from ..infrastructure.config.settings import settings
from ..infrastructure.data_services.csv_repository import CsvDatasetRepository
from ..infrastructure.estimation_services.estimation_service import EstimationService
from ..infrastructure.simulation_services.preset_repository import PresetRepository
from ..infrastructure.simulation_services.simulation_service import CohortSimulator

logger = logging.getLogger(__name__)


class Application:
    """Main application composition root"""

    def __init__(self):
        self._initialize_dependencies()
        self._create_use_cases()

    def _initialize_dependencies(self):
        """Initialize all dependencies with dependency injection"""
        self.dataset_repository = CsvDatasetRepository()
        self.scenario_repository = PresetRepository(settings.preset_config.preset_dir)
        self.simulation_service = CohortSimulator()
        self.estimation_service = EstimationService(settings.solver_config, settings.bootstrap_config)

    def _create_use_cases(self):
        """Create use cases with injected dependencies"""
        self.dataset_analysis_use_case = DatasetAnalysisUseCase(
            dataset_repository=self.dataset_repository,
            estimation_service=self.estimation_service,
        )
        self.simulation_study_use_case = SimulationStudyUseCase(
            scenario_repository=self.scenario_repository,
            simulation_service=self.simulation_service,
            estimation_service=self.estimation_service,
            dataset_repository=self.dataset_repository,
        )
        self.plot_data_use_case = PlotDataUseCase()
        logger.debug("use cases initialized")

    def get_analysis_use_case(self) -> DatasetAnalysisUseCase:
        return self.dataset_analysis_use_case

    def get_study_use_case(self) -> SimulationStudyUseCase:
        return self.simulation_study_use_case

    def get_plot_data_use_case(self) -> PlotDataUseCase:
        return self.plot_data_use_case

    def get_scenario_repository(self) -> PresetRepository:
        return self.scenario_repository

    def get_service_status(self) -> Dict[str, Any]:
        """Active configuration, logged at DEBUG level on startup"""
        return settings.describe()


# Global application instance
app = Application()
