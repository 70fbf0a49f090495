#!/usr/bin/env python3
"""
Plot Data Use Case - Long-format estimate distributions for external plotting
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import pandas as pd

from ..entities.errors import MalformedInput
from ..entities.study_records import STATUS_OK

logger = logging.getLogger(__name__)

PLOT_COLUMNS = ["scenario", "n", "method", "beta1_hat"]
# `method` value of the per-scenario row carrying the true composite log relative risk
REFERENCE_METHOD = "true_beta1"


class PlotDataUseCase:
    """Use case turning reps.csv into plotting input"""

    def emit_plot_data(
        self,
        reps_path: Union[str, Path],
        out_path: Union[str, Path],
        methods: Optional[Sequence[str]] = None,
    ) -> pd.DataFrame:
        """
        One row per successful (rep, method) estimate plus one reference row per
        (scenario, n) holding the true value.

        Raises:
            MalformedInput: unreadable file, missing columns, inconsistent true values
                or an empty selection of methods
        """
        reps_path = Path(reps_path)
        try:
            reps = pd.read_csv(reps_path)
        except (FileNotFoundError, pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise MalformedInput(f"cannot read {reps_path}: {e}")
        required = {"scenario", "n", "method", "status", "beta1_hat", "true_beta1"}
        missing = required - set(reps.columns)
        if missing:
            raise MalformedInput(f"{reps_path.name} lacks columns {sorted(missing)}")

        if methods is not None:
            methods = [m.strip() for m in methods if m.strip()]
            if not methods:
                raise MalformedInput("empty method selection")
            unknown = sorted(set(methods) - set(reps["method"]))
            if unknown:
                raise MalformedInput(f"methods not present in {reps_path.name}: {unknown}")
            reps = reps[reps["method"].isin(methods)]

        estimates = reps[reps["status"] == STATUS_OK][PLOT_COLUMNS]
        if estimates.empty:
            raise MalformedInput(f"{reps_path.name} holds no successful estimates for the selected methods")

        truths = reps.groupby(["scenario", "n"], sort=False)["true_beta1"].agg(["min", "max"])
        if (truths["max"] - truths["min"]).abs().max() > 1e-12:
            raise MalformedInput("true_beta1 varies within a scenario")
        reference = truths["min"].rename("beta1_hat").reset_index()
        reference["method"] = REFERENCE_METHOD

        frame = pd.concat([estimates, reference[PLOT_COLUMNS]], ignore_index=True)
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out_path, index=False)
        logger.info("wrote %d estimate rows and %d reference rows to %s", len(estimates), len(reference), out_path)
        return frame
