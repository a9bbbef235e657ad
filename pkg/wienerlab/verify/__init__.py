# -*- coding: utf-8 -*-
"""Verification experiments: boundary decay, Harnack-type estimates, extinction and Holder decay."""

from wienerlab.verify.criteria import DEFAULT_CRITERIA, Criteria
from wienerlab.verify.decay import VerifierReport, verify_boundary_decay, verify_with_refinement
from wienerlab.verify.experiment import ExperimentConfig, ExperimentValidator, validate_experiment
from wienerlab.verify.extinction import ExtinctionConfig, ExtinctionReport, check_extinction_window
from wienerlab.verify.fitting import LinearFit, RefinementResult, fit_line, refinement_check
from wienerlab.verify.harnack import (
    HarnackCheckConfig,
    HarnackSuiteReport,
    check_harnack_type,
    check_l1_harnack,
    check_lower_bound,
    check_measure_density,
    run_harnack_suite,
)
from wienerlab.verify.holder import HolderReport, check_pfat_holder

__all__ = [
    "Criteria",
    "DEFAULT_CRITERIA",
    "ExperimentConfig",
    "ExperimentValidator",
    "ExtinctionConfig",
    "ExtinctionReport",
    "HarnackCheckConfig",
    "HarnackSuiteReport",
    "HolderReport",
    "LinearFit",
    "RefinementResult",
    "VerifierReport",
    "check_extinction_window",
    "check_harnack_type",
    "check_l1_harnack",
    "check_lower_bound",
    "check_measure_density",
    "check_pfat_holder",
    "fit_line",
    "refinement_check",
    "run_harnack_suite",
    "validate_experiment",
    "verify_boundary_decay",
    "verify_with_refinement",
]
