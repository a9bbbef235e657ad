# -*- coding: utf-8 -*-
"""Implicit solver for the singular parabolic p-Laplacian and trajectory tools."""

from wienerlab.pde.manufactured import (
    AuxiliaryProblem,
    ConvergenceReport,
    ManufacturedSolution,
    auxiliary_problem,
    manufactured_convergence,
)
from wienerlab.pde.solver import ImplicitStepper, SolverSettings, solve_cauchy_dirichlet, step, time_grid
from wienerlab.pde.structure import FluxModel, StructureParams
from wienerlab.pde.trajectory import Trajectory, ess_osc, load_checkpoint
from wienerlab.pde.truncation import TruncationResult, lateral_extremes, truncate_and_extend

__all__ = [
    "AuxiliaryProblem",
    "ConvergenceReport",
    "FluxModel",
    "ImplicitStepper",
    "ManufacturedSolution",
    "SolverSettings",
    "StructureParams",
    "Trajectory",
    "TruncationResult",
    "auxiliary_problem",
    "ess_osc",
    "lateral_extremes",
    "load_checkpoint",
    "manufactured_convergence",
    "solve_cauchy_dirichlet",
    "step",
    "time_grid",
    "truncate_and_extend",
]
