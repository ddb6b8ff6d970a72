"""Homogenized limit models for non-isothermal Darcy-Brinkman flow in rough thin films."""

from ._cg import ConvergenceError
from .cell_critical import (CriticalCellSolution, assemble_tensor_critical, solve_cell_brinkman,
                            solve_cell_temperature)
from .cell_subcritical import (SubcriticalCellSolution, assemble_tensor_subcritical,
                               effective_tensor_subcritical, solve_cell_subcritical, solve_corrector)
from .params import CellGrid, MacroGrid, PhysicalParams, RoughnessProfile, eval_h, make_params
from .pipeline import RunConfig, config_from_dict, load_config, run_pipeline
from .profile import flow_factor, profile_coeffs, profile_dz3, profile_velocity
from .reconstruct import (ReconstructedFields, averages_critical, averages_smooth, averages_subcritical,
                          reconstruct_temperature_subcritical, reconstruct_velocity_subcritical,
                          smooth_temperature, smooth_velocity)
from .reynolds import MacroForcing, MacroPressure, average_velocity, mobility, solve_pressure
from .tensor import EffectiveTensor

__all__ = [
    "CellGrid", "ConvergenceError", "CriticalCellSolution", "EffectiveTensor", "MacroForcing",
    "MacroGrid", "MacroPressure", "PhysicalParams", "ReconstructedFields", "RoughnessProfile",
    "RunConfig", "SubcriticalCellSolution", "assemble_tensor_critical", "assemble_tensor_subcritical",
    "average_velocity", "averages_critical", "averages_smooth", "averages_subcritical",
    "config_from_dict", "effective_tensor_subcritical", "eval_h", "flow_factor", "load_config",
    "make_params", "mobility", "profile_coeffs", "profile_dz3", "profile_velocity",
    "reconstruct_temperature_subcritical", "reconstruct_velocity_subcritical", "run_pipeline",
    "smooth_temperature", "smooth_velocity", "solve_cell_brinkman", "solve_cell_subcritical",
    "solve_cell_temperature", "solve_corrector", "solve_pressure",
]
