"""Layout evaluation and placement optimization for submerged WEC arrays."""

from .baselines import MutationSchedule, run_de, run_one_plus_one_ea, run_random_search
from .climate import (QFactorReport, SeaState, WaveScenario, annual_average_power,
                      bretschneider_spectrum, builtin_scenario, isolated_annual_power,
                      load_scenario, q_factor, sea_state_power, simplified_scenario)
from .fitness import (EvaluationBudget, FarmArea, FitnessReport, LayoutEvaluator,
                      evaluate_layout, farm_side, penalized_fitness, violation_sum)
from .harness import (ExperimentConfig, RunRecord, SummaryStats, export_energy_field,
                      probe_power, run_experiment, summarize, wilcoxon_one_tailed)
from .heuristics import (HeuristicConfig, HeuristicRun, place_first_buoy, run_isls,
                         run_isls2, run_sls, sample_sector)
from .hydro import (HydroCoefficients, Layout, MotionSolution, PointAbsorberKernel,
                    PowerBreakdown, WecParameters, dispersion_wavenumber,
                    farm_power_regular, kernel_matrices, regular_wave_power,
                    solve_motion)
from .landscape import (SearchSector, SurrogateLandscape, build_two_buoy_landscape,
                        extract_search_sectors, load_landscape, save_landscape,
                        two_buoy_power_map)
from .refiners import (RefinerResult, constrained_descent, fd_gradient,
                       max_distance_point, nelder_mead)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
