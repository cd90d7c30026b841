"""Gliders cellular automata: particle entry times, walk oracles and factor maps."""
__version__ = "0.1.0"

from .ca import (GLIDERS_ALPHABET, ConfigurationWindow, GlidersRule, LocalRule, decode, encode,
                 evolve, evolve_rows, gliders_local_rule, read_pgm, render_ascii, simulate, step,
                 write_pgm)
from .walks import (SparseTable, WalkPath, particle_at, particle_row, particles_from_walks,
                    partial_sums, rescaled_walk, walks_from_cells)
from .measures import (MixDiagnostics, SamplerSpec, estimate_asymptotic_variance, sample_cells,
                       sample_window)
from .entrytime import (EmpiricalCDF, EntryTimeResult, Projection, birkhoff_asymmetry_check,
                        entry_time, entry_time_by_simulation, run_cdf_experiment,
                        sample_entry_times, theoretical_cdf)
from .factors import (CommutationReport, FactorSpec, SftSpec, builtin_factor, captive_rule,
                      commutation_check, cyclic3_rule, defect_projection, lifted_cdf_experiment,
                      product_rule, traffic_rule)
from .oracle import (IncrementSpec, MinimaComparisonParams, brownian_min_density,
                     minima_comparison_probability, simulate_minima_comparison)
from .config import ConfigError, ExperimentConfig, parse_config
from .kernels import BACKEND_NAME
