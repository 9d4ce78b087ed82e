"""Evolutionary search for highly nonlinear Boolean functions of odd dimension."""
from .core import (
    OrbitTable,
    TruthTable,
    WalshSpectrum,
    covering_radius_bound,
    enumerate_orbits,
    expand_rs,
    is_balanced,
    is_rotation_symmetric,
    nonlinearity,
    odd_upper_bound,
    orbit_count,
    parse_truth_table,
    quadratic_bound,
    walsh_transform,
)
from .evolution import RunRecord, SstConfig, run_fp_sst, run_sst
from .harness import ExperimentConfig, SummaryStats, read_csv, run_experiment, summarize
from .fitness import FitnessValue, fitness_construction, fitness_nl
from .problems import make_problem

__version__ = "0.1.0"
