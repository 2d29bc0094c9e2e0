"""Partial offloading and resource allocation for mmWave train-ground MEC.

A rooftop mobile relay (MR) on the train either executes offloaded tasks
itself or forwards them over a full-duplex mmWave backhaul to a trackside
base station (BS). See the README for the model and the demos/ scripts
for narrated walk-throughs.
"""
from .scenario import (
    ConfigError, Scenario, SystemConfig, UserInstance, generate_scenario, load_config,
    make_scenario, validate_config,
)
from .channel import LinkTable, shannon_rate
from .offload import (
    Destination, SegmentationDecision, lambda_opt, optimal_local_frequency,
    optimal_mr_power, segment,
)
from .matching import MatchingState, ResourceKey, blocking_pairs, is_stable
from .model import Evaluator
from .raco import Assignment, run_raco
from .energy_guard import enforce_budget
from .baselines import SCHEMES, run_jpora, run_jraco, run_ro, run_runp, run_scheme, run_usra
from .constraints import check_assignment
from .experiment import SweepReport, SweepSpec, aggregate, preset, run_sweep

__version__ = "0.1.0"
