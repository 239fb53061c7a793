"""
Application layer - Modeling, synthesis and analysis procedures.

This layer contains the numerical kernels and the procedures that build plants,
synthesize and reduce controllers, analyze and simulate closed loops.
It depends only on the Domain layer.
"""

from .analysis import close_loop, delay_margin, gain_sensitivity, pade_block, stability_fraction, sweep_eigen
from .baselines import make_pi_baseline, make_truncated_central
from .disturbances import from_samples, gen_regd_like, load_step, square_wave, step_profile, validation_step
from .experiments import (
    communication_failure_study,
    compare_cases,
    delay_stress,
    design,
    pade_fidelity,
    run_case,
    run_report,
    run_weighting_study,
    simulate,
    uncertainty_study,
)
from .generalized_plant import make_centralized_plant, make_generalized_plant, regularize
from .grid_model import build_plant, perturb
from .hinf_synthesis import check_feasibility, gamma_iterate
from .model_reduction import balance, reduce_controllers, select_order, truncate
from .numerics import hinf_norm, solve_are, solve_lyapunov, zoh_discretize
from .simulation import simulate_closed_loop
from .strategies import DecentralizedHinf, DroopOnly, PiBaseline, TruncatedCentral, strategy_for

__all__ = [
    # Numerics
    "hinf_norm",
    "solve_are",
    "solve_lyapunov",
    "zoh_discretize",
    # Plant
    "build_plant",
    "perturb",
    "make_generalized_plant",
    "make_centralized_plant",
    "regularize",
    # Synthesis
    "check_feasibility",
    "gamma_iterate",
    "make_pi_baseline",
    "make_truncated_central",
    # Reduction
    "balance",
    "truncate",
    "select_order",
    "reduce_controllers",
    # Analysis
    "pade_block",
    "close_loop",
    "sweep_eigen",
    "delay_margin",
    "gain_sensitivity",
    "stability_fraction",
    # Simulation
    "step_profile",
    "load_step",
    "validation_step",
    "square_wave",
    "gen_regd_like",
    "from_samples",
    "simulate_closed_loop",
    # Strategies and experiments
    "DroopOnly",
    "DecentralizedHinf",
    "PiBaseline",
    "TruncatedCentral",
    "strategy_for",
    "design",
    "run_case",
    "simulate",
    "compare_cases",
    "communication_failure_study",
    "uncertainty_study",
    "delay_stress",
    "pade_fidelity",
    "run_weighting_study",
    "run_report",
]
