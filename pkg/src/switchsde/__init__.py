"""Simulation and Monte Carlo verification of regime-switching diffusions
with state-dependent switching over countably infinite regime spaces."""

from .engine import (DEFAULT_SEED, EVENT_DRIVEN, FROZEN_RATE, SimConfig,
                     coupled_simulate, run_chain, run_event_driven, simulate,
                     simulate_path, simulate_state_independent,
                     simulate_truncated, step_euler, truncated_model)
from .errors import (ConfigError, InvalidModelError, NumericalBlowupError,
                     StiffSwitchingWarning, UnsupportedSchemeError)
from .estimators import (BoundReport, FirstJumpEstimate, GapEstimate,
                         McEstimate, chain_marginal_check,
                         discontinuity_certificate, displacement_lipschitz_sweep,
                         feller_modulus, first_jump_estimate, gap_trend_pass,
                         gauss_function, harnack_check, harnack_sweep,
                         harnack_sweep_summary, holding_time_check,
                         mc_from_values, moment_bound_check,
                         second_moment_envelope, semigroup_estimate,
                         truncation_exit_bound_check,
                         truncation_identity_check, wilson_lower)
from .markov import holding_probability, transition_matrix
from .models import (HARNACK_PREREQUISITES, AssumptionReport, ModelSpec,
                     SamplingPlan, U_CLASSES, UClassFn, apply_diffusion,
                     check_assumptions, linear_switching_model,
                     reciprocal_mass, zoo)
from .noise import LANE_EULER, LANE_JUMP, NoiseStream
from .qmatrix import (DominatingChainSpec, IntervalEntry, IntervalPartition,
                      QMatrixSpec, build_partition, displacement,
                      displacement_lp_bound, displacement_lp_distance,
                      dominating_chain_generator, random_banded_q,
                      smooth_cutoff, truncate_q)
from .trajectory import JumpRecord, Trajectory, from_binary

__version__ = "0.1.0"
