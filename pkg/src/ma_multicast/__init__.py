"""Joint movable-antenna placement and multicast beamforming optimizer."""

from .blocks import (AlgorithmState, InfeasibleAnchorError, ZeroIncumbentError,
                     evaluate_state, update_beamformer_single,
                     update_beamformers_multi, update_rx_positions,
                     update_tx_position)
from .channel import (ConfigurationError, PathSet, PositionState,
                      ScenarioRealization, SystemConfig, channel_matrix,
                      channel_vector, compute_min_weighted_sinr,
                      realization_rng, rx_field_response, sample_scenario,
                      transmit_grid, tx_field_response, unit_direction)
from .conic import ConicProgram, SolveResult, SolveStatus, SolverSettings, solve
from .driver import (ConvergenceCriterion, IterationTrace, initialize,
                     run_multi_group, run_single_group)
from .experiments import (Scheme, SchemeResult, SweepSpec, run_scheme,
                          run_sweep, uniform_linear_layout)
from .surrogate import (QuadraticSurrogate, RxExpansionContext,
                        TxExpansionContext, bilinear_product_upper_bound,
                        build_rx_context, build_tx_context,
                        distance_linearization, lower_surrogate_rx,
                        lower_surrogate_tx, rx_curvature_bound,
                        rx_power_gradient, rx_power_hessian, rx_power_value,
                        tx_curvature_bound, tx_power_gradient,
                        tx_power_hessian, tx_power_value, upper_surrogate_rx,
                        upper_surrogate_tx)

__version__ = "0.1.0"
