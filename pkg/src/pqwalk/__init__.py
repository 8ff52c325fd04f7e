"""pqwalk: periodic and split-step discrete-time quantum walks on the line.

Deterministic state-vector simulation, spread and entanglement analysis,
exact momentum-space dispersion, and continuum (Dirac) limit checks.
"""

from .analysis import (DEFAULT_QUANTILE_MASS, DEFAULT_SUPPORT_EPS,
                       Distribution, EntropyTrace, WalkSummary,
                       entanglement_entropy, entanglement_of_state,
                       entropy_trace, mean_position, probability_distribution,
                       quantile_radius, reduced_coin_density, rms_displacement,
                       standard_deviation, summarize, support_radius)
from .backend import BACKEND, compiled_available
from .dirac import (DiracConfig, ResidualReport, differential_residual,
                    dirac_config, dirac_spread_check, is_gapless,
                    recurrence_residual)
from .dispersion import (BlochMatrix, SpectralCurve, bloch_matrix,
                         continuum_dispersion, continuum_group_velocity,
                         exact_dispersion, max_group_speed, spread_bound)
from .schedule import CoinSchedule, ScheduleError, Trajectory, coin_for_step, evolve
from .state import (InitialCoinState, PositionProfile, WalkerState,
                    WindowOverflowError, apply_coin, apply_half_shift_minus,
                    apply_half_shift_plus, apply_shift, full_step, make_coin,
                    make_state, split_step)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BlochMatrix", "CoinSchedule", "DEFAULT_QUANTILE_MASS",
    "DEFAULT_SUPPORT_EPS", "DiracConfig", "Distribution", "EntropyTrace",
    "InitialCoinState", "PositionProfile", "ResidualReport", "ScheduleError",
    "SpectralCurve", "Trajectory", "WalkSummary", "WalkerState",
    "WindowOverflowError", "apply_coin", "apply_half_shift_minus",
    "apply_half_shift_plus", "apply_shift", "bloch_matrix",
    "compiled_available", "continuum_dispersion", "continuum_group_velocity",
    "dirac_config", "dirac_spread_check", "differential_residual",
    "entanglement_entropy", "entanglement_of_state", "entropy_trace",
    "evolve", "exact_dispersion", "full_step", "coin_for_step",
    "is_gapless", "make_coin", "make_state", "max_group_speed",
    "mean_position", "probability_distribution", "quantile_radius",
    "recurrence_residual", "reduced_coin_density", "rms_displacement",
    "split_step", "spread_bound", "standard_deviation", "summarize",
    "support_radius",
]
