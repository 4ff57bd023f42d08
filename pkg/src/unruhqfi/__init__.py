"""Quantum Fisher information of NOON states seen by a uniformly accelerated observer."""

from .errors import (
    ConvergenceError,
    DimensionError,
    DivergentOptimumError,
    InsufficientDataError,
    InvalidStateError,
    ScanCapError,
    UnboundedUncertaintyError,
)
from .fock import (
    Encoding,
    ModeSpec,
    NoonSpec,
    amplitude_magnitudes,
    channel_block,
    rob_state,
    rob_state_derivative,
    rob_state_dual,
    rob_state_single,
    squeezing_from_mode,
    unruh_amplitudes,
)
from .qfi import (
    QfiOutcome,
    Spectrum,
    eigh,
    qfi_at_dim,
    qfi_converged,
    qfi_from_state,
    qfi_lyapunov,
    sld_lower,
    theta_spread,
)
from .study import (
    FitResult,
    OptimalN,
    RunConfig,
    SlopeResult,
    cramer_rao_bound,
    fit_decay,
    optimal_n,
    slope_of_a,
    sweep_over_n,
    sweep_over_r,
)
from .records import SweepPoint

__version__ = "0.1.0"
