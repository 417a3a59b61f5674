"""Deterministic quantum-state transfer over a cavity-photon link.

A single trapped atom maps a superposition of its ground Zeeman
sublevels onto a traveling field whose photon number is superposed
(vacuum / one / two photons), the field crosses a fiber link, and a
second atom absorbs it back into the same internal superposition under
a solved control pulse.  This package simulates the emission, the
absorption, the control-pulse conditions and the link budget, with
closed forms cross-checked against fixed-step ODE oracles.
"""

from .channel import (
    ChannelModel,
    TransferReport,
    attenuation_length,
    phase_drift,
    success_probability,
    transmission_efficiency,
)
from .config import ConfigError, ScenarioConfig, default_config, load_config, parse_config
from .core import (
    DerivedQuantities,
    PhysicalParams,
    RegimeCheck,
    RegimeReport,
    SuperpositionState,
    derive,
    rad_per_s,
    to_mhz,
    validate_regime,
)
from .numerics import (
    BracketError,
    IntegrationError,
    SampledFunction,
    TimeGrid,
    cumulative_integral,
    find_root,
    integrate_ode,
)
from .photonics import (
    PhotonObservables,
    fluxes_and_modes,
    g2_zero_delay,
    mean_photon_number,
    mode_overlap,
    photon_distribution,
    photon_observables,
)
from .pipeline import (
    SendResult,
    TransferResult,
    build_grid,
    run_send,
    run_sweep,
    run_transfer,
)
from .receiver import (
    FinalState,
    PulseSolveError,
    PulseSolveResult,
    ReceiverTrajectory,
    conservation_check,
    final_state,
    gamma_analytic,
    pulse_areas,
    simulate_receiver_ode,
    solve_pulse_shape,
)
from .sender import (
    PulseShape,
    SenderTrajectory,
    amplitudes_beta,
    populations_analytic,
    pump_exposure,
    simulate_sender_ode,
)

__version__ = "0.1.0"
