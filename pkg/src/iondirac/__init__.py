"""Simulating the Dirac equation with a trapped ion: vibronic Fock-space
operators, sideband-built Dirac Hamiltonians, propagation and analysis."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    InsufficientSampling,
    InvalidPair,
    InvalidParameter,
    InvalidTruncation,
    IonDiracError,
    NotHermitian,
    SpaceMismatch,
)
from .fockspace import (
    Operator,
    StateVector,
    VibronicSpace,
    annihilation,
    creation,
    expect,
    inner,
    mode_op,
    momentum_op,
    number_op,
    pauli,
    position_op,
    projector,
)
from .hamiltonian import (
    ModelParams,
    PotentialProfile,
    blue_sideband,
    carrier,
    dirac_1p1,
    dirac_2p1,
    dirac_3p1,
    dirac_3p1_block,
    effective_squeeze,
    klein_hamiltonian,
    red_sideband,
    sigma_p_coupling,
)
from .states import (
    WavepacketSpec,
    coherent,
    energy_decompose,
    fock,
    momentum_wavepacket,
    plus_phi,
    squeezed_coherent,
)
from .evolve import Schedule, SpectralPropagator, TimeSeries, evolve_state, krylov_evolve, run
from .observables import (
    QuadratureSpec,
    phonon_number,
    population,
    projected_quadrature,
    protocol_derivative,
    quadrature,
)
from .analysis import (
    FitResult,
    IonSpec,
    compare_nonrelativistic,
    electron_prediction,
    fit_signal,
    fit_trajectory,
    klein_report,
    predict_zb,
    si_convert,
    zb_amplitude,
    zb_frequency,
)
from .config import ScenarioConfig, load_config, parse_config
