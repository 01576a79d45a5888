"""Remote one-qubit state creation through spin-1/2 XY chains.

The single-excitation dynamics of a nearest-neighbour XY chain is solved
exactly; a pure state of the first two spins (the sender) is mapped to the
reduced state of the last spin (the receiver).
"""

from .chain import ChainSpec, TridiagonalMatrix, build_profile, custom_chain, one_excitation_hamiltonian
from .errors import (
    DegenerateParametrizationError,
    InconsistentAmplitudesError,
    InvalidLengthError,
    InvalidParameterError,
    NumericalFailure,
    OracleScaleExceeded,
    PhaseUndefinedWarning,
    SpinlineError,
    UnitarityViolationError,
)
from .region import (
    CriticalLengthReport,
    RegionMap,
    SelectiveReport,
    TimeSearchResult,
    creatable_map,
    critical_length,
    find_t0,
    lambda_min_cr,
    lambda_min_direct,
    selective_bounds,
    selective_suite,
)
from .spectral import (
    SpectralDecomposition,
    TransitionAmplitude,
    decompose,
    decompose_chain,
    full_hilbert_oracle,
    ode_oracle_amplitudes,
    transition_amplitudes,
)
from .statemap import (
    AmplitudeTriple,
    ControlParams,
    ReceiverState,
    SenderState,
    control_to_sender,
    effective_R,
    lambda_floor,
    phase_match,
    receiver_amplitudes,
    receiver_density,
    receiver_params,
    sender_unitary,
)

__version__ = "0.1.0"
