"""Two-spin NMR quantum-processor simulator with hyperpolarization-
enhanced initial states: weighted temporal labeling, spectral readout and
a one-query two-qubit search, end to end."""

from .quantum import (
    DensityMatrix,
    DeviationPart,
    Unitary,
    apply_unitary,
    compose,
    deviation_decompose,
    populations,
)
from .spins import (
    PermutationId,
    PulseSpec,
    PulseTarget,
    SpinSystemConfig,
    enhanced_state,
    j_evolution,
    permutation_pulse_sequence,
    pulse_unitary,
    thermal_state,
)
from .spinoe import (
    ExperimentSchedule,
    ScheduleMode,
    SpinoeParams,
    enhancement_at,
    make_schedule,
    sample_initial_state,
)
from .labeling import (
    EffectivePureResult,
    LabelingPlan,
    Normalization,
    SingularLabelingSystem,
    assemble_effective_pure,
    choose_ground,
    enhancement_factor,
    permute_populations,
    solve_weights,
)
from .readout import (
    Channel,
    Fid,
    PeakTable,
    ReadoutError,
    Spectrum,
    calibrate,
    integrate_peaks,
    probe,
    readout_spectra,
    reconstruct_diagonal,
    spectrum,
    spectrum_to_csv,
    synthesize_fid,
)
from .experiments import (
    DecodeError,
    DetectionSettings,
    GroverCase,
    decode_answer,
    grover_circuit,
    grover_diffusion,
    grover_oracle,
    run_effective_pure_pipeline,
    run_grover_pipeline,
)

__version__ = "0.1.0"
