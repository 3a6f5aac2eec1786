"""Two-atom Rydberg-blockade entanglement pipeline.

Simulation of the entangling sequence with realistic atom losses,
phase-averaged global Raman rotations, shot-level synthetic data, and
partial reconstruction of the two-atom density matrix with loss and
fidelity estimates.
"""

from .qstate import (
    DIM,
    DensityMatrix,
    Level,
    NormalizationError,
    QubitSummary,
    bell_phi,
    bell_psi_minus,
    bell_psi_plus,
    index_levels,
    pair_index,
    pure_state,
    qubit_summary,
    qubit_trace,
)
from .dynamics import (
    BlockadeConfig,
    ErrorBudget,
    blockade_pulse_populations,
    blockade_pulse_unitary,
    p_recap_predicted,
    run_sequence,
)
from .rotation import (
    ObservableCurves,
    RotationParams,
    apply_rotation,
    curves_closed_form,
    curves_from_averaged_states,
    curves_monte_carlo,
    default_theta_grid,
    phase_averaged_state,
    rotation_matrix,
)
from .measure import ShotDataset, ShotRecord, sample_dataset, sample_p_recap
from .estimator import (
    CosineFit,
    EntanglementVerdict,
    FitError,
    LossEstimate,
    ReconstructionReport,
    entanglement_verdict,
    extract_losses,
    fit_cosine_series,
    reconstruct,
)
from .blochsim import (
    FiveLevelConfig,
    LindbladTimeSeries,
    LossBudgetResult,
    PulseShape,
    calibrate_pulse,
    default_pulse_sequence,
    evolve_lindblad,
    loss_budget,
)

__version__ = "0.1.0"
