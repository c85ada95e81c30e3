"""Entanglement structure of Gaussian multi-mode states.

Covariance matrices use quadrature ordering ``(x1, p1, ..., xN, pN)`` and
vacuum variance 1/2.
"""

from .criteria import (
    CRITERIA,
    CriterionResult,
    SearchConfig,
    evaluate,
    partial_transpose,
    ppt_criterion,
    qfi,
    qfi_lower_bound,
    qfi_witness,
    quadrature_mask,
    squeezing_coefficient,
    witness_matrix,
)
from .errors import *  # noqa: F401,F403
from .network import CircuitElement, GaussianCircuit, element_symplectic, load_circuit, recipe, run_circuit
from .partitions import (
    ModePartition,
    bell_number,
    enumerate_partitions,
    parse_partition,
    project_block_diagonal,
)
from .reconstruction import (
    MeasurementRecord,
    aggregate,
    criterion_spread,
    reconstruct,
    synthesize_record,
)
from .states import (
    R_HALF,
    R_PAPER,
    StateSpec,
    analytic_covariance,
    apply_loss,
    db_to_r,
    p_max_threshold,
    reduce,
    vacuum_mixed,
)
from .sweep import SummaryRow, SweepSpec, build_summary, collect_summary, run_sweep
from .symplectic import (
    check_physical,
    invert,
    load_covariance,
    save_covariance,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum,
)
from .transitions import optimal_direction_trace

__version__ = "0.1.0"
