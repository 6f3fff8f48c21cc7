"""Multipartite correlation measures and local-POVM monotonicity scans for pure qubit states."""
__version__ = "0.1.0"

from multicorr._backend import BACKEND
from multicorr.state import (
    DensityMatrix,
    NullStateError,
    PureState,
    SubsystemSet,
    ValidationError,
    apply_local_operator,
    bloch_vector,
    normalize,
    partial_trace,
    random_pure_state,
)
from multicorr.measures import (
    AVERAGE_RESIDUAL,
    TOTAL_RESIDUAL,
    Measure,
    MeasureReport,
    concurrence,
    linear_entropy,
    measure_report,
    residual_correlation,
    residual_measure,
    residual_sum_n,
    tangle3_pure,
)
from multicorr.qcr import CorrelationSplit, QcrSystem, build_system, phi_family_relation_check, solve_pinned
from multicorr.povm import (
    DeltaRecord,
    GridSpec,
    PovmOutcome,
    TwoOutcomePovm,
    apply_povm,
    apply_sequence,
    delta_components,
    delta_measure,
    make_diag_povm,
    scan_grid,
    slocc_scaling_check,
)
from multicorr.families import StateFamily, make_family, make_gabcd, make_w4, parse_ket_expression
