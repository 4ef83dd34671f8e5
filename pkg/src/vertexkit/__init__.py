"""vertexkit: exact minimax-optimal fixed-point algorithms as data.

Construct, verify, compose, dualize, count and execute the optimal
fixed-step methods for nonexpansive operators: step matrices and their
proof certificates in exact rational arithmetic, arc diagrams as the
combinatorial handle, and float/exact runtimes for the named families.
"""

from .core import (
    RMatrix,
    RVector,
    Rational,
    SingularMatrixError,
    SizeCapError,
    binomial,
    invert,
    max_exact_n,
    pascal_R,
    pascal_S,
    rat,
    rat_str,
    solve_linear,
)
from .diagrams import (
    ArcDiagram,
    CrossingDiagramError,
    EnumerationCapError,
    NotDecomposableError,
    PathCache,
    ascii_art,
    decomposition_index,
    descendants,
    enumerate_diagrams,
    glue_diagrams,
    guaranteed_indices,
    increasing_path,
    is_noncrossing,
    split_diagram,
    validate,
)
from .qcert import (
    CertificateSet,
    HMatrix,
    LambdaMatrix,
    ProofWitness,
    QProfile,
    certificates,
    check_invariance,
    is_optimal,
    lambda_matrix,
    q_functions,
    rho,
    verify_matrix_identity,
    verify_proof_identity,
)
from .vertex import (
    NotAVertexError,
    PatternSolveError,
    PatternSolveState,
    ZeroAntiDiagonalError,
    diagram_from_vertex,
    h_from_q,
    pattern_solve,
    q_from_pattern,
    vertex_from_diagram,
)
from .gluing import (
    HorizonMismatchError,
    NotOptimalError,
    glue_h,
    glue_lambda,
    is_basic,
    verify_gluing_theorem,
)
from .duality import (
    DualReport,
    anti_transpose,
    delta_matrix,
    dual_certificates_vertex,
    dual_lambda_via_inverse,
    dual_report,
    dualize_basic_diagram,
    is_self_dual,
    nu_combinatorial,
)
from .algorithms import (
    AlgorithmSpec,
    FsdmLedger,
    InvalidScheduleError,
    IterationTrace,
    NonFiniteError,
    OperatorSpec,
    dual_ohm_hmatrix,
    fsdm_hmatrix,
    guaranteed_trace_indices,
    ohm_hmatrix,
    parse_algorithm,
    rdo_hmatrix,
    run_algorithm,
    run_dual_ohm,
    run_fsdm,
    run_hmatrix,
    run_ohm,
    run_rdo,
    write_trace_csv,
)
from .lab import (
    ExperimentConfig,
    OperatorConfig,
    contraction,
    initial_point,
    run_experiment,
    sign_hash,
    violation_operator,
    worst_case_operator,
)

__version__ = "0.1.0"
