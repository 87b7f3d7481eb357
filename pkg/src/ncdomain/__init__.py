"""Universal weighted shifts, domain membership and exact classification
of noncommutative domain algebras on truncated Fock space."""

from .classify import ClassificationResult, classify, operator_witness_check, solve_scales, verify_witness
from .errors import NCDomainError
from .fock import (
    FockIndex,
    MembershipReport,
    OperatorTuple,
    ShiftFamily,
    WeightTable,
    brute_force_weight,
    build_shifts,
    char_eval_check,
    coherent_vector,
    compute_weights,
    defect,
    enumerate_words,
    eval_poly,
    is_member,
    min_eig_hermitian,
)
from .geometry import BallPoint, CircleFit, boundary_radius, circle_image, moebius, q_value, scalar_member
from .symbol import FreePoly, Symbol, Witness, format_symbol, parse_symbol, substitute, validate

__version__ = "0.1.0"
