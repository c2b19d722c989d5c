"""Equivariant Groebner bases under the column-shift monoid.

Exact sparse polynomial arithmetic over doubly indexed variables, shift
divisibility with witnesses, truncated equivariant completion certified
against a classical finite-variable engine, and Markov bases of
hierarchical contingency-table models.
"""

from .core import (
    Monomial,
    Ordering,
    ParseError,
    Polynomial,
    ShiftMap,
    Term,
    apply_shift,
    cmp_shift,
    compose_shifts,
    compress,
    format_polynomial,
    leading_term,
    parse_polynomial,
)
from .divisibility import (
    DivisibilityWitness,
    FinalSegmentBasis,
    in_final_segment,
    is_antichain,
    minimalize,
    pi_divides,
    pi_divides_diagonal,
)
from .gb import (
    CompletionLimits,
    CompletionStatus,
    GBResult,
    GeneratorSet,
    ReductionTrace,
    equivariant_buchberger,
    interleavings,
    is_member,
    reduce,
    s_polynomial,
    spolynomials_reduce_to_zero,
)
from .chains import (
    Chain,
    StabilizationReport,
    TruncatedIdeal,
    classical_reduced_gb,
    detect_stabilization,
    finite_buchberger,
    ideal_equal,
    orbit_generators,
    shift_set,
    truncation_oracle_check,
)
from .models import (
    DesignMatrix,
    Move,
    ResourceLimitError,
    SimplicialComplex,
    TableShape,
    design_matrix,
    hierarchical_chain,
    independent_set_instance,
    integer_rank,
    is_decomposable,
    is_independent_set,
    lattice_kernel,
    load_model,
    marginal,
    markov_basis,
    toric_ideal,
    verify_markov_fibers,
)

__version__ = "0.1.0"
