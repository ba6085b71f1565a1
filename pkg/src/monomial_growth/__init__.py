"""Constructions of finitely generated monomial algebras with prescribed
growth, plus brute-force-checkable certificates for their structural
properties: growth sandwiches, primeness witnesses, container-power systems,
and local nilpotency of marked ideals."""

__version__ = "0.1.0"

from .construction import (
    AvoidLetterLexFirst,
    ConstructionState,
    LexFirst,
    MemoryBudgetError,
    PrimeSelection,
    SeededRandom,
    build,
    check_suffix_projection_onto,
    entropy_samples,
    extend_state,
    strategy_from_string,
    suffix_projection,
    verify_growth_bounds,
)
from .growth import (
    AdmissibilityReport,
    FeasibilityError,
    GrowthError,
    GrowthSpec,
    HorizonExhaustedError,
    SizeTable,
    check_admissible,
    insertion_floor,
    level_sizes,
    onto_schedule,
    parse_growth,
    regularize,
)
from .nilpotent import (
    MarkedSystem,
    build_marked,
    certify_locally_nilpotent,
    check_marked_degree_recursion,
    check_marked_prime,
    check_window_marked_bound,
    level_marked_degree,
    marked_count,
    nilpotency_a_priori_bound,
    verify_marked_growth,
    window_marked_degree,
)
from .prime import (
    PrimenessReport,
    check_prime,
    contained_pair_check,
    max_disjoint_occurrences,
    square_zero_certificate,
    verify_entropy_range,
)
from .saturation import (
    SaturatedSystem,
    check_container_powers,
    check_nonnilpotent_witness,
    check_choice_promotion,
    container_power_exponents,
    default_eps_sequence,
    saturate,
    unextended_view,
    verify_saturated_growth,
)
from .wordstore import CapacityError, NodeStore
