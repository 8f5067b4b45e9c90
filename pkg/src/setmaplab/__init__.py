"""Finite set-mapping laboratory: free sets, forcing conditions, Ramsey arrows."""

from .core import (
    ElementSet,
    MappingError,
    SetMapping,
    elements,
    free_reduction_equivalence,
    is_F_closed,
    is_free,
    is_g_free,
    is_secured,
    middle_element_free,
)
from .freeset import (
    ResourceLimitExceeded,
    SearchReport,
    enumerate_free_sets,
    max_free_set,
    oracle_max_free_set,
)
from .constructions import (
    DeltaSystemPair,
    EnumerationScheme,
    complete_pair_mapping,
    descent_chain,
    enumeration_mapping,
    interval_mapping,
    maximal_extension,
    prefix_mapping,
    verify_delta_preconditions,
)

__version__ = "0.1.0"
