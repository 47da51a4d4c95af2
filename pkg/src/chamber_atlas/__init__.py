"""Exact enumeration of resonance, threshold and Kostant chambers."""

from .arrangement import (
    CentralArrangement,
    Chamber,
    WallCensus,
    chamber_tree_set,
    enumerate_chambers,
    maximal_indexable_via_chambers,
    resonance_arrangement,
    threshold_arrangement,
    verify_inequalities,
    wall_census,
)
from .core import (
    AlternatingTree,
    Convention,
    FlowAssignment,
    RationalPoint,
    Sign,
    SignVector,
    TreeSign,
    TreeSignVector,
    enumerate_alternating_trees,
    enumerate_positive_alternating_trees,
    induce_point,
    is_sign_compatible,
    reflect,
    resonance_sign_vector,
    threshold_sign_vector,
    tree_sign_vector,
)
from .errors import AtlasError, BoundsError, DomainError, InvariantError, ResourceError, StructuralError
from .flows import (
    DirectedMultigraph,
    circulation_graph,
    cones_intersect_fulldim,
    is_indexable,
    positive_root_cone_contains,
    reroute_flow,
)
from .graph import (
    CliqueReport,
    CompatGraph,
    build_compatibility_graph,
    classify_cliques,
    connected_components,
    enumerate_maximal_cliques,
    source_set_decomposition,
)
from .kostant import (
    IncidenceMatrix,
    KostantChamber,
    cyclic_cross_check,
    fit_chamber_polynomial,
    kostant_chambers,
    kostant_value,
)

__version__ = "0.1.0"
