"""Group-graph cohomology over graphs and trees, and the moduli analyzer for
decorated dual trees of reduced foliations."""

from .graph import (
    Geodesic,
    Graph,
    GraphError,
    GraphMorphism,
    Tree,
    connected_components,
    contract,
    first_homology_rank,
    geodesic_to_subtree,
    precedes,
    validate_tree,
)
from .group_graph import (
    BudgetExceeded,
    FiniteGroup,
    GroupGraph,
    GroupGraphError,
    GroupGraphMorphism,
    GroupHom,
    SubGroupGraph,
    VectorSpace,
    cyclic_group,
    dihedral_group,
    direct_image,
    image_of,
    is_regular,
    kernel_of,
    pullback,
    quotient,
    quotient_with_projection,
    remove_offsupport_edges,
    support,
    support_components,
    tensor,
    trivial_group,
)
from .cohomology import (
    Cochain0,
    Cocycle1,
    CohomologyResult,
    coboundary_action,
    h0,
    h1_auto,
    h1_finite_bruteforce,
    h1_map,
    h1_vector,
)
from .theorems import (
    ActiveStructure,
    HypothesisViolated,
    RepulsivityReport,
    VerificationError,
    build_active_structure,
    check_repulsive,
    contraction_regularity,
    direct_image_verify,
    pruning_verify,
    quotient_iso_verify,
    quotient_lift,
    regular_h1,
    tensor_h1_verify,
)
from .foliation import (
    FoliationError,
    FoliationSpec,
    ModuliReport,
    build_tf_red,
    characterization_crosscheck,
    classify_restrictions,
    cut_graph,
    entirely_green_check,
    is_finite_type,
    moduli_dimension,
    red_subgraph,
    scan_typed_geodesics,
    validate,
)

__version__ = "0.1.0"
