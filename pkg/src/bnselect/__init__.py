"""Equivalence classes, compelled ancestors, and selection-problem
reduction for categorical Bayesian networks.

The package splits into graph structure (`graphs`, `graphio`), class
machinery (`equivalence`, `compelled`), probability tables and models
(`tables`, `models`), the reduction pipeline and its numeric witnesses
(`reduction`, `witnesses`), the algebraic membership test
(`constraint`), and figure/CSV output (`report`).
"""

from .compelled import (
    CompelledResult,
    compelled_ancestors,
    compelled_ancestors_bruteforce,
    merge_ancestral,
    min_ancestor_dag,
)
from .constraint import (
    ConstraintReport,
    ConstraintSystem,
    MembershipVerdict,
    build_system,
    chain_graph,
    classify_conditional,
    simulate_compatible_conditional,
    simulate_generic_conditional,
    solve_membership,
)
from .equivalence import (
    ENUMERATION_LIMIT,
    Cpdag,
    NoExtension,
    TreeOrder,
    consistent_extension,
    cpdag_of,
    enumerate_class,
    induced_node_order,
    orient_by_total_order,
    same_class,
    tree_order,
)
from .graphio import (
    NodeDecl,
    ParsedGraph,
    ParseError,
    fixture_path,
    format_graph,
    from_json_dict,
    list_fixtures,
    load_cpts,
    load_fixture,
    load_graph,
    load_graph_json,
    parse_graph,
    to_dot,
    to_json_dict,
)
from .graphs import (
    ConditionalDag,
    CycleError,
    Dag,
    GraphError,
    JoinTree,
    NotChordalError,
    Pdag,
    UnknownNodeError,
    ancestors,
    descendants,
    fix,
    induced_subgraph,
    is_chordal,
    join_tree,
    maximal_cliques,
    skeleton,
    unshielded_colliders,
    unshielded_undirected_path_tree,
)
from .models import (
    CategoricalBn,
    ConvergenceError,
    HierarchicalSpec,
    IpfResult,
    fit_gap,
    in_bn_model,
    ipf_fit,
    joint_of,
    markov_statements,
    random_bn,
)
from .reduction import (
    MembershipCheck,
    ReductionReport,
    ReductionStep,
    SelectionProblem,
    drop_nested_selection,
    drop_selection_out_edges,
    hm_to_selection_bn,
    random_selection_problem,
    reduce_full,
    restrict_to_ancestors,
    shm_membership_check,
    shm_of,
)
from .tables import (
    CondTable,
    JointTable,
    ZeroConditioningEvent,
    assignments,
    chain,
    chained_condition_gap,
    condition,
    conditional_from_joint,
    is_ci,
    kl_divergence,
    max_abs_diff,
)
from .witnesses import (
    Witness,
    ancestor_join_witness,
    ancestor_split_witness,
    nested_absorb_witness,
    nested_expand_witness,
    parent_conditioning_reverse_witness,
    parent_conditioning_witness,
    selection_sink_witness,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
