"""cyceq: translation-invariant equations, coloured graphs,
cycle-equation systems, and machine-checkable abundance certificates."""

__version__ = "0.1.0"

from .equations import (
    AvoidanceMode,
    AvoidanceResult,
    Equation,
    SolutionClass,
    brute_avoidance,
    classify_solution,
    count_distinct_solutions,
    genus,
    is_convex,
    is_symmetric,
    validate,
)
from .graphs import (
    ColouredGraph,
    Graph,
    K2,
    K3,
    blow_up,
    colour_hom_to_p3inf,
    complete_graph,
    cycle_basis,
    cycle_graph,
    enumerate_cycles,
    has_increasing_cycle,
    hom_exists,
    path_graph,
    petersen_graph,
    validate_coloured,
    wrap,
    wrap_of_cycle,
)
from .cycle_equations import (
    CombinationWitness,
    CycleEquation,
    build_cycle_equation,
    build_system,
    check_all_colourings,
    classify_cycle,
    eqs_all_symmetric,
    exists_convex_combination,
    genus_one_combination_search,
)
from .abundance import (
    AbundanceCertificate,
    build_hm,
    double_along_edge,
    load_fixture,
    peel_order_search,
    splittable_decompose,
    verify_certificate,
)
from .constructions import (
    BehrendSet,
    RSGraph,
    behrend_set,
    fig5_graph,
    find_distinct_solution,
    g_n,
    rs_graph,
)
from .removal import (
    DenseCoreReport,
    UniformFarWitness,
    count_c5,
    count_p4_aligned,
    dense_core_c5,
    greedy_packing,
    uniformize,
    verify_uniform_far,
)
