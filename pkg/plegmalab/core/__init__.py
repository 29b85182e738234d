from plegmalab.core.finset import FinSubset, Universe, blocks_ordered, k_subsets
from plegmalab.core.maps import (
    find_nonpreserving_witness,
    is_plegma_preserving,
    named_map,
    tabulate,
    verify_nonpreserving,
)
from plegmalab.core.paths import (
    enumerate_plegma_paths,
    is_skipped,
    plegma_distance,
    plegma_path_between,
    plegma_successors,
    shortest_plegma_path,
)
from plegmalab.core.plegma import (
    PlegmaTuple,
    count_plegma,
    enumerate_plegma,
    flat_from_plegma,
    is_plegma,
    is_plegma_pair,
    paper_formula_report,
    plegma_from_flat,
    restrict,
)
from plegmalab.core.plegmatic import (
    FeasibilityResult,
    PlegmaticFamily,
    first_coordinate_bound,
    greedy_blocks,
    is_plegmatic,
    is_schreier_plegmatic,
    is_weakly_plegmatic_path,
)
from plegmalab.core.search import grow_subuniverse
