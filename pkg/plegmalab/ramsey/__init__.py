from plegmalab.ramsey.coloring import Coloring, named_coloring
from plegmalab.ramsey.density import (
    DensityScanResult,
    FreeSetResult,
    density_threshold_scan,
    largest_plegma_free,
    plegma_graph,
)
from plegmalab.ramsey.search import (
    DichotomyResult,
    MonochromaticResult,
    dichotomy_search,
    find_plegma_in_subset,
    monochromatize,
    verify_injective,
    verify_monochromatic,
)
