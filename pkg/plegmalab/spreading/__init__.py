from plegmalab.spreading.cesaro import (
    CesaroTrace,
    cesaro_limit,
    cesaro_mean,
    cesaro_scan,
    paper_functional,
    paper_functional_value,
)
from plegmalab.spreading.composition import CompositionReport, composition_consistency
from plegmalab.spreading.estimate import (
    SMEstimate,
    StabilizedTable,
    coefficient_grid,
    empirical_sm,
    sign_flip_invariance,
    sm_stabilize,
    sparsify,
    zero_sum_equality,
)
from plegmalab.spreading.l1 import (
    L1Estimate,
    SplittingReport,
    l1_constant,
    splitting_check,
)
