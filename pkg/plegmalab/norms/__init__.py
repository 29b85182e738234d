from plegmalab.norms.base import (
    NormEngine,
    NormValue,
    seminorm_violations,
    sqrt_fraction,
)
from plegmalab.norms.classical import C0Norm, LpNorm, SummingNorm, lp_eval
from plegmalab.norms.example import ExampleNorm, example_norm_eval
from plegmalab.norms.factory import SUPPORTED_ENGINES, make_engine
from plegmalab.norms.schreier import (
    FunctionalAtom,
    SchreierPlegmaticNorm,
    WFunctional,
    schreier_plegmatic_eval,
    w_functional_eval,
)
from plegmalab.norms.sparse import SparseVec
from plegmalab.norms.tsirelson import (
    BlockCertificate,
    TsirelsonConfig,
    TsirelsonNorm,
    block_certificate,
    block_lower_bound,
    fixed_point_trace,
    seminorm,
    tsirelson_eval,
)
