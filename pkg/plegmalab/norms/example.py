from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from plegmalab.core.finset import FinSubset, Universe, k_subsets
from plegmalab.core.plegma import is_plegma_pair
from plegmalab.norms.base import NormEngine, NormValue
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidInput, ScaleRefusal

MODES = ("exact", "sampled")


def _check_vector(x: SparseVec, k: int) -> None:
    if x and x.arity != k + 1:
        raise InvalidInput(
            f"Expected a vector indexed by {k + 1}-sets, got arity {x.arity}"
        )


def _tuple_value(
    base: NormEngine, x: SparseVec, members: Sequence[FinSubset]
) -> NormValue:
    return base.evaluate(
        SparseVec((pos, x[s]) for pos, s in enumerate(members, start=1))
    )


def example_norm_eval(
    base: NormEngine,
    k: int,
    x: SparseVec,
    mode: str = "exact",
    horizon: Optional[int] = None,
    samples: int = 2000,
    seed: int = 0,
) -> NormValue:
    """example_norm_eval Sup of base norms of x along plegma tuples

    ||x|| = sup { ||(x(s_1), ..., x(s_l))||_base : (s_i) plegma l-tuple of (k+1)-sets, s_1(1) >= l }

    In exact mode members are drawn from supp(x), which is enough for 1-unconditional spreading
    bases: a zero coefficient can be dropped without lowering the base norm. horizon widens the
    pool to all (k+1)-subsets of {1, ..., horizon} instead. Conditional bases are only served
    in sampled mode, which returns a lower bound from random plegma tuples.

    Args:
        base (NormEngine): Norm on c00(N)
        k (int): Vectors are indexed by (k+1)-sets
        x (SparseVec): The vector
        mode (str): "exact" or "sampled"
        horizon (Optional[int]): Enumerate members from [{1..horizon}]^{k+1}
        samples (int): Number of random tuples in sampled mode
        seed (int): Seed for sampled mode

    Raises:
        ScaleRefusal: Exact mode on a conditional base

    Returns:
        NormValue: value and the attaining tuple as certificate
    """
    if mode not in MODES:
        raise InvalidInput(f"Unknown mode '{mode}'. Use one of {MODES}")

    _check_vector(x, k)

    if mode == "exact" and not base.unconditional:
        raise ScaleRefusal(
            f"Base norm '{base.name}' is not unconditional, so the support restriction is not "
            "valid. Use mode='sampled' for a lower bound"
        )

    if horizon is None:
        pool = [FinSubset(s) for s in x.support()]
    else:
        pool = list(k_subsets(Universe.horizon(horizon), k + 1))

    best: Optional[NormValue] = None
    best_tuple: List[FinSubset] = []

    def consider(members: List[FinSubset]) -> None:
        nonlocal best, best_tuple
        val = _tuple_value(base, x, members)

        if best is None or val.value > best.value:
            best, best_tuple = val, list(members)

    if mode == "exact":

        def extend(members: List[FinSubset], start: int) -> None:
            consider(members)

            if len(members) >= members[0][0]:
                return

            for pos in range(start, len(pool)):
                cand = pool[pos]

                if all(is_plegma_pair(prev, cand) for prev in members):
                    members.append(cand)
                    extend(members, pos + 1)
                    members.pop()

        for i, first in enumerate(pool):
            extend([first], i + 1)
    else:
        rng = np.random.default_rng(seed)

        for _ in range(samples if pool else 0):
            members = [pool[int(rng.integers(len(pool)))]]

            while len(members) < members[0][0]:
                options = [
                    c for c in pool if all(is_plegma_pair(p, c) for p in members)
                ]

                if not options or rng.random() < 0.25:
                    break

                members.append(options[int(rng.integers(len(options)))])

            consider(members)

    if best is None:
        return NormValue.rational(Fraction(0), is_exact=mode == "exact")

    best.is_exact = mode == "exact" and best.is_exact
    best.certificate = {
        "tuple": [list(s) for s in best_tuple],
        "coefficients": [str(x[s]) for s in best_tuple],
    }

    if mode == "sampled":
        logger.info(f"Sampled lower bound {best.value} from {samples} plegma tuples")

    return best


class ExampleNorm(NormEngine):
    """ExampleNorm The plegma-sup norm on c00([N]^{k+1}) built over a base norm on c00(N)"""

    name = "example"

    def __init__(
        self,
        base: NormEngine,
        k: int = 1,
        mode: str = "exact",
        samples: int = 2000,
        seed: int = 0,
    ):
        if k < 1:
            raise InvalidInput("k must be positive")

        self.base = base
        self.k = k
        self.mode = mode
        self.samples = samples
        self.seed = seed
        self.unconditional = base.unconditional

    @property
    def params(self) -> Dict[str, Any]:
        return {"base": self.base.describe(), "k": self.k, "mode": self.mode}

    def evaluate(self, x: SparseVec) -> NormValue:
        return example_norm_eval(
            self.base, self.k, x, mode=self.mode, samples=self.samples, seed=self.seed
        )
