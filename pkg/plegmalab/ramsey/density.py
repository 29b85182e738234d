import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set

from loguru import logger
from tqdm import tqdm

from plegmalab.core.finset import FinSubset, Universe, k_subsets
from plegmalab.core.plegma import is_plegma_pair
from plegmalab.util.errors import InvalidInput
from plegmalab.util.system import timethis
from plegmalab.util.types import Number, to_fraction

CRITERIA = ("floor", "strict")


@dataclass
class FreeSetResult:
    n: int
    k: int
    l: int  # noqa: E741
    size: int
    witness: List[FinSubset] = field(default_factory=list)
    exact: bool = True


def plegma_graph(n: int, k: int) -> Dict[FinSubset, Set[FinSubset]]:
    """Undirected graph on [{1..n}]^k joining s, t whenever (s, t) or (t, s) is a plegma pair"""
    vertices = list(k_subsets(Universe.horizon(n), k))
    graph: Dict[FinSubset, Set[FinSubset]] = {v: set() for v in vertices}

    for i, a in enumerate(vertices):
        for b in vertices[i + 1 :]:
            if is_plegma_pair(a, b) or is_plegma_pair(b, a):
                graph[a].add(b)
                graph[b].add(a)

    return graph


def _has_clique(
    graph: Dict[FinSubset, Set[FinSubset]], pool: Sequence[FinSubset], size: int
) -> bool:
    if size <= 0:
        return True

    pool = list(pool)

    for i, v in enumerate(pool):
        if len(pool) - i < size:
            return False

        rest = [u for u in pool[i + 1 :] if u in graph[v]]

        if _has_clique(graph, rest, size - 1):
            return True

    return False


def _completes_tuple(
    graph,
    chosen: Sequence[FinSubset],
    v: FinSubset,
    l: int,  # noqa: E741
) -> bool:
    # plegma l-tuples are exactly the l-cliques of the plegma graph
    neighbours = [u for u in chosen if u in graph[v]]

    return _has_clique(graph, neighbours, l - 1)


def _greedy_free(graph, l: int) -> List[FinSubset]:  # noqa: E741
    order = sorted(graph, key=lambda v: (len(graph[v]), v))
    chosen: List[FinSubset] = []

    for v in order:
        if not _completes_tuple(graph, chosen, v, l):
            chosen.append(v)

    return sorted(chosen)


def largest_plegma_free(
    n: int, k: int, l: int, exact_limit: int = 45  # noqa: E741
) -> FreeSetResult:
    """largest_plegma_free Largest A in [{1..n}]^k containing no plegma l-tuple

    k = 1 has the closed form min(n, l - 1), as any l singletons form a plegma tuple. For
    k >= 2 a branch and bound runs over the k-sets in lexicographic order, which is also the
    order of first coordinates. An extension is forbidden when it closes an l-clique of the
    plegma graph. Isolated vertices are always taken. Above exact_limit vertices only a greedy
    lower bound is computed.

    Args:
        n (int): Horizon
        k (int): Cardinality of the sets
        l (int): Length of the forbidden tuples
        exact_limit (int): Largest number of k-sets handled exactly

    Returns:
        FreeSetResult: size, witness and exactness flag

    Examples:
        >>> largest_plegma_free(4, 2, 2).size
        5
    """
    if n < 0 or k < 1 or l < 1:
        raise InvalidInput("Need n >= 0 and positive k, l")

    if l == 1:
        return FreeSetResult(n, k, l, 0, [])

    if k == 1:
        size = min(n, l - 1)

        return FreeSetResult(
            n, k, l, size, [FinSubset([i]) for i in range(1, size + 1)]
        )

    graph = plegma_graph(n, k)

    if len(graph) > exact_limit:
        witness = _greedy_free(graph, l)
        logger.warning(
            f"{len(graph)} sets exceed exact_limit={exact_limit}, heuristic lower bound only"
        )

        return FreeSetResult(n, k, l, len(witness), witness, exact=False)

    isolated = sorted(v for v in graph if not graph[v])
    active = sorted(v for v in graph if graph[v])
    best: List[FinSubset] = list(_greedy_free({v: graph[v] for v in active}, l))

    def branch(pos: int, chosen: List[FinSubset]) -> None:
        nonlocal best

        if len(chosen) + len(active) - pos <= len(best):
            return

        if pos == len(active):
            best = list(chosen)

            return

        v = active[pos]

        if not _completes_tuple(graph, chosen, v, l):
            chosen.append(v)
            branch(pos + 1, chosen)
            chosen.pop()

        branch(pos + 1, chosen)

    branch(0, [])
    witness = sorted(isolated + best)

    return FreeSetResult(n, k, l, len(witness), witness)


def _meets_threshold(free: int, total: int, delta: Fraction, criterion: str) -> bool:
    if criterion == "floor":
        return free < math.floor(delta * total)

    return free < delta * total


@dataclass
class DensityScanResult:
    k: int
    l: int  # noqa: E741
    delta: Fraction
    n_max: int
    criterion: str = "floor"
    threshold_n: Optional[int] = None
    rows: List[Dict[str, object]] = field(default_factory=list)
    counterexample: Optional[List[FinSubset]] = None
    exact: bool = True

    @property
    def found(self) -> bool:
        return self.threshold_n is not None

    @property
    def sufficient_n(self) -> Optional[int]:
        """ceil(l / delta), the known sufficient horizon for k = 1"""
        return math.ceil(self.l / self.delta) if self.k == 1 else None

    def table(self) -> List[List[object]]:
        return [
            [r["n"], r["total"], r["largest_free"], r["delta_total"]] for r in self.rows
        ]


SCAN_HEADER = ["n", "total", "largest_free", "delta_total"]


@timethis()
def density_threshold_scan(
    k: int,
    l: int,  # noqa: E741
    delta: Number,
    n_max: int,
    criterion: str = "floor",
    exact_limit: int = 45,
) -> DensityScanResult:
    """density_threshold_scan Smallest n such that every dense A in [{1..n}]^k holds a plegma l-tuple

    "floor": largest_free < floor(delta C(n, k)), i.e. every A with floor(delta C(n, k))
    members contains a plegma l-tuple. For k = 1 this gives ceil(l / delta).
    "strict": largest_free < delta C(n, k).

    Args:
        k (int): Cardinality of the sets
        l (int): Tuple length
        delta (Number): Density in (0, 1]
        n_max (int): Largest horizon scanned
        criterion (str): "floor" or "strict"
        exact_limit (int): Passed to largest_plegma_free

    Raises:
        InvalidInput: delta outside (0, 1] or unknown criterion

    Returns:
        DensityScanResult: the threshold (None if not found up to n_max), the per-n table and
            the largest free set just below the threshold
    """
    delta = to_fraction(delta)

    if not 0 < delta <= 1:
        raise InvalidInput(f"delta must lie in (0, 1], got {delta}")

    if criterion not in CRITERIA:
        raise InvalidInput(f"Unknown criterion '{criterion}'. Use one of {CRITERIA}")

    scan = DensityScanResult(k=k, l=l, delta=delta, n_max=n_max, criterion=criterion)
    previous: Optional[FreeSetResult] = None

    for n in tqdm(
        range(max(1, k), n_max + 1), desc=f"density k={k} l={l}", leave=False
    ):
        res = largest_plegma_free(n, k, l, exact_limit=exact_limit)
        total = math.comb(n, k)
        scan.exact = scan.exact and res.exact
        scan.rows.append(
            {
                "n": n,
                "total": total,
                "largest_free": res.size,
                "delta_total": str(delta * total),
            }
        )

        if _meets_threshold(res.size, total, delta, criterion):
            scan.threshold_n = n
            scan.counterexample = None if previous is None else previous.witness

            break

        previous = res

    if scan.found:
        logger.info(
            f"Density threshold for k={k}, l={l}, delta={delta} ({criterion}): "
            f"n={scan.threshold_n}"
        )
    else:
        logger.warning(f"No density threshold up to n_max={n_max}")

    return scan
