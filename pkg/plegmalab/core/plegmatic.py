import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from plegmalab.core.finset import FinSubset, blocks_ordered
from plegmalab.util.errors import InvalidInput

Blocks = Tuple[FinSubset, ...]


def _as_members(members: Iterable[Sequence[int]]) -> Tuple[FinSubset, ...]:
    members = tuple(sorted({FinSubset(s) for s in members}))

    if not members:
        raise InvalidInput("A plegmatic family needs at least one member")

    if len({len(s) for s in members}) > 1:
        raise InvalidInput(
            "Members of a plegmatic family share their cardinality k + 1"
        )

    return members


def columns(members: Iterable[Sequence[int]]) -> List[List[int]]:
    """columns C_i = {s(i): s in P}, i = 1, ..., k + 1"""
    members = _as_members(members)

    return [sorted({s[i] for s in members}) for i in range(len(members[0]))]


def check_witness(
    members: Iterable[Sequence[int]],
    witness: Sequence[Sequence[int]],
    schreier: bool = False,
) -> bool:
    """check_witness F_1 < ... < F_{k+1}, equal sizes, P inside F_1 x ... x F_{k+1}

    With schreier=True additionally |F_1| <= min F_1.
    """
    members = _as_members(members)
    blocks = [FinSubset(f) for f in witness]

    if len(blocks) != len(members[0]) or any(len(f) == 0 for f in blocks):
        return False

    if len({len(f) for f in blocks}) > 1:
        return False

    if not all(blocks_ordered(a, b) for a, b in zip(blocks, blocks[1:])):
        return False

    for s in members:
        if any(e not in f for e, f in zip(s, blocks)):
            return False

    return not schreier or len(blocks[0]) <= blocks[0][0]


@dataclass(frozen=True)
class PlegmaticFamily:
    """PlegmaticFamily A finite family of (k+1)-sets, optionally with its covering blocks"""

    members: Tuple[FinSubset, ...]
    witness: Optional[Blocks] = None
    schreier: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", _as_members(self.members))

        if self.witness is not None:
            object.__setattr__(
                self, "witness", tuple(FinSubset(f) for f in self.witness)
            )

            if not check_witness(self.members, self.witness, schreier=self.schreier):
                raise InvalidInput(
                    f"Blocks {self.witness} do not witness {self.members}"
                )
        elif self.schreier:
            raise InvalidInput("The Schreier flag needs a witness")

    @property
    def k(self) -> int:
        """k, where members have k + 1 elements"""
        return len(self.members[0]) - 1

    def to_json(self):
        witness = self.witness

        return {
            "members": [list(s) for s in self.members],
            "witness": None if witness is None else [list(f) for f in witness],
            "schreier": self.schreier,
        }


@dataclass
class FeasibilityResult:
    feasible: bool
    witness: Optional[Blocks] = None
    method: str = "greedy"
    block_size: int = 0
    padding: Tuple[int, ...] = ()
    complete: bool = True
    agreed: Optional[bool] = None

    def __bool__(self) -> bool:
        return self.feasible

    def family(
        self, members: Iterable[Sequence[int]], schreier: bool
    ) -> Optional[PlegmaticFamily]:
        if not self.feasible:
            return None

        return PlegmaticFamily(tuple(members), self.witness, schreier)


def greedy_blocks(
    members: Iterable[Sequence[int]], schreier: bool = False
) -> FeasibilityResult:
    """greedy_blocks Right-to-left placement of equal-size covering blocks

    The common size is m = max |C_i|. The last block is completed upwards, above its column,
    so its minimum stays min C_{k+1}. Every other block takes the largest free integers below
    the minimum of the block to its right. This keeps every block minimum as large as
    possible, so the placement succeeds whenever any placement does.

    Args:
        members (Iterable[Sequence[int]]): P
        schreier (bool): Also demand |F_1| <= min F_1

    Returns:
        FeasibilityResult: feasibility, blocks and per-block padding counts
    """
    cols = columns(members)
    m = max(len(c) for c in cols)
    padding = tuple(m - len(c) for c in cols)

    if not all(a[-1] < b[0] for a, b in zip(cols, cols[1:])):
        return FeasibilityResult(False, block_size=m, padding=padding)

    blocks: List[FinSubset] = []
    last = cols[-1]
    free = [e for e in range(last[0], last[-1] + m + 1) if e not in set(last)]
    blocks.append(FinSubset(sorted(last + free[: padding[-1]])))

    for i in range(len(cols) - 2, -1, -1):
        col = cols[i]
        floor = cols[i - 1][-1] if i > 0 else 0
        ceiling = blocks[-1][0]
        taken = set(col)
        free = [e for e in range(ceiling - 1, floor, -1) if e not in taken]

        if len(free) < padding[i]:
            return FeasibilityResult(False, block_size=m, padding=padding)

        blocks.append(FinSubset(sorted(col + free[: padding[i]])))

    witness = tuple(reversed(blocks))
    feasible = not schreier or m <= witness[0][0]

    return FeasibilityResult(
        feasible,
        witness=witness if feasible else None,
        block_size=m,
        padding=padding,
    )


def exhaustive_blocks(
    members: Iterable[Sequence[int]],
    schreier: bool = False,
    max_pad: Optional[int] = None,
) -> FeasibilityResult:
    """exhaustive_blocks Try every placement of the padding integers

    Block i receives m - |C_i| integers from the gaps next to its column. Blocks that need more
    than max_pad extra integers are not searched and the result is marked incomplete.
    """
    members = _as_members(members)
    cols = columns(members)
    m = max(len(c) for c in cols)
    padding = tuple(m - len(c) for c in cols)

    if not all(a[-1] < b[0] for a, b in zip(cols, cols[1:])):
        return FeasibilityResult(
            False, method="exhaustive", block_size=m, padding=padding
        )

    if max_pad is not None and max(padding) > max_pad:
        logger.warning(
            f"Padding {padding} exceeds max_pad={max_pad}, search is incomplete"
        )

        return FeasibilityResult(
            False, method="exhaustive", block_size=m, padding=padding, complete=False
        )

    top = cols[-1][-1] + m

    def place(i: int, low: int) -> Optional[List[FinSubset]]:
        if i == len(cols):
            return []

        col = cols[i]
        high = cols[i + 1][0] if i + 1 < len(cols) else top + 1
        taken = set(col)
        candidates = [e for e in range(low + 1, high) if e not in taken]

        for pads in itertools.combinations(candidates, padding[i]):
            block = FinSubset(sorted(col + list(pads)))

            if i == 0 and schreier and m > block[0]:
                continue

            if i + 1 < len(cols) and block[-1] >= cols[i + 1][0]:
                continue

            rest = place(i + 1, block[-1])

            if rest is not None:
                return [block] + rest

        return None

    found = place(0, 0)

    return FeasibilityResult(
        found is not None,
        witness=None if found is None else tuple(found),
        method="exhaustive",
        block_size=m,
        padding=padding,
    )


def is_schreier_plegmatic(
    members: Iterable[Sequence[int]], max_pad: Optional[int] = None
) -> FeasibilityResult:
    """is_schreier_plegmatic Decide whether P is Schreier plegmatic

    P is Schreier plegmatic if there are blocks F_1 < ... < F_{k+1} of equal size with
    P inside F_1 x ... x F_{k+1} and |F_1| <= min F_1. The decision comes from the exhaustive
    placement search, cross-checked with the greedy placement.

    Args:
        members (Iterable[Sequence[int]]): P, a nonempty family of (k+1)-sets
        max_pad (Optional[int]): Largest number of padding integers searched per block

    Returns:
        FeasibilityResult: feasibility and witness blocks

    Examples:
        >>> is_schreier_plegmatic([(2, 4), (3, 5)]).witness
        ((2, 3), (4, 5))
        >>> bool(is_schreier_plegmatic([(1, 3), (2, 4)]))
        False
    """
    members = _as_members(members)
    greedy = greedy_blocks(members, schreier=True)
    exact = exhaustive_blocks(members, schreier=True, max_pad=max_pad)

    if not exact.complete:
        greedy.complete = False

        return greedy

    exact.agreed = exact.feasible == greedy.feasible

    if not exact.agreed:
        logger.error(
            f"Greedy and exhaustive placements disagree on {[tuple(s) for s in members]}"
        )

    return exact


def is_plegmatic(members: Iterable[Sequence[int]]) -> FeasibilityResult:
    """Equal-size covering blocks exist (no Schreier condition)"""
    return greedy_blocks(members, schreier=False)


def weakly_plegmatic_failure(
    path: Sequence[Iterable[Sequence[int]]],
) -> Optional[Tuple[int, FinSubset]]:
    """weakly_plegmatic_failure First (i, s2) with s2 in G_{i+1} and no partner in G_i

    Returns None when the path is weakly plegmatic.
    """
    groups = [_as_members(g) for g in path]

    if len({len(g[0]) for g in groups}) > 1:
        raise InvalidInput(
            "All sets along a weakly plegmatic path share their cardinality"
        )

    for i, (prev, nxt) in enumerate(zip(groups, groups[1:])):
        for s2 in nxt:
            if not any(is_plegmatic([s1, s2]) for s1 in prev):
                return i, s2

    return None


def is_weakly_plegmatic_path(path: Sequence[Iterable[Sequence[int]]]) -> bool:
    """is_weakly_plegmatic_path Every consecutive (G_i, G_{i+1}) is weakly plegmatic

    A pair (G_1, G_2) is weakly plegmatic if every s2 in G_2 has some s1 in G_1 such that
    {s1, s2} is plegmatic.

    Examples:
        >>> is_weakly_plegmatic_path([[(2, 5)], [(3, 6)]])
        True
        >>> is_weakly_plegmatic_path([[(1, 2)], [(2, 3)]])
        False
    """
    failure = weakly_plegmatic_failure(path)

    if failure is not None:
        logger.debug(f"No plegmatic partner in G_{failure[0]} for {tuple(failure[1])}")

    return failure is None


@dataclass
class FirstCoordinateBound:
    max_first: int
    max_last_start: int

    @property
    def holds(self) -> bool:
        return self.max_first <= self.max_last_start


def first_coordinate_bound(
    path: Sequence[Iterable[Sequence[int]]]
) -> FirstCoordinateBound:
    """first_coordinate_bound Compare max s(1) over all G_j with max s(k+1) over G_0

    Along a weakly plegmatic path (G_0, ..., G_k) of (k+1)-sets the first coordinates never
    pass the last coordinates of the starting group.
    """
    groups = [_as_members(g) for g in path]

    return FirstCoordinateBound(
        max_first=max(s[0] for g in groups for s in g),
        max_last_start=max(s[-1] for s in groups[0]),
    )
