import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from plegmalab.norms.base import NormEngine, NormValue
from plegmalab.norms.sparse import SparseVec
from plegmalab.util.errors import InvalidConfig, InvalidInput
from plegmalab.util.types import to_fraction


@dataclass(frozen=True)
class TsirelsonConfig:
    """TsirelsonConfig Parameters of the mixed Tsirelson-type norm

        ||x|| = max{ ||x||_inf, (sum_j ||x||_j^2)^(1/2) }
        ||x||_j = sup (1 / m_j) sum_{i <= n_j} ||E_i x||   over E_1 < ... < E_{n_j}

    Only the prefix j <= j_max is stored. tail_tolerance bounds sum_{j > j_max} 1 / m_j^2 for
    the continuation the prefix stands for. The asymptotic requirement n_j^a / m_j -> infinity
    cannot be checked on a prefix and is left to whoever picks the continuation.

    Args:
        m_seq (Tuple[int, ...]): m_1 < m_2 < ...
        n_seq (Tuple[int, ...]): n_1 < n_2 < ..., same length
        tail_tolerance (Fraction): Bound on the squared weights beyond the prefix
        name (str): Label used in outputs
    """

    m_seq: Tuple[int, ...]
    n_seq: Tuple[int, ...]
    tail_tolerance: Fraction = Fraction(1, 9900)
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "m_seq", tuple(int(m) for m in self.m_seq))
        object.__setattr__(self, "n_seq", tuple(int(n) for n in self.n_seq))
        object.__setattr__(self, "tail_tolerance", to_fraction(self.tail_tolerance))

    @classmethod
    def from_dict(cls, cfg: Dict[str, Any]) -> "TsirelsonConfig":
        try:
            return cls(
                m_seq=tuple(cfg["m_seq"]),
                n_seq=tuple(cfg["n_seq"]),
                tail_tolerance=to_fraction(
                    cfg.get("tail_tolerance", Fraction(1, 9900))
                ),
                name=str(cfg.get("name", "custom")),
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidConfig(f"Malformed Tsirelson config {cfg}: {exc}")

    @classmethod
    def preset(cls, name: str) -> "TsirelsonConfig":
        from plegmalab.config.presets import TsirelsonPreset

        try:
            values = TsirelsonPreset[name.upper()].value
        except KeyError:
            raise InvalidConfig(
                f"Unknown Tsirelson preset '{name}'. Available: {[p.name.lower() for p in TsirelsonPreset]}"
            )

        return cls.from_dict({**values, "name": name.lower()}).validate()

    @property
    def j_max(self) -> int:
        return len(self.m_seq)

    def problems(self) -> List[str]:
        """All violated finite conditions, empty for a valid config"""
        errors = []
        m, n = self.m_seq, self.n_seq

        if not m or len(m) != len(n):
            errors.append("m_seq and n_seq must be nonempty and of equal length")

            return errors

        if any(a >= b for a, b in zip(m, m[1:])) or any(
            a >= b for a, b in zip(n, n[1:])
        ):
            errors.append("m_seq and n_seq must be strictly increasing")

        if m[0] < 2:
            errors.append("m_1 must be at least 2")

        if n[0] < 2:
            errors.append("n_1 must be at least 2")

        weight = sum((Fraction(1, mj) for mj in m), Fraction(0))

        if weight > Fraction(1, 10):
            errors.append(f"sum 1/m_j = {weight} exceeds 1/10")

        for j in range(len(m) - 1):
            if n[j] * m[j] >= n[j + 1]:
                errors.append(f"n_{j + 1}/n_{j + 2} < 1/m_{j + 1} fails")

        if self.tail_tolerance <= 0:
            errors.append("tail_tolerance must be positive")

        return errors

    def validate(self) -> "TsirelsonConfig":
        errors = self.problems()

        if errors:
            raise InvalidConfig(
                f"Invalid Tsirelson config '{self.name}': " + "; ".join(errors)
            )

        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "m_seq": list(self.m_seq),
            "n_seq": list(self.n_seq),
            "tail_tolerance": str(self.tail_tolerance),
        }


def _moduli(x: SparseVec) -> Tuple[List[int], np.ndarray]:
    if x and x.arity is not None:
        raise InvalidInput("The Tsirelson-type norm acts on vectors indexed by N")

    support = x.support()

    return support, np.array([abs(float(x[i])) for i in support], dtype=np.float64)


class _IntervalDP:
    """Norms of all sub-intervals of the support, computed by increasing left endpoint order

    With prev=None the pieces of a partition are evaluated with the table being built, which
    only needs strictly shorter intervals. With prev given, one step of the fixed point
    iteration is performed: pieces (and the one piece partition) use prev.
    """

    def __init__(self, a: np.ndarray, cfg: TsirelsonConfig):
        self.a = a
        self.size = len(a)
        self.m = np.array(cfg.m_seq, dtype=np.float64)
        self.n = np.array(cfg.n_seq, dtype=np.int64)
        self.prefix = np.concatenate([[0.0], np.cumsum(a)])
        below = [int(nj) for nj in cfg.n_seq if nj < self.size]
        self.pieces = max(below) if below else 0

    def l1(self, i: int, r: int) -> float:
        return float(self.prefix[r + 1] - self.prefix[i])

    def table(self, prev: Optional[np.ndarray] = None) -> np.ndarray:
        size = self.size
        V = np.zeros((size, size), dtype=np.float64)
        source = V if prev is None else prev
        rows = max(self.pieces - 1, 0)

        for i in range(size - 1, -1, -1):
            # G[q, r]: best sum over partitions of [i..r] into at most q + 1 runs
            G = np.zeros((rows, size), dtype=np.float64)
            run_max = 0.0

            for r in range(i, size):
                run_max = max(run_max, self.a[r])
                length = r - i + 1

                if length == 1:
                    V[i, r] = self.a[r]

                    if rows:
                        G[:, r] = V[i, r]

                    continue

                B = np.full(len(self.m), self.l1(i, r))
                H = None

                if rows:
                    H = (G[:, i:r] + source[i + 1 : r + 1, r][None, :]).max(axis=1)
                    short = self.n < length
                    B[short] = H[self.n[short] - 2]

                    if prev is not None:
                        B[short] = np.maximum(B[short], prev[i, r])

                V[i, r] = max(run_max, math.sqrt(float(((B / self.m) ** 2).sum())))

                if rows:
                    assert H is not None
                    G[0, r] = V[i, r] if prev is None else prev[i, r]
                    G[1:, r] = np.maximum(G[0, r], H[:-1])

        return V


def _error_bound(cfg: TsirelsonConfig, x: SparseVec) -> float:
    if len(x) <= 1:
        return 0.0

    return 10 / 9 * math.sqrt(float(cfg.tail_tolerance)) * float(x.l1())


def tsirelson_table(cfg: TsirelsonConfig, x: SparseVec) -> Tuple[List[int], np.ndarray]:
    """Support of x and the norms of all its sub-intervals"""
    support, a = _moduli(x)

    if not support:
        return support, np.zeros((0, 0))

    return support, _IntervalDP(a, cfg).table()


def tsirelson_eval(cfg: TsirelsonConfig, x: SparseVec) -> NormValue:
    """tsirelson_eval Norm of a finitely supported x in the mixed Tsirelson-type space

    The interval table is filled by a dynamic program over left endpoints. For an interval of
    length L the j-th term uses the l1 mass when n_j >= L (singletons are best), and otherwise
    the best partition into between 2 and n_j consecutive runs of already computed shorter
    intervals. Only |x_i| enters, so the value is invariant under sign changes.

    Args:
        cfg (TsirelsonConfig): Validated parameters
        x (SparseVec): Vector over N

    Returns:
        NormValue: value (norm of the finite prefix) and error_bound for the omitted j > j_max

    Examples:
        >>> cfg = TsirelsonConfig.preset("desk")
        >>> tsirelson_eval(cfg, SparseVec({1: 1})).value
        1.0
    """
    cfg.validate()
    support, V = tsirelson_table(cfg, x)

    if not support:
        return NormValue.rational(Fraction(0))

    value = float(V[0, -1])
    bound = _error_bound(cfg, x)

    if len(support) == 1:
        return NormValue.rational(x.linf())

    return NormValue(
        value=value, error_bound=bound, upper_bound=value + bound, is_exact=False
    )


def seminorm(cfg: TsirelsonConfig, x: SparseVec, j: int) -> float:
    """seminorm ||x||_j, the best (1 / m_j) sum ||E_i x|| over at most n_j successive sets

    Args:
        j (int): 1-based index into the configured prefix
    """
    if not 1 <= j <= cfg.j_max:
        raise InvalidInput(f"j must lie in 1..{cfg.j_max}")

    partition = best_partition(cfg, x, cfg.n_seq[j - 1])

    return partition[0] / cfg.m_seq[j - 1]


def best_partition(
    cfg: TsirelsonConfig, x: SparseVec, max_pieces: int
) -> Tuple[float, List[List[int]]]:
    """Largest sum of norms over partitions of supp(x) into at most max_pieces runs"""
    support, V = tsirelson_table(cfg, x)
    size = len(support)

    if size == 0:
        return 0.0, []

    pieces = min(max_pieces, size)
    # D[c, r]: best sum for supp[0..r] cut into exactly c + 1 runs
    D = np.full((pieces, size), -np.inf)
    cut = np.zeros((pieces, size), dtype=np.int64)
    D[0, :] = V[0, :]

    for c in range(1, pieces):
        for r in range(c, size):
            cand = D[c - 1, c - 1 : r] + V[c : r + 1, r]
            best = int(np.argmax(cand))
            D[c, r] = cand[best]
            cut[c, r] = best + c - 1

    c = int(np.argmax(D[:, size - 1]))
    total = float(D[c, size - 1])
    blocks = []
    r = size - 1

    while c > 0:
        left = int(cut[c, r])
        blocks.append(support[left + 1 : r + 1])
        r, c = left, c - 1

    blocks.append(support[: r + 1])

    return total, list(reversed(blocks))


@dataclass
class BlockCertificate:
    j: int
    m_j: int
    blocks: List[List[int]] = field(default_factory=list)
    block_sum: float = 0.0

    @property
    def lower_bound(self) -> float:
        return self.block_sum / self.m_j

    def to_json(self) -> Dict[str, Any]:
        return {
            "j": self.j,
            "m_j": self.m_j,
            "blocks": self.blocks,
            "block_sum": self.block_sum,
            "lower_bound": self.lower_bound,
        }


def block_certificate(cfg: TsirelsonConfig, x: SparseVec) -> BlockCertificate:
    """block_certificate The j and partition E_1 < ... < E_{n_j} maximizing (1 / m_j) sum ||E_i x||"""
    cfg.validate()
    best: Optional[BlockCertificate] = None

    for j, (mj, nj) in enumerate(zip(cfg.m_seq, cfg.n_seq), start=1):
        total, blocks = best_partition(cfg, x, nj)
        cert = BlockCertificate(j=j, m_j=mj, blocks=blocks, block_sum=total)

        if best is None or cert.lower_bound > best.lower_bound:
            best = cert

    assert best is not None

    return best


def block_lower_bound(
    cfg: TsirelsonConfig, x: SparseVec, cert: BlockCertificate
) -> float:
    """Re-evaluate every block of a certificate on its own, giving an independent lower bound"""
    if len(cert.blocks) > cfg.n_seq[cert.j - 1]:
        raise InvalidInput("Certificate uses more blocks than n_j allows")

    total = sum(
        tsirelson_eval(
            cfg, x.restrict(lambda i, blk=set(blk): i in blk)  # type: ignore
        ).value
        for blk in cert.blocks
    )

    return max(float(x.linf()), total / cert.m_j)


def fixed_point_trace(
    cfg: TsirelsonConfig, x: SparseVec, max_iter: Optional[int] = None
) -> List[float]:
    """fixed_point_trace Iterate v_{t+1} = max{||.||_inf, (sum_j (||.||_j under v_t)^2)^(1/2)}

    Starts from the sup norm on every sub-interval of the support. The sequence of values of x
    is nondecreasing and becomes constant after at most |supp x| steps.

    Returns:
        List[float]: v_0(x), v_1(x), ... up to the first repeated table
    """
    cfg.validate()
    support, a = _moduli(x)

    if not support:
        return [0.0]

    dp = _IntervalDP(a, cfg)
    size = len(support)
    current = np.zeros((size, size))

    for i in range(size):
        current[i, i:] = np.maximum.accumulate(a[i:])

    trace = [float(current[0, -1])]
    limit = size + 1 if max_iter is None else max_iter

    for _ in range(limit):
        nxt = np.maximum(dp.table(prev=current), current)

        if np.array_equal(nxt, current):
            break

        current = nxt
        trace.append(float(current[0, -1]))

    logger.debug(f"Fixed point reached after {len(trace) - 1} steps")

    return trace


def mean_of_blocks(blocks: Sequence[SparseVec]) -> SparseVec:
    """(x_1 + ... + x_n) / n"""
    total = SparseVec()

    for b in blocks:
        total += b

    return total * Fraction(1, max(len(blocks), 1))


class TsirelsonNorm(NormEngine):
    name = "tsirelson_like"

    def __init__(self, config: Optional[TsirelsonConfig] = None, preset: str = "desk"):
        self.config = (config or TsirelsonConfig.preset(preset)).validate()

    @property
    def params(self) -> Dict[str, Any]:
        return self.config.to_dict()

    def evaluate(self, x: SparseVec) -> NormValue:
        return tsirelson_eval(self.config, x)

    def certify(self, x: SparseVec) -> BlockCertificate:
        return block_certificate(self.config, x)
