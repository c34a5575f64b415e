"""Set partitions, their join and rank-based representative sets.

A partition is stored canonically as a tuple of sorted blocks, the blocks
ordered by their smallest element. Two partitions ``a`` and ``b`` of the same
ground set join to the partition whose blocks are the connected components of
the union of their block graphs.
"""

import logging
import typing as t
from dataclasses import dataclass

from networkx.utils import UnionFind
from typing_extensions import Protocol

from spanner_forge.exceptions import InputError

logger = logging.getLogger(__name__)

Element = int
Block = t.Tuple[Element, ...]
Partition = t.Tuple[Block, ...]


def canonical_partition(blocks: t.Iterable[t.Iterable[Element]]) -> Partition:
    """Canonical form of a partition.

    Raises:
        InputError: If a block is empty or two blocks overlap.
    """
    result = tuple(sorted(tuple(sorted(block)) for block in blocks))
    seen: t.Set[Element] = set()
    for block in result:
        if not block:
            raise InputError("Partitions cannot contain empty blocks")
        if seen.intersection(block):
            raise InputError(f"Blocks of {result} are not disjoint")
        seen.update(block)
    return result


def ground_set(partition: Partition) -> t.FrozenSet[Element]:
    """Union of all blocks."""
    return frozenset(x for block in partition for x in block)


def join_partitions(alpha: Partition, beta: Partition) -> Partition:
    """Join of two partitions of the same ground set.

    Raises:
        InputError: If the ground sets differ.
    """
    ground = ground_set(alpha)
    if ground != ground_set(beta):
        raise InputError(
            f"Cannot join partitions of different ground sets {sorted(ground)} "
            f"and {sorted(ground_set(beta))}"
        )
    return _union(ground, alpha, beta)


def _union(ground: t.Iterable[Element], *partitions: Partition) -> Partition:
    parts = UnionFind(ground)
    for partition in partitions:
        for block in partition:
            parts.union(*block)
    return canonical_partition(parts.to_sets())


def merge_elements(partition: Partition, u: Element, v: Element) -> Partition:
    """Join with the partition that only puts ``u`` and ``v`` together."""
    return _union(ground_set(partition), partition, ((u, v),))


def add_singleton(partition: Partition, x: Element) -> Partition:
    """Extend the ground set by ``x`` as its own block."""
    return canonical_partition(partition + ((x,),))


def remove_element(partition: Partition, x: Element) -> Partition:
    """Drop ``x`` from its block (and the block if it becomes empty)."""
    return canonical_partition(
        tuple(y for y in block if y != x)
        for block in partition
        if block != (x,)
    )


def block_of(partition: Partition, x: Element) -> Block:
    """Block containing ``x``."""
    for block in partition:
        if x in block:
            return block
    raise InputError(f"{x!r} is not in partition {partition}")


def set_partitions(elements: t.Iterable[Element]) -> t.Iterator[Partition]:
    """All partitions of ``elements`` in canonical form."""
    items = sorted(elements)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield canonical_partition(((first,),) + partition)
        for index, block in enumerate(partition):
            yield canonical_partition(
                partition[:index] + ((first,) + block,) + partition[index + 1 :]
            )


def consistent_cuts(elements: t.Iterable[Element]) -> t.List[t.FrozenSet[Element]]:
    """Cuts ``(X, Y - X)`` of the ground set with the smallest element in ``X``.

    Only the side ``X`` is returned; there are ``2**(|Y| - 1)`` cuts.
    """
    items = sorted(elements)
    if not items:
        return []
    first, rest = items[0], items[1:]
    return [
        frozenset([first] + [x for bit, x in enumerate(rest) if mask >> bit & 1])
        for mask in range(1 << len(rest))
    ]


def is_consistent(partition: Partition, cut: t.FrozenSet[Element]) -> bool:
    """Whether every block lies on one side of ``cut``."""
    return all(set(block) <= cut or cut.isdisjoint(block) for block in partition)


class Weighted(Protocol):
    """Anything carrying a partition, a weight and a tie-breaking witness."""

    partition: Partition
    weight: float
    witness: t.Tuple[t.Any, ...]


W = t.TypeVar("W", bound=Weighted)


@dataclass(frozen=True)
class WeightedPartition:
    """Partition with a weight.

    Args:
        partition: Canonical partition.
        weight: Weight of the partial solution it stands for.
        witness: Tie-breaking payload, compared lexicographically.
    """

    partition: Partition
    weight: float
    witness: t.Tuple[t.Any, ...] = ()


def order_key(entry: Weighted) -> t.Tuple[float, t.Tuple[t.Any, ...], Partition]:
    """Deterministic order of weighted partitions (weight first)."""
    return entry.weight, entry.witness, entry.partition


def deduplicate(entries: t.Iterable[W]) -> t.List[W]:
    """Keep the smallest entry (by :func:`order_key`) of every partition."""
    best: t.Dict[Partition, W] = {}
    for entry in entries:
        current = best.get(entry.partition)
        if current is None or order_key(entry) < order_key(current):
            best[entry.partition] = entry
    return sorted(best.values(), key=order_key)


def reduce_representatives(
    entries: t.Iterable[W],
    ground: t.Optional[t.Iterable[Element]] = None,
    mode: str = "rank",
) -> t.List[W]:
    """Representative subset of weighted partitions of one ground set.

    Rows of the cuts matrix over GF(2) mark the consistent cuts of every
    partition. Scanning the entries by increasing weight, a row is kept when
    it is independent of the rows kept so far. For every partition ``b``
    some kept entry ``a'`` joins with ``b`` to the full block whenever an
    input entry ``a`` does, and ``a'`` is no heavier than ``a``.

    Args:
        entries: Weighted partitions over ``ground``.
        ground: Ground set. (default = ground set of the first entry)
        mode: ``"rank"`` or ``"keep-all"`` (deduplication only).
            (default = "rank")

    Returns:
        Kept entries in :func:`order_key` order; at most ``2**(|Y| - 1)``
        of them in rank mode.
    """
    unique = deduplicate(entries)
    if mode == "keep-all" or len(unique) <= 1:
        return unique
    if mode != "rank":
        raise InputError(f"Unknown reduction mode {mode!r}")
    elements = ground_set(unique[0].partition) if ground is None else ground
    cuts = consistent_cuts(elements)
    basis: t.Dict[int, int] = {}
    kept = []
    for entry in unique:
        row = 0
        for column, cut in enumerate(cuts):
            if is_consistent(entry.partition, cut):
                row |= 1 << column
        while row:
            pivot = row.bit_length() - 1
            if pivot not in basis:
                basis[pivot] = row
                kept.append(entry)
                break
            row ^= basis[pivot]
    logger.debug(
        "Reduced %d partitions to %d over %d cuts", len(unique), len(kept), len(cuts)
    )
    return kept


def represents(
    kept: t.Sequence[Weighted], original: t.Sequence[Weighted], ground: t.Iterable
) -> bool:
    """Check the representation property by enumerating every partition.

    Exponential in the ground set; meant for verification of small groups.
    """
    elements = sorted(ground)
    full = (tuple(elements),) if elements else ()

    def best(group: t.Sequence[Weighted], beta: Partition) -> float:
        return min(
            (
                entry.weight
                for entry in group
                if join_partitions(entry.partition, beta) == full
            ),
            default=float("inf"),
        )

    return all(
        best(kept, beta) <= best(original, beta) for beta in set_partitions(elements)
    )
