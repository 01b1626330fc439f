"""Partitions of variable indices and the union-find used to derive them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Partition:
    """Disjoint, exhaustive blocks of variable indices.

    Blocks are stored normalized: each block sorted ascending, blocks ordered
    by their smallest member, and the union equal to {0, ..., n-1}.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("partition blocks must be nonempty")
            if list(block) != sorted(block):
                raise ValueError(f"block {block} is not sorted")
            if seen & set(block):
                raise ValueError(f"block {block} overlaps another block")
            seen.update(block)
        if seen != set(range(len(seen))):
            raise ValueError(f"blocks must cover a contiguous index range, got {sorted(seen)}")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ValueError("blocks must be ordered by smallest member")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> Partition:
        """Normalize arbitrary block order into a Partition."""
        normalized = sorted((tuple(sorted(set(b))) for b in blocks), key=lambda b: b[0] if b else -1)
        return cls(tuple(normalized))

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(tuple((i,) for i in range(n)))

    @property
    def var_count(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def is_all_singletons(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def is_coarsening_of(self, finer: Partition) -> bool:
        """True when every block of `finer` lies inside one of this partition's blocks."""
        if self.var_count != finer.var_count:
            return False
        owner = {}
        for k, block in enumerate(self.blocks):
            for i in block:
                owner[i] = k
        return all(len({owner[i] for i in block}) == 1 for block in finer.blocks)

    def name_blocks(self, names: Sequence[str]) -> list[list[str]]:
        return [[names[i] for i in block] for block in self.blocks]


class UnionFind:
    """Minimal union-find with path compression, for connected components."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def partition(self) -> Partition:
        groups: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            groups.setdefault(self.find(i), []).append(i)
        return Partition.from_blocks(groups.values())
