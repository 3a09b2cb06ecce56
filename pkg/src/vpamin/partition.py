from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class StatePartition:
    """Equivalence relation over states ``0 .. n-1`` stored as block labels.

    Labels are canonical: blocks are numbered in order of their smallest
    member, so two partitions are equal iff their ``block_of`` tuples are.
    """

    block_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "block_of", _canonical(self.block_of))

    @classmethod
    def from_blocks(cls, n_states: int, blocks: Iterable[Iterable[int]]) -> "StatePartition":
        labels = [-1] * n_states
        for i, block in enumerate(blocks):
            for q in block:
                if labels[q] != -1:
                    raise ValueError(f"state {q} occurs in two blocks")
                labels[q] = i
        # states not mentioned become singletons
        nxt = max(labels, default=-1) + 1
        for q in range(n_states):
            if labels[q] == -1:
                labels[q] = nxt
                nxt += 1
        return cls(tuple(labels))

    @classmethod
    def discrete(cls, n_states: int) -> "StatePartition":
        return cls(tuple(range(n_states)))

    @classmethod
    def single(cls, n_states: int) -> "StatePartition":
        return cls((0,) * n_states)

    @property
    def n_states(self) -> int:
        return len(self.block_of)

    @property
    def n_blocks(self) -> int:
        return max(self.block_of, default=-1) + 1

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for q, b in enumerate(self.block_of):
            out[b].append(q)
        return tuple(tuple(b) for b in out)

    def related(self, p: int, q: int) -> bool:
        return self.block_of[p] == self.block_of[q]

    def merge(self, p: int, q: int) -> "StatePartition":
        bp, bq = self.block_of[p], self.block_of[q]
        return StatePartition(tuple(bp if b == bq else b for b in self.block_of))

    def refines(self, other: "StatePartition") -> bool:
        """True iff every block of ``self`` lies inside a block of ``other``."""
        seen: dict[int, int] = {}
        for mine, theirs in zip(self.block_of, other.block_of):
            if seen.setdefault(mine, theirs) != theirs:
                return False
        return True

    def pairs(self) -> Iterable[tuple[int, int]]:
        """Related pairs ``(p, q)`` with ``p < q``."""
        for block in self.blocks:
            for i, p in enumerate(block):
                for q in block[i + 1:]:
                    yield p, q


def _canonical(labels: Sequence[int]) -> tuple[int, ...]:
    remap: dict[int, int] = {}
    return tuple(remap.setdefault(b, len(remap)) for b in labels)
