"""Mode partitions ``A1|...|AM`` and the block-decorrelated covariance matrix.

Partitions are stored canonically (blocks sorted by smallest element,
elements ascending), so ``A|B`` and ``B|A`` are the same object. ``str()``
renders singletons first, then larger blocks, matching labels such as
``C|D|AB`` or ``A|BCD``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import PartitionMismatchError, TooManyModesError
from .symplectic import n_modes_of

LETTERS = "ABCDEFGHIJKL"
MAX_MODES = len(LETTERS)


@dataclass(frozen=True)
class ModePartition:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(int(m) for m in b)) for b in self.blocks), key=lambda b: b[0] if b else -1))
        if not blocks or any(len(b) == 0 for b in blocks):
            raise PartitionMismatchError("partition blocks must be non-empty")
        flat = [m for b in blocks for m in b]
        if len(set(flat)) != len(flat):
            raise PartitionMismatchError(f"blocks overlap: {blocks}")
        if min(flat) < 0:
            raise PartitionMismatchError("negative mode index")
        object.__setattr__(self, "blocks", blocks)

    @property
    def modes(self) -> tuple:
        return tuple(sorted(m for b in self.blocks for m in b))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def is_trivial(self) -> bool:
        return len(self.blocks) < 2

    @property
    def partition_class(self) -> tuple:
        """Block sizes in ascending order, e.g. ``(1, 1, 2)``."""
        return tuple(sorted(len(b) for b in self.blocks))

    def relabel(self, modes: Sequence[int]) -> "ModePartition":
        """Map local indices ``0..n-1`` to the mode indices in ``modes``."""
        return ModePartition(tuple(tuple(modes[m] for m in b) for b in self.blocks))

    def localize(self, modes: Sequence[int]) -> "ModePartition":
        """Inverse of :meth:`relabel`: express the partition in positions of ``modes``."""
        pos = {m: i for i, m in enumerate(modes)}
        try:
            return ModePartition(tuple(tuple(pos[m] for m in b) for b in self.blocks))
        except KeyError as exc:
            raise PartitionMismatchError(f"mode {exc.args[0]} not among {list(modes)}") from None

    def label(self, style: str = "paper") -> str:
        if style == "canonical":
            ordered = self.blocks
        else:
            ordered = sorted(self.blocks, key=lambda b: (len(b), b))
        return "|".join("".join(LETTERS[m] for m in b) for b in ordered)

    def __str__(self) -> str:
        return self.label()


def parse_partition(text: str, n_modes: int | None = None) -> ModePartition:
    """Parse ``"A|BC"`` (case-insensitive) into a :class:`ModePartition`.

    When ``n_modes`` is given the blocks must cover modes ``0..n_modes-1``.
    """
    if not isinstance(text, str) or not text.strip():
        raise PartitionMismatchError(f"empty partition string {text!r}")
    blocks = []
    for raw in text.strip().upper().split("|"):
        raw = raw.strip()
        if not raw:
            raise PartitionMismatchError(f"empty block in {text!r}")
        bad = [c for c in raw if c not in LETTERS]
        if bad:
            raise PartitionMismatchError(f"invalid mode letter(s) {bad} in {text!r}")
        blocks.append(tuple(LETTERS.index(c) for c in raw))
    part = ModePartition(tuple(blocks))
    if n_modes is not None and part.modes != tuple(range(n_modes)):
        raise PartitionMismatchError(f"{text!r} does not cover modes {LETTERS[:n_modes]}")
    return part


def _set_partitions(items: list) -> Iterator[list]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        yield [[first]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]


@lru_cache(maxsize=None)
def bell_number(n: int) -> int:
    """Bell numbers via the Bell triangle."""
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def _sort_key(p: ModePartition):
    return (-p.n_blocks, p.partition_class, p.blocks)


def enumerate_partitions(n_modes: int, partition_class: Sequence[int] | None = None) -> list:
    """All partitions of ``n_modes`` modes into at least two blocks.

    ``partition_class`` restricts the result to one class of block sizes, e.g.
    ``(1, 1, 2)``. Ordering: finest partitions first, then by class, then
    lexicographically by canonical blocks.
    """
    if n_modes < 1:
        raise PartitionMismatchError("need at least one mode")
    if n_modes > MAX_MODES:
        raise TooManyModesError(f"{n_modes} modes exceed the supported maximum {MAX_MODES}")
    want = None if partition_class is None else tuple(sorted(int(s) for s in partition_class))
    if want is not None and sum(want) != n_modes:
        raise PartitionMismatchError(f"class {want} does not sum to {n_modes}")
    out = []
    for blocks in _set_partitions(list(range(n_modes))):
        if len(blocks) < 2:
            continue
        p = ModePartition(tuple(tuple(b) for b in blocks))
        if want is None or p.partition_class == want:
            out.append(p)
    return sorted(out, key=_sort_key)


def class_counts(partitions) -> Counter:
    return Counter(p.partition_class for p in partitions)


def block_mask(partition: ModePartition, n_modes: int) -> np.ndarray:
    """Boolean ``2N x 2N`` mask, True where both quadratures sit in one block."""
    if partition.modes != tuple(range(n_modes)):
        raise PartitionMismatchError(
            f"partition {partition.label('canonical')} does not cover {n_modes} modes"
        )
    lab = np.empty(n_modes, dtype=int)
    for b, block in enumerate(partition.blocks):
        lab[list(block)] = b
    q = np.repeat(lab, 2)
    return q[:, None] == q[None, :]


def project_block_diagonal(gamma, partition: ModePartition) -> np.ndarray:
    """Zero every entry that links quadratures of different blocks."""
    g = np.asarray(gamma, dtype=float)
    return np.where(block_mask(partition, n_modes_of(g)), g, 0.0)


def as_partition(p, n_modes: int | None = None) -> ModePartition:
    if isinstance(p, ModePartition):
        if n_modes is not None and p.modes != tuple(range(n_modes)):
            raise PartitionMismatchError(f"partition {p} does not cover {n_modes} modes")
        return p
    if isinstance(p, str):
        return parse_partition(p, n_modes)
    return as_partition(ModePartition(tuple(tuple(b) for b in p)), n_modes)
