"""Binary representation of a permutation and trajectory tracing.

``binary_representation`` writes sigma(j) MSB-first into row ``j`` of a
``2**g x g`` bit matrix.  ``trace_trajectories`` re-expresses its columns as the
per-layer words of the graph: column ``i`` is pushed through the riffle
permutation of traced column ``i - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import UsageError
from .permute import BitWord, Permutation, apply_permutation, compose, riffle_permutation


@dataclass(frozen=True)
class BitMatrix:
    columns: tuple[BitWord, ...]

    def __post_init__(self) -> None:
        columns = tuple(c if isinstance(c, BitWord) else BitWord(tuple(c)) for c in self.columns)
        if not columns:
            raise UsageError("a bit matrix needs at least one column")
        n = len(columns[0])
        if n != 1 << len(columns) or any(len(c) != n for c in columns):
            raise UsageError(f"expected {len(columns)} columns of length {1 << len(columns)}")
        object.__setattr__(self, "columns", columns)

    @property
    def g(self) -> int:
        return len(self.columns)

    @property
    def size(self) -> int:
        return len(self.columns[0])

    def row(self, j: int) -> tuple[int, ...]:
        return tuple(col[j] for col in self.columns)

    def rows(self) -> list[tuple[int, ...]]:
        return [self.row(j) for j in range(self.size)]


def binary_representation(sigma: Permutation | Sequence[int], g: int) -> BitMatrix:
    if not isinstance(sigma, Permutation):
        sigma = Permutation(tuple(sigma))
    if g < 1 or len(sigma) != 1 << g:
        raise UsageError(f"permutation of size {len(sigma)} does not match g={g}")
    return BitMatrix(tuple(
        BitWord(tuple((v >> (g - 1 - i)) & 1 for v in sigma.mapping)) for i in range(g)
    ))


def trace_trajectories(b: BitMatrix, cumulative: bool = False) -> BitMatrix:
    """Traced layer words: ``T[0] = B[0]``, ``T[i] = apply(pi_{T[i-1]}, B[i])``.

    With ``cumulative=True`` column ``i`` is instead pushed through the
    composition ``pi_{T[i-1]} o ... o pi_{T[0]}``, which makes every input
    follow exactly the bits of sigma(j).  The default is the plain rule used
    by the hash.
    """
    traced = [b.columns[0]]
    moved = Permutation.identity(b.size)
    for col in b.columns[1:]:
        step = riffle_permutation(traced[-1])
        moved = compose(step, moved) if cumulative else step
        traced.append(BitWord(tuple(apply_permutation(moved, col.bits))))
    return BitMatrix(tuple(traced))


def walk(traj: BitMatrix, j: int) -> tuple[tuple[int, ...], int]:
    """Follow input ``j`` along the pi-edges of the upper layers.

    Returns the bits read at each layer and the final column.
    """
    if not 0 <= j < traj.size:
        raise UsageError(f"input {j} out of range")
    bits = []
    pos = j
    for word in traj.columns:
        bits.append(word[pos])
        pos = riffle_permutation(word)(pos)
    return tuple(bits), pos


def trajectory_endpoint(traj: BitMatrix, j: int) -> int:
    """Column predicted by reading input ``j``'s trajectory bits in reverse.

    The prediction matches the actual walk endpoint whenever all inputs have
    pairwise distinct trajectories (the last layer is the most significant
    bit of the final position).
    """
    bits, _ = walk(traj, j)
    k = 0
    for b in reversed(bits):
        k = (k << 1) | b
    return k
