"""Bit words, riffle permutations and the salt-driven inverse riffle shuffle.

A bit word ``B`` induces the riffle permutation ``pi_B`` that stably sends the
positions holding a 0 to the front and the positions holding a 1 to the back.
Running the inverse riffle shuffle with hash-derived coin flips until every
card carries a distinct bit history yields a uniformly random permutation
(under the random-oracle assumption on the hash).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import InternalError, UsageError

HashFunction = Callable[[bytes], bytes]

T = TypeVar("T")


def sha256(data: bytes) -> bytes:
    """Default hash: SHA-256 returning the raw 32-byte digest."""
    return hashlib.sha256(data).digest()


@dataclass(frozen=True)
class BitWord:
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise UsageError("a bit word needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise UsageError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> BitWord:
        if not text or set(text) - {"0", "1"}:
            raise UsageError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text))

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, i: int) -> int:
        return self.bits[i]

    def __iter__(self):
        return iter(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def complement(self) -> BitWord:
        return BitWord(tuple(1 - b for b in self.bits))

    def hamming_weight(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``range(n)`` stored as ``mapping[i] == p(i)``."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        mapping = tuple(int(x) for x in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise UsageError(f"not a permutation of range({len(mapping)})")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __iter__(self):
        return iter(self.mapping)

    def inverse(self) -> Permutation:
        return invert_permutation(self)

    def then(self, other: Permutation) -> Permutation:
        """The permutation ``i -> other(self(i))``."""
        return compose(other, self)


def _as_word(word: BitWord | Sequence[int] | str) -> BitWord:
    if isinstance(word, BitWord):
        return word
    if isinstance(word, str):
        return BitWord.from_string(word)
    return BitWord(tuple(word))


def rank(word: BitWord | Sequence[int] | str, i: int) -> int:
    """Number of positions ``j < i`` holding the same bit as position ``i``."""
    word = _as_word(word)
    if not 0 <= i < len(word):
        raise UsageError(f"index {i} out of range for a word of length {len(word)}")
    b = word[i]
    return sum(1 for j in range(i) if word[j] == b)


def riffle_permutation(word: BitWord | Sequence[int] | str) -> Permutation:
    word = _as_word(word)
    zeros = len(word) - word.hamming_weight()
    seen = [0, 0]
    out = []
    for b in word:
        out.append(seen[b] + (zeros if b else 0))
        seen[b] += 1
    return Permutation(tuple(out))


def apply_permutation(p: Permutation, seq: Sequence[T]) -> list[T]:
    """Move the element at position ``k`` to position ``p(k)``."""
    if len(seq) != len(p):
        raise UsageError(f"length mismatch: permutation {len(p)}, sequence {len(seq)}")
    out: list = [None] * len(seq)
    for k, x in enumerate(seq):
        out[p.mapping[k]] = x
    return out


def invert_permutation(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, pi in enumerate(p.mapping):
        out[pi] = i
    return Permutation(tuple(out))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p after q``: the permutation ``i -> p(q(i))``."""
    if len(p) != len(q):
        raise UsageError("cannot compose permutations of different sizes")
    return Permutation(tuple(p.mapping[x] for x in q.mapping))


def shuffle_bit(h: HashFunction, salt: bytes, card: int, round: int) -> int:
    """Coin flip for position ``card`` (1-based) in shuffle round ``round``.

    The bit is the most significant bit of the first byte of
    ``h(salt || LE64(card) || LE64(round))``.
    """
    digest = h(bytes(salt) + card.to_bytes(8, "little") + round.to_bytes(8, "little"))
    return digest[0] >> 7


@dataclass(frozen=True)
class ShuffleResult:
    permutation: Permutation
    rounds: int


def round_cap(n: int) -> int:
    return int(64 * math.log2(n)) + 512 if n > 1 else 0


def inverse_riffle_shuffle(h: HashFunction, n: int, salt: bytes) -> ShuffleResult:
    """Shuffle ``n`` cards until every card has a distinct bit history.

    Each round, position ``w`` (1-based) gets the bit ``shuffle_bit(h, salt, w, r)``;
    the 0-pile is stacked in front of the 1-pile, both keeping their order.
    """
    if n < 1:
        raise UsageError("need at least one card")
    deck = list(range(n))
    history = [0] * n
    salt = bytes(salt)
    rounds = 0
    cap = round_cap(n)
    while len(set(history)) < n:
        if rounds >= cap:
            raise InternalError(f"inverse riffle shuffle exceeded {cap} rounds; hash looks degenerate")
        suffix = rounds.to_bytes(8, "little")
        piles: tuple[list[int], list[int]] = ([], [])
        for w, card in enumerate(deck, start=1):
            b = h(salt + w.to_bytes(8, "little") + suffix)[0] >> 7
            piles[b].append(card)
            history[card] = (history[card] << 1) | b
        deck = piles[0] + piles[1]
        rounds += 1
    return ShuffleResult(Permutation(tuple(deck)), rounds)


def words_from_strings(words: Iterable[str]) -> tuple[BitWord, ...]:
    return tuple(BitWord.from_string(w) for w in words)
