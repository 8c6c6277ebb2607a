"""Password hashing on top of the salt-derived riffle graph.

``evaluate`` labels the graph row by row, keeping only two rows of 32-byte
labels alive.  Each node's label is a left fold ``acc = H(acc || parent)``
over its parents in canonical order, starting from 32 zero bytes.  Which
cells are read and written depends on the salt and the parameters only,
never on the password.
"""

from __future__ import annotations

import base64
import binascii
import hmac
import re
import secrets
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import PhcDecodeError, ResourceError, UsageError
from .graph import RiffleGraph, gen_graph
from .permute import HashFunction, inverse_riffle_shuffle, sha256

DIGEST_SIZE = 32
MIN_SALT = 8
MAX_GARLIC = 24
MAX_LAMBDA = 64
VERSION = 1
DEFAULT_GARLIC = 14
DEFAULT_LAMBDA = 2
PHC_ID = "rscram"

Access = tuple[str, int, int, int]
"""``(op, round, row, col)`` with op ``"r"`` or ``"w"``; seeding uses round -1."""


@dataclass(frozen=True)
class HashParams:
    garlic: int
    lam: int
    salt: bytes
    version: int = VERSION

    def __post_init__(self) -> None:
        if not isinstance(self.garlic, int) or not 1 <= self.garlic <= MAX_GARLIC:
            raise UsageError(f"garlic must be in [1, {MAX_GARLIC}], got {self.garlic!r}")
        if not isinstance(self.lam, int) or not 1 <= self.lam <= MAX_LAMBDA:
            raise UsageError(f"lambda must be in [1, {MAX_LAMBDA}], got {self.lam!r}")
        if not isinstance(self.salt, (bytes, bytearray)) or len(self.salt) < MIN_SALT:
            raise UsageError(f"salt must be at least {MIN_SALT} bytes")
        if self.version != VERSION:
            raise UsageError(f"unsupported version {self.version!r}")
        object.__setattr__(self, "salt", bytes(self.salt))

    @property
    def width(self) -> int:
        return 1 << self.garlic


def new_salt(size: int = 16) -> bytes:
    try:
        return secrets.token_bytes(size)
    except (OSError, NotImplementedError) as exc:
        raise ResourceError(f"entropy source failed: {exc}") from exc


def build_graph(params: HashParams, h: HashFunction = sha256) -> RiffleGraph:
    """One block of the salt's graph (the hash reuses it for every round)."""
    sigma = inverse_riffle_shuffle(h, params.width, params.salt).permutation
    return gen_graph(params.garlic, sigma, 1)


def evaluate(password: bytes, params: HashParams, h: HashFunction = sha256,
             trace: Optional[Callable[[Access], None]] = None,
             graph: Optional[RiffleGraph] = None) -> bytes:
    if isinstance(password, str):
        password = password.encode("utf-8")
    if graph is None:
        graph = build_graph(params, h)
    g, n = params.garlic, params.width
    last = n - 1
    zero = bytes(DIGEST_SIZE)
    try:
        prev: list = [None] * n
        prev[0] = h(bytes(password))
        for i in range(1, n):
            prev[i] = h(prev[i - 1])
    except MemoryError as exc:
        raise ResourceError(f"cannot allocate two rows of {n} labels") from exc
    if trace is not None:
        for i in range(n):
            trace(("w", -1, 0, i))

    for rnd in range(params.lam):
        for row in range(1, 2 * g + 1):
            lo, hi = graph.layer_arrays(row - 1)
            cur: list = [None] * n
            for i in range(n):
                a, b = lo[i], hi[i]
                if i:
                    if trace is not None:
                        trace(("r", rnd, row, i - 1))
                    acc = h(zero + cur[i - 1])
                    cols = (a,) if b < 0 else (a, b)
                else:
                    acc = zero
                    cols = tuple(sorted({c for c in (a, b, last) if c >= 0}))
                for c in cols:
                    if trace is not None:
                        trace(("r", rnd, row - 1, c))
                    acc = h(acc + prev[c])
                cur[i] = acc
                if trace is not None:
                    trace(("w", rnd, row, i))
            prev = cur
    digest = prev[last]
    if len(digest) != DIGEST_SIZE:
        raise UsageError(f"hash function must return {DIGEST_SIZE} bytes")
    return digest


@dataclass(frozen=True)
class CallCount:
    seeding: int
    evaluation: int
    shuffle: int

    @property
    def total(self) -> int:
        return self.seeding + self.evaluation + self.shuffle


def hash_call_count(params: HashParams, h: HashFunction = sha256) -> CallCount:
    """Exact number of ``h`` calls ``evaluate`` makes, split by phase."""
    shuffled = inverse_riffle_shuffle(h, params.width, params.salt)
    graph = gen_graph(params.garlic, shuffled.permutation, 1)
    per_round = sum(len(graph.parents((r, c)))
                    for r in range(1, 2 * params.garlic + 1) for c in range(params.width))
    return CallCount(
        seeding=params.width,
        evaluation=params.lam * per_round,
        shuffle=shuffled.rounds * params.width,
    )


# -- encoded strings -----------------------------------------------------------

_PHC_RE = re.compile(
    r"\$" + PHC_ID + r"\$v=([1-9][0-9]*)\$g=([1-9][0-9]*),l=([1-9][0-9]*)"
    r"\$([A-Za-z0-9+/]+)\$([A-Za-z0-9+/]+)"
)


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii").rstrip("=")


def _unb64(text: str) -> bytes:
    if len(text) % 4 == 1:
        raise PhcDecodeError("bad base64 length")
    raw = base64.b64decode(text + "=" * (-len(text) % 4), validate=True)
    if _b64(raw) != text:
        raise PhcDecodeError("non-canonical base64")
    return raw


def encode_phc(params: HashParams, digest: bytes) -> str:
    if len(digest) != DIGEST_SIZE:
        raise UsageError(f"digest must be {DIGEST_SIZE} bytes")
    return (f"${PHC_ID}$v={params.version}$g={params.garlic},l={params.lam}"
            f"${_b64(params.salt)}${_b64(digest)}")


def decode_phc(encoded: str) -> tuple[HashParams, bytes]:
    if not isinstance(encoded, str):
        raise PhcDecodeError("encoded hash must be a string")
    m = _PHC_RE.fullmatch(encoded)
    if m is None:
        raise PhcDecodeError("not a $rscram$ hash string")
    version, garlic, lam, salt_text, digest_text = m.groups()
    try:
        salt, digest = _unb64(salt_text), _unb64(digest_text)
        params = HashParams(int(garlic), int(lam), salt, int(version))
    except (binascii.Error, UsageError) as exc:
        raise PhcDecodeError(str(exc)) from exc
    if len(digest) != DIGEST_SIZE:
        raise PhcDecodeError(f"digest must be {DIGEST_SIZE} bytes")
    return params, digest


def hash_password(password: bytes | str, params: Optional[HashParams] = None, *,
                  garlic: int = DEFAULT_GARLIC, lam: int = DEFAULT_LAMBDA,
                  h: HashFunction = sha256) -> str:
    """Hash ``password`` and return the encoded string.

    Without ``params`` a fresh 16-byte salt is drawn and ``garlic``/``lam``
    are used.
    """
    if params is None:
        params = HashParams(garlic, lam, new_salt())
    return encode_phc(params, evaluate(password, params, h))


def verify_password(encoded: str, password: bytes | str, h: HashFunction = sha256) -> bool:
    """Constant-time check of ``password`` against an encoded hash.

    Raises ``PhcDecodeError`` for a malformed string rather than returning False.
    """
    params, expected = decode_phc(encoded)
    return hmac.compare_digest(evaluate(password, params, h), expected)
