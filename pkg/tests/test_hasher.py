import hmac
import tracemalloc

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import salted_graph, salts
from golden import CLI_PHC, CLI_SALT_HEX, g1_transcript
from oracles import reference_evaluate
from rifflescrambler import hasher
from rifflescrambler.errors import PhcDecodeError, UsageError
from rifflescrambler.hasher import (
    HashParams, decode_phc, encode_phc, evaluate, hash_call_count, hash_password, verify_password,
)
from rifflescrambler.permute import sha256


class CountingHash:
    def __init__(self):
        self.calls = 0

    def __call__(self, data: bytes) -> bytes:
        self.calls += 1
        return sha256(data)


@pytest.mark.parametrize("lam", [1, 2, 3])
def test_g1_matches_hand_transcript(lam):
    for salt in salts(4, "g1"):
        assert evaluate(b"correct horse", HashParams(1, lam, salt)) == g1_transcript(b"correct horse", lam)


@pytest.mark.parametrize("g,lam", [(2, 1), (3, 2), (4, 1), (4, 3), (5, 2)])
def test_two_row_evaluation_matches_full_graph(g, lam):
    salt = b"reference-" + bytes([g, lam])
    graph = salted_graph(g, salt, lam)
    assert evaluate(b"pw", HashParams(g, lam, salt)) == reference_evaluate(b"pw", graph, sha256)


def test_frozen_vector():
    params, digest = decode_phc(CLI_PHC)
    assert params.salt == bytes.fromhex(CLI_SALT_HEX)
    assert evaluate(b"password", params) == digest


def test_digest_depends_on_every_input():
    base = HashParams(4, 1, b"salt-aaaa")
    d = evaluate(b"pw", base)
    assert d != evaluate(b"pw2", base)
    assert d != evaluate(b"pw", HashParams(4, 1, b"salt-aaab"))
    assert d != evaluate(b"pw", HashParams(4, 2, b"salt-aaaa"))
    assert d != evaluate(b"pw", HashParams(5, 1, b"salt-aaaa"))
    assert evaluate("pw", base) == d


@pytest.mark.parametrize("g", range(1, 7))
@pytest.mark.parametrize("lam", [1, 2, 3])
def test_call_count_prediction_is_exact(g, lam):
    params = HashParams(g, lam, b"count-salt")
    h = CountingHash()
    evaluate(b"pw", params, h)
    assert h.calls == hash_call_count(params).total


def test_evaluation_calls_per_node():
    for g in range(2, 7):
        n = 1 << g
        for lam in (1, 2, 3):
            calls = hash_call_count(HashParams(g, lam, b"band-salt")).evaluation
            assert 2 <= calls / ((2 * g + 1) * lam * n) <= 3.2


def _trace(password: bytes, params: HashParams):
    log = []
    evaluate(password, params, trace=log.append)
    return log


def test_access_pattern_ignores_password():
    params = HashParams(4, 2, b"trace-salt")
    a, b = _trace(b"alpha", params), _trace(b"a much longer password", params)
    assert a == b
    assert len([x for x in a if x[0] == "w"]) == 16 * (1 + 2 * 4 * 2)


def test_access_pattern_follows_salt():
    assert _trace(b"pw", HashParams(4, 2, b"trace-salt")) != _trace(b"pw", HashParams(4, 2, b"other-salt"))


def test_working_memory_does_not_grow_with_lambda():
    def peak(lam):
        params = HashParams(8, lam, b"memory-salt")
        graph = hasher.build_graph(params)
        tracemalloc.start()
        evaluate(b"pw", params, graph=graph)
        _, top = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        return top

    one, four = peak(1), peak(4)
    assert four <= one * 1.1 + 4096
    # two rows of 256 labels, each a 32-byte bytes object plus list slots
    assert one < 2 * 256 * (32 + 33 + 8) + 16384


def test_params_validation():
    with pytest.raises(UsageError):
        HashParams(0, 1, b"saltsalt")
    with pytest.raises(UsageError):
        HashParams(25, 1, b"saltsalt")
    with pytest.raises(UsageError):
        HashParams(4, 0, b"saltsalt")
    with pytest.raises(UsageError):
        HashParams(4, 1, b"short")
    with pytest.raises(UsageError):
        HashParams(4, 1, b"saltsalt", version=2)


def test_wrong_digest_size_is_rejected():
    with pytest.raises(UsageError):
        evaluate(b"pw", HashParams(1, 1, b"saltsalt"), h=lambda d: sha256(d)[:16])


@given(st.integers(1, 24), st.integers(1, 64), st.binary(min_size=8, max_size=64),
       st.binary(min_size=32, max_size=32))
def test_phc_roundtrip(g, lam, salt, digest):
    params = HashParams(g, lam, salt)
    text = encode_phc(params, digest)
    assert "=" not in "".join(text.split("$")[4:])
    assert decode_phc(text) == (params, digest)


@pytest.mark.parametrize("bad", [
    "",
    "$argon2id$v=19$m=65536,t=2,p=1$c2FsdHNhbHQ$aGFzaA",
    "$rscram$v=2$g=4,l=2$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$g=0,l=2$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$g=4,l=2$ABEiM0RVZneImaq7zN3u/w==$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$g=4,l=2$ABEiM0RVZneImaq7zN3u/x$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$g=4,l=2$ABEiM0RVZg$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$g=4,l=2$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fc",
    "$rscram$v=1$g=04,l=2$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    "$rscram$v=1$l=2,g=4$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4",
    CLI_PHC + "\n",
])
def test_decode_rejects_malformed(bad):
    with pytest.raises(PhcDecodeError):
        decode_phc(bad)


def test_verify_contract():
    assert verify_password(CLI_PHC, b"password") is True
    assert verify_password(CLI_PHC, "password") is True
    assert verify_password(CLI_PHC, b"passwore") is False
    with pytest.raises(PhcDecodeError):
        verify_password("$rscram$garbage", b"password")


def test_verify_uses_constant_time_compare(monkeypatch):
    seen = []
    real = hmac.compare_digest

    def spy(a, b):
        seen.append(True)
        return real(a, b)

    monkeypatch.setattr(hasher.hmac, "compare_digest", spy)
    verify_password(CLI_PHC, b"password")
    assert seen


def test_hash_password_draws_fresh_salts():
    a = hash_password(b"pw", garlic=3, lam=1)
    b = hash_password(b"pw", garlic=3, lam=1)
    assert a != b
    assert verify_password(a, b"pw") and verify_password(b, b"pw")
