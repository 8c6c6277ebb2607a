import hashlib

import pytest
from hypothesis import HealthCheck, settings

from golden import SIGMA_G3
from rifflescrambler.graph import gen_graph
from rifflescrambler.permute import Permutation, inverse_riffle_shuffle, sha256

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: dict[int, str] = {}


def salts(count: int, tag: str = "salt") -> list[bytes]:
    """Deterministic pseudo-random salts so failures are reproducible."""
    return [hashlib.sha256(f"{tag}-{i}".encode()).digest()[:16] for i in range(count)]


def salted_graph(g: int, salt: bytes, lam: int = 1):
    return gen_graph(g, inverse_riffle_shuffle(sha256, 1 << g, salt).permutation, lam)


@pytest.fixture(scope="session")
def g3_graph():
    return gen_graph(3, Permutation(SIGMA_G3), 1)


@pytest.fixture(scope="session")
def g4_graph():
    return salted_graph(4, b"fixed-salt-g4")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
