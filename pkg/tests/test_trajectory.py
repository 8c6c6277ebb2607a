import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from golden import SIGMA_G3, TRACED_G3
from rifflescrambler.errors import UsageError
from rifflescrambler.permute import riffle_permutation
from rifflescrambler.trajectory import (
    BitMatrix, binary_representation, trace_trajectories, trajectory_endpoint, walk,
)


def perms(g):
    return st.permutations(list(range(1 << g)))


def test_binary_representation_rows_are_msb_first():
    b = binary_representation(SIGMA_G3, 3)
    assert b.rows()[0] == (1, 0, 1)
    assert [str(c) for c in b.columns] == ["11100100", "00111100", "10010101"]


def test_traced_columns_of_reference_permutation():
    t = trace_trajectories(binary_representation(SIGMA_G3, 3))
    assert tuple(str(c) for c in t.columns) == TRACED_G3


def test_walk_of_reference_permutation():
    t = trace_trajectories(binary_representation(SIGMA_G3, 3))
    assert walk(t, 0) == ((1, 0, 0), 1)
    assert trajectory_endpoint(t, 0) == 1
    ends = [walk(t, j)[1] for j in range(8)]
    assert sorted(ends) == list(range(8))
    assert all(trajectory_endpoint(t, j) == walk(t, j)[1] for j in range(8))


@given(st.integers(1, 6).flatmap(lambda g: st.tuples(st.just(g), perms(g))))
def test_traced_columns_are_balanced(case):
    g, sigma = case
    for rule in (False, True):
        t = trace_trajectories(binary_representation(sigma, g), cumulative=rule)
        assert all(c.hamming_weight() == 1 << (g - 1) for c in t.columns)


@given(st.integers(1, 6).flatmap(lambda g: st.tuples(st.just(g), perms(g))))
def test_cumulative_rule_follows_sigma_bits(case):
    g, sigma = case
    t = trace_trajectories(binary_representation(sigma, g), cumulative=True)
    for j in range(1 << g):
        bits, end = walk(t, j)
        assert bits == tuple((sigma[j] >> (g - 1 - i)) & 1 for i in range(g))
        assert end == trajectory_endpoint(t, j)


@given(st.integers(1, 6).flatmap(lambda g: st.tuples(st.just(g), perms(g))))
def test_endpoint_prediction_holds_when_trajectories_distinct(case):
    g, sigma = case
    t = trace_trajectories(binary_representation(sigma, g))
    walks = [walk(t, j) for j in range(1 << g)]
    if len({bits for bits, _ in walks}) == len(walks):
        assert all(trajectory_endpoint(t, j) == end for j, (_, end) in enumerate(walks))


def test_plain_rule_usually_has_colliding_trajectories():
    # The plain rule does not compose earlier steps, so inputs can share a
    # bit sequence.  Record that behaviour so a change in the rule is noticed.
    rng = random.Random(7)
    collisions = 0
    for _ in range(50):
        sigma = list(range(16))
        rng.shuffle(sigma)
        t = trace_trajectories(binary_representation(sigma, 4))
        if len({walk(t, j)[0] for j in range(16)}) < 16:
            collisions += 1
    assert collisions > 0


def test_walk_follows_riffle_edges():
    t = trace_trajectories(binary_representation(SIGMA_G3, 3))
    pos = 5
    for word in t.columns:
        pos = riffle_permutation(word)(pos)
    assert walk(t, 5)[1] == pos


def test_shape_errors():
    with pytest.raises(UsageError):
        binary_representation((0, 1, 2), 2)
    with pytest.raises(UsageError):
        BitMatrix(((0, 1, 0),))
    with pytest.raises(UsageError):
        walk(trace_trajectories(binary_representation(SIGMA_G3, 3)), 8)
