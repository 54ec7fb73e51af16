import itertools
import math

import numpy as np
import pytest

from src.model.assignment import NodeMapping, pairwise_distances, solve_assignment


def brute_force(cost):
    """Minimum summed cost over every injection of the smaller side."""

    m, n = cost.shape
    if m > n:
        return brute_force(cost.T)

    injections = np.array(list(itertools.permutations(range(n), m)))
    return cost[np.arange(m), injections].sum(axis=1).min()


def test_pairwise_distances_examples():
    np.testing.assert_allclose(pairwise_distances([[0, 0]], [[3, 4]]), [[5.0]])
    np.testing.assert_allclose(
        pairwise_distances([[0, 0], [1, 0]], [[0, 1]]), [[1.0], [math.sqrt(2)]]
    )

    points = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert np.all(np.diag(pairwise_distances(points, points)) == 0)


def test_pairwise_distances_dimension_mismatch():
    with pytest.raises(ValueError):
        pairwise_distances([[0, 0]], [[0, 0, 0]])


def test_two_by_two():
    mapping = solve_assignment(np.array([[1.0, 2.0], [2.0, 1.0]]))

    assert set(mapping.pairs) == {(0, 0), (1, 1)}
    assert mapping.total_cost == 2.0


def test_identity_like_cost():
    mapping = solve_assignment(1.0 - np.eye(4))

    assert mapping.pairs == ((0, 0), (1, 1), (2, 2), (3, 3))
    assert mapping.total_cost == 0.0


def test_rectangular_three_by_two():
    mapping = solve_assignment(np.array([[1.0, 9.0], [9.0, 1.0], [5.0, 5.0]]))

    assert set(mapping.pairs) == {(0, 0), (1, 1)}
    assert mapping.total_cost == 2.0


@pytest.mark.parametrize("shape", [(1, 1), (1, 4), (4, 1), (3, 5), (5, 3)])
def test_mapping_size_and_uniqueness(shape, rng):
    mapping = solve_assignment(rng.random(shape))

    assert len(mapping) == min(shape)
    assert len(set(mapping.prev_indices)) == len(set(mapping.curr_indices)) == len(mapping)
    assert mapping.as_matrix(shape).sum(axis=0).max() <= 1
    assert mapping.as_matrix(shape).sum(axis=1).max() <= 1


def test_exact_against_brute_force(rng):
    """Integer costs keep the comparison exact."""

    for _ in range(200):
        n = int(rng.integers(1, 8))
        cost = rng.integers(0, 50, size=(n, n)).astype(float)
        assert solve_assignment(cost).total_cost == brute_force(cost)

    for _ in range(200):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        cost = rng.integers(0, 50, size=(m, n)).astype(float)
        assert solve_assignment(cost).total_cost == brute_force(cost)


def test_unique_optimum_pairs_match_brute_force(rng):
    # distinct powers of two make every matching sum distinct
    cost = 2.0 ** rng.permutation(16).reshape(4, 4)
    best = min(
        itertools.permutations(range(4)),
        key=lambda cols: sum(cost[i, c] for i, c in enumerate(cols)),
    )

    assert solve_assignment(cost).pairs == tuple(enumerate(best))


def test_rejects_non_finite_cost():
    with pytest.raises(ValueError):
        solve_assignment(np.array([[0.0, np.inf]]))


def test_mean_cost_and_matrix():
    mapping = NodeMapping(pairs=((0, 1), (1, 0)), total_cost=3.0)

    assert mapping.mean_cost == 1.5
    np.testing.assert_array_equal(mapping.as_matrix((2, 3)), [[0, 1, 0], [1, 0, 0]])
