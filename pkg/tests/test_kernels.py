import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtrmt.kernels import eigvalsh_small, tour_search


def random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return (a + a.T) / 2


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 20, 45])
def test_jacobi_matches_lapack(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = random_symmetric(rng, n)
        assert np.allclose(eigvalsh_small(a), np.linalg.eigvalsh(a), atol=1e-10)


def test_jacobi_diagonal_is_exact():
    d = np.diag([3.0, -1.0, 2.0])
    assert np.allclose(eigvalsh_small(d), [-1.0, 2.0, 3.0])


@given(st.integers(2, 10), st.integers(0, 10_000))
@settings(max_examples=50, deadline=None)
def test_jacobi_property(n, seed):
    a = random_symmetric(np.random.default_rng(seed), n)
    assert np.allclose(eigvalsh_small(a), np.linalg.eigvalsh(a), atol=1e-9)


def brute_force_tours(cost, k):
    n = cost.shape[0] - 1
    scored = []
    for perm in itertools.permutations(range(1, n + 1)):
        tot = cost[0, perm[0]]
        for a, b in zip(perm, perm[1:]):
            tot += cost[a, b]
        if np.isfinite(tot):
            scored.append((tot, perm))
    scored.sort(key=lambda t: (t[0], t[1]))
    return scored[:k]


@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_tour_search_matches_brute_force(n, k, seed):
    rng = np.random.default_rng(seed)
    cost = rng.integers(1, 6, size=(n + 1, n + 1)).astype(float)
    np.fill_diagonal(cost, 0.0)
    orders, costs = tour_search(cost, k)
    expected = brute_force_tours(cost, k)
    assert len(orders) == len(expected)
    for (o, c), (ec, eo) in zip(zip(orders, costs), expected):
        assert tuple(o) == eo
        assert c == pytest.approx(ec)


def test_tour_search_skips_unreachable():
    cost = np.array([[0.0, 1.0, np.inf], [1.0, 0.0, np.inf], [np.inf, np.inf, 0.0]])
    orders, costs = tour_search(cost, 5)
    # every order must visit vertex 2, which is unreachable
    assert len(orders) == 0 and len(costs) == 0
