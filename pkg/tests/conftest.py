"""Shared fixtures: reference networks and brute-force oracles."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from idealflow import DirectedNetwork

DATA_DIR = Path(__file__).parent / "data"

# 5-node demo network used throughout: 13 arcs, strongly connected.
DEMO5_ADJACENCY = np.array(
    [
        [0, 1, 1, 1, 1],
        [0, 0, 1, 1, 1],
        [0, 1, 0, 1, 1],
        [1, 0, 0, 0, 1],
        [0, 0, 0, 1, 0],
    ]
)

# Its exact min-normalized standard flow and the margin sums.
DEMO5_FLOW = np.array(
    [
        [0, 2, 2, 2, 2],
        [0, 0, 1, 1, 1],
        [0, 1, 0, 1, 1],
        [8, 0, 0, 0, 8],
        [0, 0, 0, 12, 0],
    ],
    dtype=float,
)
DEMO5_MARGINS = np.array([8.0, 3.0, 3.0, 16.0, 12.0])
DEMO5_TOTAL = 42.0


def cycle_net(n: int) -> DirectedNetwork:
    return DirectedNetwork.from_arcs(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def demo5() -> DirectedNetwork:
    return DirectedNetwork.from_adjacency(DEMO5_ADJACENCY)


@pytest.fixture
def cycle5() -> DirectedNetwork:
    return cycle_net(5)


@pytest.fixture
def two_cycle() -> DirectedNetwork:
    return cycle_net(2)


@pytest.fixture
def triangle() -> DirectedNetwork:
    return cycle_net(3)


# Growth-stage edits for the 5-cycle experiment, 0-based (tail, head):
# stage labels use 1-based node names, so "add 2-5" is (1, 4).
STAGE_EDITS = [(1, 4), (0, 2), (1, 3)]
LAST_EDIT_A = (3, 0)  # yields max arc 5->1 flow 3.5
LAST_EDIT_B = (2, 0)  # yields max arc 5->1 flow 4.0


def staged_cycle_net(stage: int, last: str | None = None) -> DirectedNetwork:
    """5-cycle plus the first `stage` extra arcs, optionally one closing arc."""
    net = cycle_net(5)
    for tail, head in STAGE_EDITS[:stage]:
        net = net.with_arc(tail, head)
    if last == "a":
        net = net.with_arc(*LAST_EDIT_A)
    elif last == "b":
        net = net.with_arc(*LAST_EDIT_B)
    return net


def random_strongly_connected(
    rng: np.random.Generator, n_max: int = 30, extra_density: float = 0.25
) -> DirectedNetwork:
    """Random permutation cycle over all nodes plus extra arcs: always strongly
    connected, no self-loops."""
    n = int(rng.integers(2, n_max + 1))
    order = rng.permutation(n)
    arcs = {(int(order[i]), int(order[(i + 1) % n])) for i in range(n)}
    extras = int(extra_density * n * (n - 1) / 2)
    for _ in range(extras):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            arcs.add((int(i), int(j)))
    return DirectedNetwork.from_arcs(n, sorted(arcs))


def reachability_closure(net: DirectedNetwork) -> np.ndarray:
    """Brute-force transitive closure by repeated boolean matrix squaring."""
    reach = net.adjacency().astype(bool) | np.eye(net.n, dtype=bool)
    for _ in range(net.n):
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return reach


def floyd_warshall_diameter(net: DirectedNetwork) -> int:
    """Independent all-pairs shortest-path oracle for the diameter."""
    n = net.n
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for arc in net.arcs:
        dist[arc.tail, arc.head] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k][:, None] + dist[k, :][None, :])
    return int(dist.max())
