"""Directed-network model: structure checks, cloud augmentation, incidence, diameter."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import AugmentationFailed, NotStronglyConnected

ArcLike = Union["Arc", Sequence]

CLOUD_LABEL = "cloud"


@dataclass(frozen=True, order=True)
class Arc:
    """One directed arc with a positive, unitless relative capacity."""

    tail: int
    head: int
    capacity: float = 1.0


@dataclass(frozen=True)
class DirectedNetwork:
    """Simple weighted digraph on nodes 0..n-1.

    Arcs are stored in row-major order (sorted by tail, then head), which fixes
    the column order of the incidence matrix and every per-arc export. Duplicate
    (tail, head) pairs are rejected; self-loops are representable but must be
    removed (see :func:`remove_self_loops`) before any flow computation.
    """

    n: int
    arcs: tuple[Arc, ...]
    labels: tuple[str, ...]

    @classmethod
    def from_arcs(
        cls,
        n: int,
        arcs: Iterable[ArcLike],
        labels: Optional[Sequence[str]] = None,
    ) -> "DirectedNetwork":
        """Build a validated network from (tail, head[, capacity]) tuples or Arcs."""
        if n < 1:
            raise ValueError("node count must be at least 1")
        normalized: list[Arc] = []
        seen: set[tuple[int, int]] = set()
        for raw in arcs:
            arc = raw if isinstance(raw, Arc) else Arc(*raw)
            if not (0 <= arc.tail < n and 0 <= arc.head < n):
                raise ValueError(f"arc {arc.tail}->{arc.head} out of range for n={n}")
            if not (np.isfinite(arc.capacity) and arc.capacity > 0):
                raise ValueError(
                    f"arc {arc.tail}->{arc.head} has nonpositive capacity {arc.capacity}"
                )
            key = (arc.tail, arc.head)
            if key in seen:
                raise ValueError(f"duplicate arc {arc.tail}->{arc.head}")
            seen.add(key)
            normalized.append(Arc(arc.tail, arc.head, float(arc.capacity)))
        normalized.sort()
        if labels is None:
            labels = tuple(str(i + 1) for i in range(n))
        else:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels length must equal node count")
        return cls(n=n, arcs=tuple(normalized), labels=labels)

    @classmethod
    def from_adjacency(cls, a: np.ndarray) -> "DirectedNetwork":
        """Build a unit-capacity network from a 0/1 adjacency matrix."""
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        arcs = [(int(i), int(j)) for i, j in np.argwhere(a > 0)]
        return cls.from_arcs(a.shape[0], arcs)

    @property
    def p(self) -> int:
        """Arc count."""
        return len(self.arcs)

    def arc_set(self) -> set[tuple[int, int]]:
        return {(a.tail, a.head) for a in self.arcs}

    def has_arc(self, tail: int, head: int) -> bool:
        return (tail, head) in self.arc_set()

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for arc in self.arcs:
            a[arc.tail, arc.head] = 1
        return a

    def capacity_matrix(self) -> np.ndarray:
        c = np.zeros((self.n, self.n))
        for arc in self.arcs:
            c[arc.tail, arc.head] = arc.capacity
        return c

    def out_degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for arc in self.arcs:
            d[arc.tail] += 1
        return d

    def in_degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        for arc in self.arcs:
            d[arc.head] += 1
        return d

    def with_arc(self, tail: int, head: int, capacity: float = 1.0) -> "DirectedNetwork":
        return DirectedNetwork.from_arcs(
            self.n, list(self.arcs) + [Arc(tail, head, capacity)], self.labels
        )

    def without_arc(self, tail: int, head: int) -> "DirectedNetwork":
        kept = [a for a in self.arcs if (a.tail, a.head) != (tail, head)]
        if len(kept) == len(self.arcs):
            raise ValueError(f"arc {tail}->{head} not present")
        return DirectedNetwork.from_arcs(self.n, kept, self.labels)


@dataclass(frozen=True)
class AugmentedNetwork:
    """A network plus the cloud node and dummy arcs that made it strongly connected.

    ``network`` is the graph to run solvers on; it equals ``base`` when no cloud
    was needed (``cloud_node`` is None and ``dummy_arcs`` is empty).
    """

    base: DirectedNetwork
    network: DirectedNetwork
    cloud_node: Optional[int]
    dummy_arcs: tuple[Arc, ...]


def remove_self_loops(net: DirectedNetwork) -> DirectedNetwork:
    """Drop every arc whose tail equals its head; all other arcs are preserved."""
    kept = [a for a in net.arcs if a.tail != a.head]
    if len(kept) == len(net.arcs):
        return net
    return DirectedNetwork(n=net.n, arcs=tuple(kept), labels=net.labels)


def require_self_loop_free(net: DirectedNetwork) -> None:
    for arc in net.arcs:
        if arc.tail == arc.head:
            raise ValueError(f"self-loop at node {arc.tail}; clean the network first")


def _sparse_adjacency(n: int, arcs: Sequence[Arc]) -> csr_matrix:
    rows = [a.tail for a in arcs]
    cols = [a.head for a in arcs]
    data = np.ones(len(arcs))
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def is_strongly_connected(net: DirectedNetwork) -> bool:
    """True iff every node reaches every other node along directed arcs."""
    if net.n == 1:
        return True
    ncomp, _ = connected_components(
        _sparse_adjacency(net.n, net.arcs), directed=True, connection="strong"
    )
    return ncomp == 1


def _scc_labels(n: int, arcs: Sequence[Arc]) -> tuple[int, np.ndarray]:
    ncomp, labels = connected_components(
        _sparse_adjacency(n, arcs), directed=True, connection="strong"
    )
    return ncomp, labels


def augment_with_cloud(
    net: DirectedNetwork, dummy_capacity: float = 1.0
) -> AugmentedNetwork:
    """Make a reducible network strongly connected via one extra cloud node.

    A strongly connected input is returned unchanged. Otherwise a cloud node is
    appended and dummy arcs are added: first from every absorbing node (out-degree
    zero) to the cloud and from the cloud to every source node (in-degree zero);
    then, while the condensation still has source or sink components, the cloud is
    wired to the lowest-index node of each such component.

    Raises:
        AugmentationFailed: the result is still not strongly connected.
    """
    require_self_loop_free(net)
    if not (np.isfinite(dummy_capacity) and dummy_capacity > 0):
        raise ValueError("dummy capacity must be positive")
    if is_strongly_connected(net):
        return AugmentedNetwork(base=net, network=net, cloud_node=None, dummy_arcs=())

    cloud = net.n
    n_aug = net.n + 1
    dummy: list[Arc] = []
    present = net.arc_set()

    def add_dummy(tail: int, head: int) -> None:
        if (tail, head) not in present:
            present.add((tail, head))
            dummy.append(Arc(tail, head, float(dummy_capacity)))

    outdeg = net.out_degrees()
    indeg = net.in_degrees()
    for i in range(net.n):
        if outdeg[i] == 0:
            add_dummy(i, cloud)
        if indeg[i] == 0:
            add_dummy(cloud, i)

    # SCC-level pass: attach remaining source/sink basins of the condensation.
    for _ in range(net.n + 1):
        arcs_aug = list(net.arcs) + dummy
        ncomp, labels = _scc_labels(n_aug, arcs_aug)
        if ncomp == 1:
            break
        comp_has_in = np.zeros(ncomp, dtype=bool)
        comp_has_out = np.zeros(ncomp, dtype=bool)
        for a in arcs_aug:
            if labels[a.tail] != labels[a.head]:
                comp_has_out[labels[a.tail]] = True
                comp_has_in[labels[a.head]] = True
        cloud_comp = labels[cloud]
        added = False
        for comp in range(ncomp):
            if comp == cloud_comp:
                continue
            members = np.where(labels[:net.n] == comp)[0]
            if members.size == 0:
                continue
            anchor = int(members.min())
            if not comp_has_in[comp]:
                add_dummy(cloud, anchor)
                added = True
            if not comp_has_out[comp]:
                add_dummy(anchor, cloud)
                added = True
        if not added:
            break

    result = DirectedNetwork.from_arcs(
        n_aug, list(net.arcs) + dummy, tuple(net.labels) + (CLOUD_LABEL,)
    )
    if not is_strongly_connected(result):
        raise AugmentationFailed("network cannot be made strongly connected")
    return AugmentedNetwork(
        base=net, network=result, cloud_node=cloud, dummy_arcs=tuple(sorted(dummy))
    )


def incidence(net: DirectedNetwork) -> np.ndarray:
    """Node-by-arc incidence matrix: +1 at the tail, -1 at the head of each arc.

    Column j corresponds to arcs[j], i.e. the j-th 1-entry of the adjacency
    matrix read row by row, left to right.
    """
    require_self_loop_free(net)
    b = np.zeros((net.n, net.p), dtype=np.int8)
    for j, arc in enumerate(net.arcs):
        b[arc.tail, j] = 1
        b[arc.head, j] = -1
    return b


def diameter(net: DirectedNetwork) -> int:
    """Maximum over node pairs of the shortest directed path length (arc count)."""
    if not is_strongly_connected(net):
        raise NotStronglyConnected("diameter requires a strongly connected network")
    if net.n == 1:
        return 0
    dist = shortest_path(
        _sparse_adjacency(net.n, net.arcs), method="D", directed=True, unweighted=True
    )
    return int(dist.max())
