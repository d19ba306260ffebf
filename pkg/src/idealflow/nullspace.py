"""Standard ideal flow via the constrained null-space of the stacked balance system.

The incidence matrix supplies one conservation equation per node; equal-outflow
constraints chain each node's out-arcs pairwise. Stacking both gives a matrix
whose null space is one-dimensional on strongly connected networks, and the
positive null vector (min-normalized) is the standard ideal flow, providing an
exact cross-check of the stationary-solve route.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (
    ConservationViolated,
    DegenerateNullSpace,
    NonPositiveEntry,
    NotStronglyConnected,
)
from .graph import DirectedNetwork, incidence, is_strongly_connected

CONSERVATION_TOL = 1e-9
# Networks larger than this use the sparse pinned-variable solve.
SPARSE_NODE_LIMIT = 512


class IncidenceSplit(NamedTuple):
    plus: np.ndarray
    minus: np.ndarray


def split_incidence(b: np.ndarray) -> IncidenceSplit:
    """Separate the +1 (outgoing) and -1 (incoming) parts; plus + minus == b."""
    b = np.asarray(b)
    return IncidenceSplit(plus=np.where(b > 0, b, 0), minus=np.where(b < 0, b, 0))


def build_constraints(net: DirectedNetwork) -> np.ndarray:
    """Equal-split constraint rows, one chain e_k - e_{k+1} = 0 per node out-arc pair.

    For a strongly connected network every node has out-degree >= 1, so the row
    count is q = p - n.
    """
    p = net.p
    rows: list[np.ndarray] = []
    cols_by_tail: dict[int, list[int]] = {}
    for j, arc in enumerate(net.arcs):
        cols_by_tail.setdefault(arc.tail, []).append(j)
    for i in range(net.n):
        cols = cols_by_tail.get(i, [])
        for a, b in zip(cols, cols[1:]):
            row = np.zeros(p)
            row[a] = 1.0
            row[b] = -1.0
            rows.append(row)
    if not rows:
        return np.zeros((0, p))
    return np.array(rows)


def assemble_system(net: DirectedNetwork) -> np.ndarray:
    """Stack incidence over constraints into the (n+q) x p system matrix."""
    b = incidence(net).astype(float)
    c = build_constraints(net)
    return np.vstack([b, c])


def solve_null(d: np.ndarray, dense: Optional[bool] = None) -> np.ndarray:
    """Positive vector e with D e = 0, unique up to scale.

    Dense path: SVD null space, with the one-dimensionality verified outright.
    Sparse path (large systems): pin the last edge to 1 and solve the remaining
    least-squares system; uniqueness then rests on the strong-connectivity
    precondition and is confirmed via the residual and positivity checks.

    Raises:
        DegenerateNullSpace: the null space dimension is not one, or the
            resulting vector is not strictly positive.
    """
    d = np.asarray(d, dtype=float)
    p = d.shape[1]
    if dense is None:
        dense = p <= 4 * SPARSE_NODE_LIMIT

    if dense:
        basis = scipy.linalg.null_space(d)
        if basis.shape[1] != 1:
            raise DegenerateNullSpace(
                f"null space has dimension {basis.shape[1]}, expected 1"
            )
        e = basis[:, 0]
    else:
        ds = scipy.sparse.csr_matrix(d)
        rhs = -ds[:, -1].toarray().ravel()
        sol = scipy.sparse.linalg.lsqr(ds[:, :-1], rhs, atol=1e-14, btol=1e-14)[0]
        e = np.concatenate([sol, [1.0]])
        scale = float(np.abs(e).max())
        if float(np.abs(d @ e).max()) > 1e-9 * max(1.0, scale):
            raise DegenerateNullSpace("pinned solve left a nonzero residual")

    if e[0] < 0:
        e = -e
    if e.min() <= 1e-12 * np.abs(e).max():
        raise DegenerateNullSpace("null vector is not strictly positive")
    return e


def normalize_edges(e: np.ndarray) -> np.ndarray:
    """Divide by the minimum entry so the smallest edge flow is exactly 1."""
    e = np.asarray(e, dtype=float)
    if e.size == 0 or e.min() <= 0:
        raise NonPositiveEntry("edge vector entries must all be positive")
    return e / e.min()


def node_loads(split: IncidenceSplit, e: np.ndarray) -> np.ndarray:
    """Per-node total outflow, checked against total inflow.

    Raises:
        ConservationViolated: outflow and inflow differ beyond tolerance.
    """
    e = np.asarray(e, dtype=float)
    out = split.plus @ e
    inn = -(split.minus @ e)
    residual = float(np.abs(out - inn).max()) if out.size else 0.0
    if residual > CONSERVATION_TOL * max(1.0, float(np.abs(out).max())):
        raise ConservationViolated(residual)
    return out


def edge_vector_to_matrix(net: DirectedNetwork, e: np.ndarray) -> np.ndarray:
    """Place per-arc values into an n x n matrix following row-major arc order."""
    f = np.zeros((net.n, net.n))
    for j, arc in enumerate(net.arcs):
        f[arc.tail, arc.head] = e[j]
    return f


def standard_flow(net: DirectedNetwork, dense: Optional[bool] = None) -> np.ndarray:
    """Min-normalized standard ideal flow of a strongly connected network.

    Runs the full pipeline: incidence, constraints, stacked null-space solve,
    min-normalization, and a conservation check, returning the flow as a matrix.
    """
    if not is_strongly_connected(net):
        raise NotStronglyConnected("null-space flow requires strong connectivity")
    if dense is None:
        dense = net.n <= SPARSE_NODE_LIMIT
    d = assemble_system(net)
    e = normalize_edges(solve_null(d, dense=dense))
    node_loads(split_incidence(incidence(net)), e)
    return edge_vector_to_matrix(net, e)
