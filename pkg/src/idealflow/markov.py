"""Transition matrices, stationary solves, ideal-flow assembly, and entropy analysis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DanglingNode,
    DimensionMismatch,
    EmptyFlow,
    NonPositiveScale,
    NotIrreducible,
    NotSquare,
    SolverFailure,
)
from .graph import DirectedNetwork, diameter, require_self_loop_free

# Stationarity residual bound: |piT - pi|_inf <= STATIONARY_TOL * kappa / n.
STATIONARY_TOL = 1e-9
# Premagic check default: residual <= tol * max(1, max entry).
PREMAGIC_TOL = 1e-9
# Row sums of a stochastic matrix must be 1 within this bound.
ROW_SUM_TOL = 1e-12
# Above this size the stationary solve switches to damped power iteration.
DENSE_SOLVE_LIMIT = 2048


class PremagicCheck(NamedTuple):
    ok: bool
    residual: float


@dataclass(frozen=True)
class EntropyReport:
    """Per-node route-choice entropies (bits) and their stationary-weighted mean."""

    per_node: np.ndarray
    network_entropy: float


def _require_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def _support_strongly_connected(t: np.ndarray) -> bool:
    n = t.shape[0]
    if n == 1:
        return True
    ncomp, _ = connected_components(
        csr_matrix(t > 0), directed=True, connection="strong"
    )
    return ncomp == 1


def validate_stochastic(t: np.ndarray) -> np.ndarray:
    """Check row sums, nonnegativity, and a zero diagonal; returns the array."""
    t = _require_square(t)
    if np.any(t < 0):
        raise ValueError("transition matrix has negative entries")
    if np.any(np.diagonal(t) != 0):
        raise ValueError("transition matrix has a nonzero diagonal")
    rows = t.sum(axis=1)
    bad = np.where(np.abs(rows - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        raise DanglingNode(int(bad[0]), f"row {bad[0]} sums to {rows[bad[0]]!r}, not 1")
    return t


def uniform_transition(net: DirectedNetwork) -> np.ndarray:
    """Equal-probability transition matrix: 1/outdeg(i) on each arc of node i."""
    require_self_loop_free(net)
    deg = net.out_degrees()
    dangling = np.where(deg == 0)[0]
    if dangling.size:
        raise DanglingNode(int(dangling[0]))
    t = net.adjacency().astype(float)
    return t / deg[:, None]


def capacity_transition(net: DirectedNetwork) -> np.ndarray:
    """Capacity-proportional transition matrix: cap(i->j) / total out-capacity of i."""
    require_self_loop_free(net)
    c = net.capacity_matrix()
    totals = c.sum(axis=1)
    dangling = np.where(totals == 0)[0]
    if dangling.size:
        raise DanglingNode(int(dangling[0]))
    return c / totals[:, None]


def transition_from_flows(f_obs: np.ndarray) -> np.ndarray:
    """Row-normalize an observed flow matrix into transition probabilities."""
    f = _require_square(f_obs)
    if np.any(f < 0):
        raise ValueError("observed flows must be nonnegative")
    if np.any(np.diagonal(f) != 0):
        raise ValueError("observed flows contain self-loop entries")
    totals = f.sum(axis=1)
    dangling = np.where(totals == 0)[0]
    if dangling.size:
        raise DanglingNode(int(dangling[0]), f"row {dangling[0]} has zero outflow")
    return f / totals[:, None]


def stationary(
    t: np.ndarray, kappa: float = 1.0, method: str = "auto"
) -> np.ndarray:
    """Stationary vector pi with pi T = pi and sum(pi) = kappa.

    The balance equations (T^T - I) pi = 0 are rank n-1 for an irreducible T, so
    one of them is replaced by the normalization row summing entries to kappa and
    the square system is solved directly. Above ``DENSE_SOLVE_LIMIT`` nodes a
    damped (lazy) power iteration is used instead; aperiodicity is never required.

    Raises:
        NotIrreducible: the support of T is not strongly connected.
        SolverFailure: the residual exceeds ``STATIONARY_TOL * kappa / n``.
    """
    t = validate_stochastic(t)
    if not (np.isfinite(kappa) and kappa > 0):
        raise ValueError("kappa must be a positive finite number")
    if not _support_strongly_connected(t):
        raise NotIrreducible("transition support is not strongly connected")
    n = t.shape[0]
    if method == "auto":
        method = "direct" if n <= DENSE_SOLVE_LIMIT else "power"

    if method == "direct":
        m = t.T - np.eye(n)
        m[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = kappa
        try:
            pi = np.linalg.solve(m, b)
        except np.linalg.LinAlgError:
            stacked = np.vstack([t.T - np.eye(n), np.ones((1, n))])
            rhs = np.concatenate([np.zeros(n), [kappa]])
            pi = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
    elif method == "power":
        pi = np.full(n, kappa / n)
        tol = 0.5 * STATIONARY_TOL * kappa / n
        for _ in range(200_000):
            # Lazy step (x + xT)/2 converges for periodic chains as well.
            nxt = 0.5 * (pi + pi @ t)
            if np.abs(nxt - pi).max() <= tol:
                pi = nxt
                break
            pi = nxt
        else:
            raise SolverFailure("power iteration did not converge")
    else:
        raise ValueError(f"unknown method {method!r}")

    pi = pi * (kappa / pi.sum())
    residual = float(np.abs(pi @ t - pi).max())
    if residual > STATIONARY_TOL * kappa / n:
        raise SolverFailure(f"stationary residual {residual:.3e} above tolerance")
    if pi.min() <= 0:
        raise SolverFailure("stationary vector has a nonpositive entry")
    return pi


def ideal_flow(pi: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Flow matrix F[i][j] = pi[i] * T[i][j]; premagic for stationary pi."""
    pi = np.asarray(pi, dtype=float)
    t = np.asarray(t, dtype=float)
    if pi.ndim != 1 or t.ndim != 2 or t.shape != (pi.size, pi.size):
        raise DimensionMismatch(
            f"pi of length {pi.shape} does not match T of shape {t.shape}"
        )
    return pi[:, None] * t


def normalize_min(f: np.ndarray) -> np.ndarray:
    """Divide by the minimum nonzero entry so the smallest flow is exactly 1."""
    f = np.asarray(f, dtype=float)
    positive = f[f > 0]
    if positive.size == 0:
        raise EmptyFlow("flow matrix has no positive entry")
    return f / positive.min()


def scale(f: np.ndarray, kappa: float) -> np.ndarray:
    """Multiply every entry by kappa > 0; support and premagic structure persist."""
    if not (np.isfinite(kappa) and kappa > 0):
        raise NonPositiveScale(f"scale factor must be positive, got {kappa!r}")
    return np.asarray(f, dtype=float) * kappa


def is_premagic(m: np.ndarray, tol: float = PREMAGIC_TOL) -> PremagicCheck:
    """Row-sum vector equals column-sum vector within tol * max(1, max entry)."""
    m = _require_square(m)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    residual = float(np.abs(m.sum(axis=1) - m.sum(axis=0)).max()) if m.size else 0.0
    bound = tol * max(1.0, float(np.abs(m).max())) if m.size else 0.0
    return PremagicCheck(ok=residual <= bound, residual=residual)


def node_entropy(t: np.ndarray, i: int) -> float:
    """Entropy in bits of row i's out-arc distribution; zero terms contribute 0."""
    row = np.asarray(t, dtype=float)[i]
    p = row[row > 0]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log2(p)).sum() + 0.0)  # +0.0 normalizes -0.0


def network_entropy(t: np.ndarray, pi: np.ndarray) -> EntropyReport:
    """Per-node entropies plus their pi-weighted mean (the chain's entropy rate)."""
    t = np.asarray(t, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or pi.shape != (t.shape[0],):
        raise DimensionMismatch(
            f"pi of shape {pi.shape} does not match T of shape {t.shape}"
        )
    per = np.array([node_entropy(t, i) for i in range(t.shape[0])])
    weights = pi / pi.sum()
    return EntropyReport(per_node=per, network_entropy=float(weights @ per + 0.0))


def perron_ratio_check(pi: np.ndarray, net: DirectedNetwork) -> bool:
    """max(pi)/min(pi) <= (max out-degree)^diameter, compared in log space."""
    pi = np.asarray(pi, dtype=float)
    d = diameter(net)
    max_deg = int(net.out_degrees().max())
    log_ratio = float(np.log(pi.max()) - np.log(pi.min()))
    return log_ratio <= d * np.log(max_deg) + 1e-12


def snap_integers(f: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Presentation helper: round when every entry is within tol of an integer.

    Returns the input unchanged (as a copy) otherwise; computation elsewhere
    always keeps full precision.
    """
    f = np.asarray(f, dtype=float)
    rounded = np.round(f)
    if np.abs(f - rounded).max() <= tol:
        return rounded
    return f.copy()
