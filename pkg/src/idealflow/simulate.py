"""Multi-agent random-walk estimation of ideal flow, plus deterministic propagation.

Agents perform node-based Markov walks: an agent at node i moves to j with
probability T[i][j]. Randomness comes from numpy PCG64 streams, one per agent,
seeded with SeedSequence([seed, agent_index]); adding agents therefore never
reshuffles existing agents' paths, and runs are reproducible bit for bit.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import EmptyFlow, NoConvergence, NotIrreducible, NotStronglyConnected
from .graph import DirectedNetwork, is_strongly_connected, require_self_loop_free
from .markov import (
    _support_strongly_connected,
    ideal_flow,
    normalize_min,
    stationary,
    uniform_transition,
    validate_stochastic,
)

# Per-chunk uniform-sample budget, to bound memory on very long runs.
_CHUNK_SAMPLES = 1 << 24


@dataclass(frozen=True)
class SimConfig:
    """Run parameters for the multi-agent walk.

    ``placement`` is either "uniform" (each agent draws its start node from its
    own stream) or an explicit sequence of node ids, one per agent. ``burn_in``
    steps are walked but not counted, so a completed run always accumulates
    exactly agents * steps transitions.
    """

    agents: int
    steps: int
    seed: int = 0
    placement: Union[str, tuple[int, ...]] = "uniform"
    burn_in: int = 0

    def __post_init__(self):
        if self.agents < 1:
            raise ValueError("agents must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not isinstance(self.placement, str):
            object.__setattr__(self, "placement", tuple(int(v) for v in self.placement))
            if len(self.placement) != self.agents:
                raise ValueError("explicit placement must list one node per agent")
        elif self.placement != "uniform":
            raise ValueError("placement must be 'uniform' or an explicit node list")


@dataclass(frozen=True)
class ConvergenceSeries:
    """Sampled (elapsed transitions, max relative error vs exact flow) pairs."""

    checkpoints: tuple[tuple[int, float], ...] = field(default_factory=tuple)

    def to_csv(self) -> str:
        lines = ["transitions,max_rel_error"]
        for elapsed, err in self.checkpoints:
            lines.append(f"{elapsed},{err:.12g}")
        return "\n".join(lines) + "\n"


def _agent_generators(cfg: SimConfig) -> list[np.random.Generator]:
    return [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, i])))
        for i in range(cfg.agents)
    ]


def _selection_table(t: np.ndarray) -> np.ndarray:
    """Row-wise cumulative probabilities, padded to 1.0 from the last positive arc."""
    cum = np.cumsum(t, axis=1)
    for i in range(t.shape[0]):
        positive = np.where(t[i] > 0)[0]
        cum[i, positive[-1]:] = 1.0
    return cum


def _initial_nodes(cfg: SimConfig, n: int, gens: list[np.random.Generator]) -> np.ndarray:
    if isinstance(cfg.placement, tuple):
        starts = np.array(cfg.placement, dtype=np.int64)
        if starts.min() < 0 or starts.max() >= n:
            raise ValueError("placement node id out of range")
        return starts
    return np.array([int(g.random() * n) for g in gens], dtype=np.int64)


def _run_walk(
    net: DirectedNetwork,
    t: np.ndarray,
    cfg: SimConfig,
    checkpoint_steps: Iterable[int] = (),
) -> tuple[np.ndarray, list[tuple[int, np.ndarray]]]:
    t = validate_stochastic(t)
    n = net.n
    if t.shape[0] != n:
        raise ValueError("transition matrix size does not match the network")
    if not _support_strongly_connected(t):
        raise NotIrreducible("walk requires an irreducible transition matrix")

    gens = _agent_generators(cfg)
    cur = _initial_nodes(cfg, n, gens)
    cum = _selection_table(t)
    counts = np.zeros((n, n), dtype=np.int64)
    snapshots: list[tuple[int, np.ndarray]] = []
    pending = sorted(set(int(s) for s in checkpoint_steps))

    total_steps = cfg.burn_in + cfg.steps
    chunk = max(1, min(total_steps, _CHUNK_SAMPLES // cfg.agents))
    done = 0
    while done < total_steps:
        m = min(chunk, total_steps - done)
        u = np.empty((cfg.agents, m))
        for i, g in enumerate(gens):
            u[i] = g.random(m)
        for k in range(m):
            nxt = (u[:, k][:, None] < cum[cur]).argmax(axis=1)
            step = done + k + 1
            if step > cfg.burn_in:
                np.add.at(counts, (cur, nxt), 1)
            cur = nxt
            if pending and step - cfg.burn_in == pending[0]:
                snapshots.append((pending.pop(0), counts.copy()))
        done += m
    return counts, snapshots


def simulate(net: DirectedNetwork, t: np.ndarray, cfg: SimConfig) -> np.ndarray:
    """Trajectory-count matrix R; R[i][j] counts agent transitions on arc i->j."""
    counts, _ = _run_walk(net, t, cfg)
    return counts


def relative_flow(r: np.ndarray, net: Optional[DirectedNetwork] = None) -> np.ndarray:
    """Counts divided by the minimum nonzero count.

    With a network given, warns when some arc was never traversed (its relative
    flow stays 0, which typically means the run was too short).
    """
    r = np.asarray(r, dtype=float)
    positive = r[r > 0]
    if positive.size == 0:
        raise EmptyFlow("count matrix has no positive entry")
    if net is not None:
        missing = [a for a in net.arcs if r[a.tail, a.head] == 0]
        if missing:
            warnings.warn(
                f"{len(missing)} arcs have zero traversal count", stacklevel=2
            )
    return r / positive.min()


def convergence_series(
    net: DirectedNetwork,
    t: np.ndarray,
    cfg: SimConfig,
    checkpoint_count: int = 10,
    first_checkpoint: int = 1000,
) -> ConvergenceSeries:
    """Max relative error of the simulated flow at geometrically spaced checkpoints.

    Checkpoints sit at first_checkpoint * 2^k elapsed transitions (capped by the
    run length), plus the end of the run. The error at each checkpoint is
    max over arcs of |relative_flow(R) - F| / F against the exact min-normalized
    standard flow F, whose entries are all >= 1.
    """
    if checkpoint_count < 1:
        raise ValueError("checkpoint_count must be >= 1")
    exact = normalize_min(ideal_flow(stationary(t, 1.0), t))
    total = cfg.agents * cfg.steps
    thresholds = [
        first_checkpoint * (2**k)
        for k in range(checkpoint_count)
        if first_checkpoint * (2**k) <= total
    ]
    steps = sorted({-(-thr // cfg.agents) for thr in thresholds} | {cfg.steps})
    _, snapshots = _run_walk(net, t, cfg, checkpoint_steps=steps)

    support = exact > 0
    points = []
    for step, counts in snapshots:
        rel = relative_flow(counts) if counts.any() else counts.astype(float)
        err = float((np.abs(rel - exact)[support] / exact[support]).max())
        points.append((cfg.agents * step, err))
    return ConvergenceSeries(checkpoints=tuple(points))


def propagate_flow(
    net: DirectedNetwork,
    origin: int,
    injection: float = 100.0,
    max_iters: int = 100_000,
    tol: float = 1e-10,
) -> np.ndarray:
    """Deterministic flow propagation yielding the min-normalized standard flow.

    Injects a load at the origin once, then repeatedly applies conservation:
    each node's load splits equally over its out-arcs and nodes accumulate their
    in-arc flows. Plain fixed-point iteration is used until the loads stabilize;
    when a period-2 oscillation is detected (periodic networks), consecutive
    iterates are averaged, which restores convergence.

    Raises:
        NoConvergence: the iteration budget ran out; carries the last residual.
    """
    require_self_loop_free(net)
    if not is_strongly_connected(net):
        raise NotStronglyConnected("flow propagation requires strong connectivity")
    if not (0 <= origin < net.n):
        raise ValueError("origin node out of range")
    if not (np.isfinite(injection) and injection > 0):
        raise ValueError("injection must be positive")

    t = uniform_transition(net)
    loads = np.zeros(net.n)
    loads[origin] = injection
    lazy = False
    residual = np.inf
    history: deque[float] = deque(maxlen=65)
    best_residual = np.inf
    stalled = 0
    for _ in range(max_iters):
        nxt = t.T @ loads
        if lazy:
            nxt = 0.5 * (nxt + loads)
        residual = float(np.abs(nxt - loads).max() / np.abs(nxt).max())
        loads = nxt
        if residual <= 1e-15:  # numerical noise floor, fully converged
            break
        history.append(residual)
        # Contraction bound: distance to the fixed point is at most
        # residual * rho / (1 - rho). Residuals of chains with complex spectra
        # oscillate in beats, so rho combines the worst recent consecutive
        # ratio with the geometric decay over a long window.
        if len(history) == history.maxlen:
            recent = list(history)
            rho_short = max(
                recent[i + 1] / recent[i] for i in range(len(recent) - 9, len(recent) - 1)
            )
            span = len(recent) - 1
            rho_long = (recent[-1] / recent[0]) ** (1.0 / span) if recent[0] > 0 else 0.0
            rho = min(max(rho_short, rho_long), 0.99999)
            if residual * rho / (1.0 - rho) <= tol / 16.0:
                break
        # A residual that stops shrinking signals a periodic orbit of any length.
        if not lazy:
            if residual >= 0.999 * best_residual:
                stalled += 1
                if stalled > 2 * net.n + 10:
                    lazy = True
                    history.clear()
            else:
                stalled = 0
            best_residual = min(best_residual, residual)
    else:
        raise NoConvergence(max_iters, residual)

    return normalize_min(ideal_flow(loads / loads.sum(), t))
