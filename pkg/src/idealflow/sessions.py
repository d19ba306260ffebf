"""What-if session engine: apply edge edits and recompute flow metrics per stage.

Shared by the HTTP service and the CLI whatif command so both produce identical
numbers for identical edit scripts. Everything underneath is pure, so a stage
snapshot is fully determined by the initial network and the edit sequence.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import markov, nullspace
from .errors import EditConflict, EditRejected, NotStronglyConnected
from .graph import (
    AugmentedNetwork,
    DirectedNetwork,
    augment_with_cloud,
    is_strongly_connected,
    remove_self_loops,
)
from .io_formats import round12


@dataclass(frozen=True)
class EditOp:
    op: str  # "add" | "remove"
    tail: int
    head: int
    capacity: float = 1.0

    def to_json(self) -> dict:
        return {"op": self.op, "tail": self.tail, "head": self.head, "capacity": self.capacity}


@dataclass(frozen=True)
class StageMetrics:
    """Flow metrics for one session stage, rounded to the output precision."""

    stage: int
    flow: tuple[tuple[float, ...], ...]
    max_flow_arc: tuple[int, int, float]
    premagic_residual: float
    node_entropy: tuple[float, ...]
    network_entropy: float
    cloud_node: Optional[int]
    reference_arc: Optional[tuple[int, int]]
    reference_flow: Optional[float]

    def to_payload(self) -> dict:
        return {
            "stage": self.stage,
            "flow": [list(row) for row in self.flow],
            "maxFlowArc": {
                "tail": self.max_flow_arc[0],
                "head": self.max_flow_arc[1],
                "value": self.max_flow_arc[2],
            },
            "premagicResidual": self.premagic_residual,
            "entropy": {
                "perNode": list(self.node_entropy),
                "networkEntropy": self.network_entropy,
            },
            "cloudNode": self.cloud_node,
            "referenceArc": list(self.reference_arc) if self.reference_arc else None,
            "referenceFlow": self.reference_flow,
        }


def _solvable(net: DirectedNetwork, augment: bool) -> tuple[DirectedNetwork, Optional[int]]:
    work = remove_self_loops(net)
    if augment:
        aug: AugmentedNetwork = augment_with_cloud(work)
        return aug.network, aug.cloud_node
    if not is_strongly_connected(work):
        raise NotStronglyConnected("network is not strongly connected; enable augment")
    return work, None


def compute_stage_metrics(
    net: DirectedNetwork,
    stage: int,
    reference_arc: Optional[tuple[int, int]] = None,
    augment: bool = False,
) -> StageMetrics:
    """Solve the network (capacity-weighted transitions) and collect stage metrics."""
    solved, cloud = _solvable(net, augment)
    t = markov.capacity_transition(solved)
    pi = markov.stationary(t, kappa=1.0)
    flow = markov.normalize_min(markov.ideal_flow(pi, t))
    check = markov.is_premagic(flow)
    entropy = markov.network_entropy(t, pi)

    peak = np.argwhere(flow == flow.max())[0]  # row-major first, deterministic
    ref_flow = None
    if reference_arc is not None:
        tail, head = reference_arc
        if 0 <= tail < flow.shape[0] and 0 <= head < flow.shape[0] and flow[tail, head] > 0:
            ref_flow = round12(flow[tail, head])
    return StageMetrics(
        stage=stage,
        flow=tuple(tuple(round12(v) for v in row) for row in flow),
        max_flow_arc=(int(peak[0]), int(peak[1]), round12(flow.max())),
        premagic_residual=round12(check.residual),
        node_entropy=tuple(round12(h) for h in entropy.per_node),
        network_entropy=round12(entropy.network_entropy),
        cloud_node=cloud,
        reference_arc=reference_arc,
        reference_flow=ref_flow,
    )


class Session:
    """One what-if session: a network, its edit history, and per-stage snapshots.

    Mutations are serialized through a per-session lock. A rejected edit never
    changes state; replaying the recorded history from the initial network
    reproduces every snapshot exactly.
    """

    def __init__(
        self,
        net: DirectedNetwork,
        augment: bool = False,
        reference_arc: Optional[tuple[int, int]] = None,
        journal_path: Optional[Path] = None,
        session_id: Optional[str] = None,
    ):
        self.id = session_id or uuid.uuid4().hex
        self.created_at = time.time()
        self.augment = augment
        self.reference_arc = reference_arc
        self.journal_path = journal_path
        self._lock = threading.Lock()
        self._nets: list[DirectedNetwork] = [net]
        self._edits: list[EditOp] = []
        snapshot = compute_stage_metrics(net, 0, reference_arc, augment)
        self._snapshots: list[StageMetrics] = [snapshot]
        self._journal({"event": "create", "augment": augment,
                       "referenceArc": list(reference_arc) if reference_arc else None,
                       "n": net.n,
                       "arcs": [[a.tail, a.head, a.capacity] for a in net.arcs]})

    def _journal(self, record: dict) -> None:
        if self.journal_path is None:
            return
        with self.journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    @property
    def network(self) -> DirectedNetwork:
        return self._nets[-1]

    @property
    def stage(self) -> int:
        return len(self._edits)

    @property
    def snapshot(self) -> StageMetrics:
        return self._snapshots[-1]

    @property
    def history(self) -> tuple[EditOp, ...]:
        return tuple(self._edits)

    def apply_edit(self, edit: EditOp) -> StageMetrics:
        with self._lock:
            net = self.network
            if edit.op == "add":
                if net.has_arc(edit.tail, edit.head):
                    raise EditConflict(f"arc {edit.tail}->{edit.head} already exists")
                if not (0 <= edit.tail < net.n and 0 <= edit.head < net.n):
                    raise EditConflict(f"arc {edit.tail}->{edit.head} out of range")
                if edit.tail == edit.head:
                    raise EditConflict("self-loops are not allowed")
                candidate = net.with_arc(edit.tail, edit.head, edit.capacity)
            elif edit.op == "remove":
                if not net.has_arc(edit.tail, edit.head):
                    raise EditConflict(f"arc {edit.tail}->{edit.head} not present")
                candidate = net.without_arc(edit.tail, edit.head)
            else:
                raise EditConflict(f"unknown edit op {edit.op!r}")

            stage = self.stage + 1
            try:
                snapshot = compute_stage_metrics(
                    candidate, stage, self.reference_arc, self.augment
                )
            except NotStronglyConnected as exc:
                raise EditRejected(stage, str(exc)) from exc
            self._nets.append(candidate)
            self._edits.append(edit)
            self._snapshots.append(snapshot)
            self._journal({"event": "edit", **edit.to_json()})
            return snapshot

    def undo(self) -> StageMetrics:
        with self._lock:
            if not self._edits:
                raise EditConflict("history is empty")
            self._nets.pop()
            self._edits.pop()
            self._snapshots.pop()
            self._journal({"event": "undo"})
            return self._snapshots[-1]

    def flow_view(self, normalize: str = "min", method: str = "markov") -> list[list[float]]:
        """Current flow matrix under explicit normalization and solve method."""
        solved, _ = _solvable(self.network, self.augment)
        if method == "markov":
            t = markov.capacity_transition(solved)
            flow = markov.ideal_flow(markov.stationary(t, 1.0), t)
        elif method == "nullspace":
            flow = nullspace.standard_flow(solved)
        else:
            raise ValueError(f"unknown method {method!r}")
        if normalize == "min":
            flow = markov.normalize_min(flow)
        elif normalize == "total":
            flow = flow / flow.sum()
        else:
            raise ValueError(f"unknown normalization {normalize!r}")
        return [[round12(v) for v in row] for row in flow]


def replay_journal(path: Path) -> Session:
    """Rebuild a session from its append-only journal; snapshots are recomputed."""
    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
    if not lines or lines[0].get("event") != "create":
        raise ValueError("journal must start with a create event")
    head = lines[0]
    net = DirectedNetwork.from_arcs(head["n"], [tuple(a) for a in head["arcs"]])
    ref = tuple(head["referenceArc"]) if head.get("referenceArc") else None
    session = Session(net, augment=head["augment"], reference_arc=ref)
    for record in lines[1:]:
        if record["event"] == "edit":
            session.apply_edit(EditOp(record["op"], record["tail"], record["head"], record["capacity"]))
        elif record["event"] == "undo":
            session.undo()
    return session


def run_script(
    net: DirectedNetwork,
    edits: list[EditOp],
    augment: bool = False,
    reference_arc: Optional[tuple[int, int]] = None,
) -> list[StageMetrics]:
    """Batch replay of an edit script; returns the snapshot of every stage."""
    session = Session(net, augment=augment, reference_arc=reference_arc)
    snapshots = [session.snapshot]
    for edit in edits:
        snapshots.append(session.apply_edit(edit))
    return snapshots
