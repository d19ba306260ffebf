"""Pydantic request/response models for the what-if HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class NodeModel(BaseModel):
    id: int
    label: Optional[str] = None
    x: Optional[float] = None
    y: Optional[float] = None


class ArcModel(BaseModel):
    tail: int
    head: int
    capacity: float = 1.0


class ObservedFlowModel(BaseModel):
    tail: int
    head: int
    volume: float


class NetworkDocModel(BaseModel):
    schemaVersion: int = 1
    nodes: list[NodeModel]
    arcs: list[ArcModel]
    observedFlows: Optional[list[ObservedFlowModel]] = None


class CreateSessionRequest(BaseModel):
    network: Optional[NetworkDocModel] = None
    tntp: Optional[str] = None
    referenceArc: Optional[tuple[int, int]] = None


class EditRequest(BaseModel):
    op: Literal["add", "remove"]
    tail: int
    head: int
    capacity: float = Field(default=1.0, gt=0)


class MaxFlowArcModel(BaseModel):
    tail: int
    head: int
    value: float


class EntropyModel(BaseModel):
    perNode: list[float]
    networkEntropy: float


class SnapshotModel(BaseModel):
    stage: int
    flow: list[list[float]]
    maxFlowArc: MaxFlowArcModel
    premagicResidual: float
    entropy: EntropyModel
    cloudNode: Optional[int] = None
    referenceArc: Optional[list[int]] = None
    referenceFlow: Optional[float] = None


class SessionCreatedResponse(BaseModel):
    sessionId: str
    snapshot: SnapshotModel


class FlowResponse(BaseModel):
    flow: list[list[float]]
    snapshot: SnapshotModel


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Optional[str] = None
