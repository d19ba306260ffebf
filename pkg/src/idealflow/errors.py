"""Exception types shared across the package."""

from __future__ import annotations


class IdealFlowError(Exception):
    """Base class for all errors raised by this package."""


class NotStronglyConnected(IdealFlowError):
    """The network is not strongly connected where the operation requires it."""


class AugmentationFailed(NotStronglyConnected):
    """Cloud augmentation did not produce a strongly connected network."""


class DanglingNode(IdealFlowError):
    """A node has no out-arc (or no observed outflow) where one is required."""

    def __init__(self, node: int, message: str | None = None):
        self.node = node
        super().__init__(message or f"node {node} has no outgoing flow")


class NotIrreducible(IdealFlowError):
    """The transition matrix support is not strongly connected."""


class SolverFailure(IdealFlowError):
    """A numeric solve finished with a residual above tolerance."""


class DimensionMismatch(IdealFlowError):
    """Operand shapes do not agree."""


class EmptyFlow(IdealFlowError):
    """A flow matrix has no positive entry to normalize against."""


class NonPositiveScale(IdealFlowError):
    """Scaling factor must be a positive finite number."""


class NotSquare(IdealFlowError):
    """A square matrix was expected."""


class DegenerateNullSpace(IdealFlowError):
    """The stacked system has a null space of dimension other than one."""


class NonPositiveEntry(IdealFlowError):
    """An edge vector entry is zero or negative where positivity is required."""


class ConservationViolated(IdealFlowError):
    """Node in/out loads disagree beyond tolerance."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"flow conservation violated, residual {residual:.3e}")


class NoConvergence(IdealFlowError):
    """Iteration budget exhausted before reaching tolerance."""

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations, last residual {residual:.3e}"
        )


class ZeroUnitFlow(IdealFlowError):
    """The unit ideal flow is identically zero on the fitted arcs."""


class ParseError(IdealFlowError):
    """A text input failed to parse; carries a 1-based line number."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class MetadataMismatch(IdealFlowError):
    """Declared counts in a file header disagree with its body."""


class UnknownArc(IdealFlowError):
    """A referenced arc does not exist in the network."""

    def __init__(self, tail: int, head: int, message: str | None = None):
        self.tail = tail
        self.head = head
        super().__init__(message or f"unknown arc {tail + 1}->{head + 1}")


class SchemaError(IdealFlowError):
    """A JSON document violates the network-document schema."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class EditConflict(IdealFlowError):
    """An edit names an arc that already exists (add) or is missing (remove)."""


class EditRejected(IdealFlowError):
    """An edit was refused because it would break strong connectivity."""

    def __init__(self, stage: int, message: str | None = None):
        self.stage = stage
        super().__init__(message or f"edit at stage {stage} breaks strong connectivity")
