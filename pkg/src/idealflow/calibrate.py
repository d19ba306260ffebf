"""Fit the global scaling of an ideal flow matrix to observed link flows."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionMismatch, ZeroUnitFlow
from .graph import AugmentedNetwork
from .markov import ideal_flow, stationary, transition_from_flows

GOLDEN_REL_TOL = 1e-6
# Floor for imbalance-derived dummy volumes, keeps every cloud row normalizable.
IMBALANCE_FLOOR = 1e-9


class ArcResidual(NamedTuple):
    tail: int
    head: int
    observed: float
    fitted: float
    residual: float


@dataclass(frozen=True)
class CalibrationResult:
    """Fitted scaling with its error metrics and per-arc residuals.

    ``search_trace`` lists every (kappa candidate, sse) evaluated; the returned
    kappa minimizes sse over the trace, and mse = sse / arc_count.
    """

    kappa: float
    sse: float
    mse: float
    arc_count: int
    residuals: tuple[ArcResidual, ...]
    search_trace: tuple[tuple[float, float], ...]
    mode: str


def unit_ideal_flow(f_obs: np.ndarray) -> np.ndarray:
    """Ideal flow with total 1 whose transition structure is derived from the data.

    Row-normalizes the observed flows into a transition matrix, solves for the
    stationary vector at total 1, and assembles the flow, so scaling the result
    by any kappa preserves the observed routing proportions.
    """
    t = transition_from_flows(f_obs)
    pi = stationary(t, kappa=1.0)
    return ideal_flow(pi, t)


def extend_observed_to_augmented(
    f_obs: np.ndarray, aug: AugmentedNetwork, floor: float = IMBALANCE_FLOOR
) -> np.ndarray:
    """Embed base-network observations into the augmented network's node space.

    Dummy arcs carry the flow imbalance of the real node they serve (inflow minus
    outflow for arcs into the cloud, the reverse for arcs out of it), floored at
    a small positive value so every row stays normalizable.
    """
    f_obs = np.asarray(f_obs, dtype=float)
    n = aug.base.n
    if f_obs.shape != (n, n):
        raise DimensionMismatch(
            f"observed flows of shape {f_obs.shape} do not match base n={n}"
        )
    if aug.cloud_node is None:
        return f_obs.copy()
    n_aug = aug.network.n
    out = np.zeros((n_aug, n_aug))
    out[:n, :n] = f_obs
    inflow = f_obs.sum(axis=0)
    outflow = f_obs.sum(axis=1)
    for arc in aug.dummy_arcs:
        if arc.head == aug.cloud_node:
            volume = inflow[arc.tail] - outflow[arc.tail]
        else:
            volume = outflow[arc.head] - inflow[arc.head]
        out[arc.tail, arc.head] = max(float(volume), floor)
    return out


def _golden_section(sse, lo: float, hi: float) -> tuple[float, list[tuple[float, float]]]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = sse(c), sse(d)
    trace = [(c, fc), (d, fd)]
    while (b - a) > GOLDEN_REL_TOL * max(abs(a), abs(b), 1.0):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = sse(c)
            trace.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = sse(d)
            trace.append((d, fd))
    mid = 0.5 * (a + b)
    trace.append((mid, sse(mid)))
    best = min(trace, key=lambda point: point[1])
    return best[0], trace


def fit_scale(
    f_unit: np.ndarray,
    f_obs: np.ndarray,
    mode: str = "closed-form",
    arc_mask: Optional[np.ndarray] = None,
) -> CalibrationResult:
    """Least-squares fit of a single kappa so that kappa * f_unit matches f_obs.

    Arcs in the union of both supports enter the fit and the error metrics; an
    arc present on only one side contributes its full value to the residuals.
    ``arc_mask`` (boolean, same shape) restricts which arcs are considered, e.g.
    to exclude cloud-incident dummy arcs.

    Modes: "closed-form" evaluates the exact 1-D least-squares minimizer
    sum(f_unit * f_obs) / sum(f_unit^2); "golden-section" searches the bracket
    [sum(f_obs)/10, 10*sum(f_obs)] and records its trace.

    Raises:
        ZeroUnitFlow: f_unit vanishes on every considered arc.
    """
    f_unit = np.asarray(f_unit, dtype=float)
    f_obs = np.asarray(f_obs, dtype=float)
    if f_unit.shape != f_obs.shape:
        raise DimensionMismatch(
            f"unit flow {f_unit.shape} vs observed {f_obs.shape}"
        )
    support = (f_unit > 0) | (f_obs > 0)
    if arc_mask is not None:
        support &= np.asarray(arc_mask, dtype=bool)
    u = f_unit[support]
    o = f_obs[support]
    denom = float((u * u).sum())
    if denom == 0.0:
        raise ZeroUnitFlow("unit ideal flow is zero on every considered arc")

    def sse_at(k: float) -> float:
        return float(((o - k * u) ** 2).sum())

    if mode == "closed-form":
        kappa = float((u @ o) / denom)
        trace = [(kappa, sse_at(kappa))]
    elif mode == "golden-section":
        total = float(o.sum())
        if total <= 0:
            raise ValueError("golden-section search needs positive observed flow")
        kappa, trace = _golden_section(sse_at, total / 10.0, 10.0 * total)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    sse = sse_at(kappa)
    fitted = kappa * f_unit
    residuals = tuple(
        ArcResidual(
            tail=int(i),
            head=int(j),
            observed=float(f_obs[i, j]),
            fitted=float(fitted[i, j]),
            residual=float(f_obs[i, j] - fitted[i, j]),
        )
        for i, j in np.argwhere(support)
    )
    arc_count = int(support.sum())
    return CalibrationResult(
        kappa=kappa,
        sse=sse,
        mse=sse / arc_count,
        arc_count=arc_count,
        residuals=residuals,
        search_trace=tuple(trace),
        mode=mode,
    )
