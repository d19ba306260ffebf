"""Command-line interface: compute, simulate, calibrate, whatif, serve.

Exit codes are stable API: 0 success, 2 input/validation error, 3 numeric solver
failure, 4 environment error. Defaults may be supplied by an optional
./idealflow.conf file of key=value lines (keys match long flag names with
dashes replaced by underscores); explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, calibrate, markov, nullspace
from .simulate import SimConfig, convergence_series, propagate_flow, relative_flow
from .simulate import simulate as run_walk
from .errors import (
    ConservationViolated,
    DanglingNode,
    DegenerateNullSpace,
    DimensionMismatch,
    EditConflict,
    EditRejected,
    EmptyFlow,
    IdealFlowError,
    MetadataMismatch,
    NoConvergence,
    NonPositiveEntry,
    NonPositiveScale,
    NotIrreducible,
    NotSquare,
    NotStronglyConnected,
    ParseError,
    SchemaError,
    SolverFailure,
    UnknownArc,
    ZeroUnitFlow,
)
from .graph import DirectedNetwork, augment_with_cloud, is_strongly_connected, remove_self_loops
from .io_formats import (
    export_matrix_csv,
    fmt12,
    load_document,
    parse_tntp_flow,
    parse_tntp_net,
    round12,
)
from .sessions import EditOp, run_script

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_ENVIRONMENT = 4

CONFIG_FILE = "idealflow.conf"

_INPUT_ERRORS = (
    ParseError,
    SchemaError,
    MetadataMismatch,
    NotStronglyConnected,
    NotIrreducible,
    DanglingNode,
    UnknownArc,
    DimensionMismatch,
    EmptyFlow,
    NonPositiveScale,
    NotSquare,
    NonPositiveEntry,
    ZeroUnitFlow,
    EditRejected,
    EditConflict,
    ValueError,
)
_NUMERIC_ERRORS = (SolverFailure, DegenerateNullSpace, NoConvergence, ConservationViolated)


def _load_config(directory: Path) -> dict[str, str]:
    path = directory / CONFIG_FILE
    if not path.is_file():
        return {}
    values: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def load_network(path: Path, fmt: str = "auto") -> DirectedNetwork:
    """Read a network from a .json document or a .tntp file, sniffed by extension."""
    text = path.read_text(encoding="utf-8")
    if fmt == "auto":
        fmt = "tntp" if path.suffix.lower() == ".tntp" else "json"
    if fmt == "tntp":
        net, _ = parse_tntp_net(text)
        return net
    return load_document(text).to_network()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _summary(net: DirectedNetwork, t: np.ndarray, pi: np.ndarray, flow: np.ndarray,
             method: str, normalization: str, cloud: Optional[int]) -> dict:
    check = markov.is_premagic(flow)
    entropy = markov.network_entropy(t, pi)
    peak = np.argwhere(flow == flow.max())[0]
    return {
        "method": method,
        "n": net.n,
        "arcs": net.p,
        "normalization": normalization,
        "totalFlow": round12(flow.sum()),
        "premagicResidual": round12(check.residual),
        "maxFlowArc": {
            "tail": int(peak[0]),
            "head": int(peak[1]),
            "value": round12(flow.max()),
        },
        "entropy": {
            "perNode": [round12(h) for h in entropy.per_node],
            "networkEntropy": round12(entropy.network_entropy),
        },
        "cloudNode": cloud,
    }


def cmd_compute(args) -> int:
    net = load_network(Path(args.network), args.format)
    net = remove_self_loops(net)
    if args.capacity_weighted and args.method != "markov":
        print("--capacity-weighted requires --method markov", file=sys.stderr)
        return EXIT_INPUT

    cloud = None
    if args.augment:
        aug = augment_with_cloud(net)
        work, cloud = aug.network, aug.cloud_node
    else:
        if not is_strongly_connected(net):
            raise NotStronglyConnected(
                "network is not strongly connected; pass --augment to add a cloud node"
            )
        work = net

    if args.method == "markov":
        t = markov.capacity_transition(work) if args.capacity_weighted else markov.uniform_transition(work)
        pi = markov.stationary(t, kappa=1.0)
        flow = markov.ideal_flow(pi, t)
    elif args.method == "nullspace":
        t = markov.uniform_transition(work)
        flow = nullspace.standard_flow(work)
        pi = flow.sum(axis=1) / flow.sum()
    else:
        t = markov.uniform_transition(work)
        flow = propagate_flow(work, origin=0)
        pi = flow.sum(axis=1) / flow.sum()

    if args.normalize == "min":
        flow = markov.normalize_min(flow)
    else:
        flow = markov.scale(flow / flow.sum(), args.kappa)
    if args.snap:
        flow = markov.snap_integers(flow)

    csv_text = export_matrix_csv(flow, work.labels)
    summary = _summary(work, t, pi, flow, args.method, args.normalize, cloud)
    if args.out:
        out = Path(args.out)
        _write(out / "flow.csv", csv_text)
        _write(out / "summary.json", _json_text(summary))
    else:
        sys.stdout.write(csv_text)
        sys.stdout.write(_json_text(summary))
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = load_network(Path(args.network), args.format)
    net = remove_self_loops(net)
    if not is_strongly_connected(net):
        raise NotStronglyConnected("simulation requires a strongly connected network")
    t = markov.capacity_transition(net) if args.capacity_weighted else markov.uniform_transition(net)
    cfg = SimConfig(agents=args.agents, steps=args.steps, seed=args.seed)

    series = convergence_series(net, t, cfg, checkpoint_count=args.checkpoints)
    counts = run_walk(net, t, cfg)
    rel = relative_flow(counts, net)

    counts_csv = export_matrix_csv(counts, net.labels)
    rel_csv = export_matrix_csv(rel, net.labels)
    summary = {
        "agents": args.agents,
        "steps": args.steps,
        "seed": args.seed,
        "totalTransitions": int(counts.sum()),
        "finalMaxRelError": round12(series.checkpoints[-1][1]),
    }
    if args.out:
        out = Path(args.out)
        _write(out / "counts.csv", counts_csv)
        _write(out / "relative_flow.csv", rel_csv)
        _write(out / "convergence.csv", series.to_csv())
        _write(out / "summary.json", _json_text(summary))
    else:
        sys.stdout.write(counts_csv)
        sys.stdout.write(rel_csv)
        sys.stdout.write(series.to_csv())
        sys.stdout.write(_json_text(summary))
    return EXIT_OK


def cmd_calibrate(args) -> int:
    net, _ = parse_tntp_net(Path(args.network).read_text(encoding="utf-8"))
    net = remove_self_loops(net)
    observed, _ = parse_tntp_flow(
        Path(args.flows).read_text(encoding="utf-8"), net=net, strict=args.strict
    )
    aug = augment_with_cloud(net)
    observed_aug = calibrate.extend_observed_to_augmented(observed, aug)
    unit = calibrate.unit_ideal_flow(observed_aug)

    arc_mask = None
    if aug.cloud_node is not None and not args.include_dummy_arcs:
        arc_mask = np.ones(observed_aug.shape, dtype=bool)
        arc_mask[aug.cloud_node, :] = False
        arc_mask[:, aug.cloud_node] = False
    mode = "golden-section" if args.mode == "search" else "closed-form"
    result = calibrate.fit_scale(unit, observed_aug, mode=mode, arc_mask=arc_mask)

    report = {
        "kappa": round12(result.kappa),
        "sse": round12(result.sse),
        "mse": round12(result.mse),
        "arcCount": result.arc_count,
        "mode": result.mode,
        "includeDummyArcs": bool(args.include_dummy_arcs),
        "cloudNode": aug.cloud_node,
    }
    labels = aug.network.labels
    residual_lines = ["tail,head,observed,fitted,residual"]
    for r in result.residuals:
        residual_lines.append(
            f"{labels[r.tail]},{labels[r.head]},{fmt12(r.observed)},{fmt12(r.fitted)},{fmt12(r.residual)}"
        )
    residuals_csv = "\n".join(residual_lines) + "\n"
    trace_lines = ["kappa,sse"]
    for k, s in result.search_trace:
        trace_lines.append(f"{fmt12(k)},{fmt12(s)}")
    trace_csv = "\n".join(trace_lines) + "\n"

    if args.out:
        out = Path(args.out)
        _write(out / "calibration.json", _json_text(report))
        _write(out / "residuals.csv", residuals_csv)
        _write(out / "search_trace.csv", trace_csv)
    else:
        sys.stdout.write(_json_text(report))
        sys.stdout.write(residuals_csv)
        sys.stdout.write(trace_csv)
    return EXIT_OK


def _parse_arc_option(value: str) -> tuple[int, int]:
    parts = value.split(",")
    if len(parts) != 2:
        raise ValueError("reference arc must be 'tail,head'")
    return int(parts[0]), int(parts[1])


def cmd_whatif(args) -> int:
    net = load_network(Path(args.network), args.format)
    script = json.loads(Path(args.script).read_text(encoding="utf-8"))
    if not isinstance(script, list):
        raise SchemaError("$", "edit script must be a JSON array")
    edits = []
    for i, entry in enumerate(script):
        if not isinstance(entry, dict) or entry.get("op") not in ("add", "remove"):
            raise SchemaError(f"$[{i}]", "each edit needs op add|remove, tail, head")
        edits.append(
            EditOp(
                op=entry["op"],
                tail=int(entry["tail"]),
                head=int(entry["head"]),
                capacity=float(entry.get("capacity", 1.0)),
            )
        )
    reference = _parse_arc_option(args.reference_arc) if args.reference_arc else None
    snapshots = run_script(net, edits, augment=args.augment, reference_arc=reference)
    report = {"stages": [s.to_payload() for s in snapshots]}
    text = _json_text(report)
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT

    app = create_app(
        journal_dir=Path(args.journal_dir) if args.journal_dir else None,
        cors_origins=args.cors_origin or None,
        static_dir=Path(args.static) if args.static else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser(config: Optional[dict[str, str]] = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idealflow",
        description="Ideal relative flow distribution on directed networks.",
    )
    parser.add_argument("--version", action="version", version=f"idealflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="solve the ideal flow of a network")
    compute.add_argument("network", help="network file (.json document or .tntp)")
    compute.add_argument("--method", choices=["markov", "nullspace", "propagate"], default="markov")
    compute.add_argument("--capacity-weighted", action="store_true",
                         help="weight transitions by arc capacity (markov only)")
    compute.add_argument("--kappa", type=float, default=1.0,
                         help="total flow when --normalize total")
    compute.add_argument("--normalize", choices=["min", "total"], default="min")
    compute.add_argument("--augment", action="store_true",
                         help="add a cloud node when not strongly connected")
    compute.add_argument("--snap", action="store_true",
                         help="round near-integer flows for display")
    compute.add_argument("--format", choices=["auto", "json", "tntp"], default="auto")
    compute.add_argument("--out", help="output directory (flow.csv, summary.json)")
    compute.set_defaults(func=cmd_compute)

    sim = sub.add_parser("simulate", help="multi-agent random-walk estimation")
    sim.add_argument("network")
    sim.add_argument("--agents", type=int, required=True)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--checkpoints", type=int, default=10)
    sim.add_argument("--capacity-weighted", action="store_true")
    sim.add_argument("--format", choices=["auto", "json", "tntp"], default="auto")
    sim.add_argument("--out", help="output directory")
    sim.set_defaults(func=cmd_simulate)

    cal = sub.add_parser("calibrate", help="fit the flow scaling against observed volumes")
    cal.add_argument("network", help="TNTP network file")
    cal.add_argument("flows", help="TNTP link-flow file")
    cal.add_argument("--mode", choices=["closed-form", "search"], default="closed-form")
    cal.add_argument("--include-dummy-arcs", action="store_true",
                     help="let cloud-incident arcs enter the error metrics")
    cal.add_argument("--strict", action="store_true",
                     help="reject flow rows naming arcs absent from the network")
    cal.add_argument("--out", help="output directory")
    cal.set_defaults(func=cmd_calibrate)

    whatif = sub.add_parser("whatif", help="replay an edit script, reporting each stage")
    whatif.add_argument("network")
    whatif.add_argument("script", help="JSON array of {op, tail, head, capacity?} edits")
    whatif.add_argument("--augment", action="store_true")
    whatif.add_argument("--reference-arc", help="arc 'tail,head' whose flow to track")
    whatif.add_argument("--format", choices=["auto", "json", "tntp"], default="auto")
    whatif.add_argument("--out", help="output JSON file")
    whatif.set_defaults(func=cmd_whatif)

    serve = sub.add_parser("serve", help="run the what-if HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--cors-origin", action="append")
    serve.add_argument("--journal-dir", help="append-only per-session edit journals")
    serve.add_argument("--static", help="static asset directory to serve at /")
    serve.set_defaults(func=cmd_serve)

    if config:
        for command in (compute, sim, cal, whatif, serve):
            known = {a.dest for a in command._actions}
            overrides = {}
            for key, value in config.items():
                if key not in known:
                    continue
                current = command.get_default(key)
                if isinstance(current, bool):
                    overrides[key] = value.lower() in ("1", "true", "yes")
                elif isinstance(current, int):
                    overrides[key] = int(value)
                elif isinstance(current, float):
                    overrides[key] = float(value)
                else:
                    overrides[key] = value
            if overrides:
                command.set_defaults(**overrides)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    config = _load_config(Path.cwd())
    parser = build_parser(config)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT


if __name__ == "__main__":
    sys.exit(main())
