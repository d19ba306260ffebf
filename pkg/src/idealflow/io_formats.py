"""File formats: TNTP network/flow text, the native JSON network document, CSV export.

TNTP files follow the public convention: angle-bracket metadata tags ended by
<END OF METADATA>, `~` comment lines, whitespace-separated link rows with an
optional trailing `;`. Node ids are 1-based in every file and 0-based internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MetadataMismatch, ParseError, SchemaError, UnknownArc
from .graph import DirectedNetwork

SCHEMA_VERSION = 1


def fmt12(x: float) -> str:
    """Decimal form with 12 significant digits, the package-wide output precision."""
    return format(float(x), ".12g")


def round12(x: float) -> float:
    """Value rounded to 12 significant decimal digits (for JSON payloads)."""
    return float(fmt12(x))


@dataclass(frozen=True)
class TntpLink:
    init_node: int
    term_node: int
    capacity: float
    length: float
    free_flow_time: float
    b: float
    power: float
    speed: float
    toll: float
    link_type: int


@dataclass(frozen=True)
class TntpNetworkFile:
    num_zones: int
    num_nodes: int
    first_thru_node: int
    num_links: int
    links: tuple[TntpLink, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class FlowRecord:
    from_node: int
    to_node: int
    volume: float
    cost: float


def _clean_row(line: str) -> list[str]:
    return line.strip().rstrip(";").split()


def parse_tntp_net(text: str) -> tuple[DirectedNetwork, TntpNetworkFile]:
    """Parse a TNTP network file into a capacity-weighted network plus raw records.

    Raises:
        ParseError: malformed metadata or link row, with its 1-based line number.
        MetadataMismatch: declared link count disagrees with the rows present.
    """
    meta: dict[str, int] = {}
    links: list[TntpLink] = []
    in_metadata = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("~"):
            continue
        if line.startswith("<"):
            if ">" not in line:
                raise ParseError(lineno, "unterminated metadata tag")
            tag, _, rest = line[1:].partition(">")
            tag = tag.strip().upper()
            if tag == "END OF METADATA":
                in_metadata = False
                continue
            try:
                meta[tag] = int(rest.strip())
            except ValueError:
                raise ParseError(lineno, f"non-integer metadata value for <{tag}>")
            continue
        if in_metadata:
            raise ParseError(lineno, "link row before <END OF METADATA>")
        parts = _clean_row(line)
        if len(parts) < 10:
            raise ParseError(lineno, f"expected 10 link columns, got {len(parts)}")
        try:
            link = TntpLink(
                init_node=int(parts[0]),
                term_node=int(parts[1]),
                capacity=float(parts[2]),
                length=float(parts[3]),
                free_flow_time=float(parts[4]),
                b=float(parts[5]),
                power=float(parts[6]),
                speed=float(parts[7]),
                toll=float(parts[8]),
                link_type=int(float(parts[9])),
            )
        except ValueError:
            raise ParseError(lineno, "non-numeric value in link row")
        num_nodes = meta.get("NUMBER OF NODES")
        if num_nodes is not None and not (
            1 <= link.init_node <= num_nodes and 1 <= link.term_node <= num_nodes
        ):
            raise ParseError(lineno, "node index outside 1..numNodes")
        if link.capacity <= 0:
            raise ParseError(lineno, f"nonpositive capacity {link.capacity}")
        links.append(link)

    for required in ("NUMBER OF NODES", "NUMBER OF LINKS"):
        if required not in meta:
            raise ParseError(1, f"missing <{required}> metadata")
    tntp = TntpNetworkFile(
        num_zones=meta.get("NUMBER OF ZONES", meta["NUMBER OF NODES"]),
        num_nodes=meta["NUMBER OF NODES"],
        first_thru_node=meta.get("FIRST THRU NODE", 1),
        num_links=meta["NUMBER OF LINKS"],
        links=tuple(links),
    )
    if tntp.num_links != len(links):
        raise MetadataMismatch(
            f"declared {tntp.num_links} links but parsed {len(links)}"
        )
    seen: set[tuple[int, int]] = set()
    for link in links:
        key = (link.init_node, link.term_node)
        if key in seen:
            raise MetadataMismatch(f"duplicate link {key[0]}->{key[1]}")
        seen.add(key)
    net = DirectedNetwork.from_arcs(
        tntp.num_nodes,
        [(l.init_node - 1, l.term_node - 1, l.capacity) for l in links],
    )
    return net, tntp


def parse_tntp_flow(
    text: str,
    net: Optional[DirectedNetwork] = None,
    strict: bool = False,
) -> tuple[np.ndarray, tuple[FlowRecord, ...]]:
    """Parse a TNTP flow file (From To Volume Cost) into a volume matrix.

    With ``net`` given, the matrix is sized to the network and, when strict,
    rows naming arcs absent from it raise UnknownArc. Without a network the
    size is inferred from the largest node id seen.
    """
    records: list[FlowRecord] = []
    seen: set[tuple[int, int]] = set()
    header_skipped = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("~") or line.startswith("<"):
            continue
        parts = _clean_row(line)
        if len(parts) < 3:
            raise ParseError(lineno, f"expected From To Volume [Cost], got {len(parts)} fields")
        try:
            rec = FlowRecord(
                from_node=int(parts[0]),
                to_node=int(parts[1]),
                volume=float(parts[2]),
                cost=float(parts[3]) if len(parts) > 3 else 0.0,
            )
        except ValueError:
            if not header_skipped:
                header_skipped = True
                continue
            raise ParseError(lineno, "non-numeric value in flow row")
        if rec.volume < 0:
            raise ParseError(lineno, f"negative volume {rec.volume}")
        key = (rec.from_node, rec.to_node)
        if key in seen:
            raise ParseError(lineno, f"duplicate flow entry {key[0]}->{key[1]}")
        seen.add(key)
        records.append(rec)

    if net is not None:
        n = net.n
        arcs = net.arc_set()
        for rec in records:
            tail, head = rec.from_node - 1, rec.to_node - 1
            if not (0 <= tail < n and 0 <= head < n):
                raise UnknownArc(tail, head, f"node id outside 1..{n}")
            if strict and (tail, head) not in arcs:
                raise UnknownArc(tail, head)
    else:
        n = max((max(r.from_node, r.to_node) for r in records), default=0)

    volumes = np.zeros((n, n))
    for rec in records:
        volumes[rec.from_node - 1, rec.to_node - 1] = rec.volume
    return volumes, tuple(records)


@dataclass(frozen=True)
class NetworkDocument:
    """Native JSON document: nodes with optional labels/coordinates, weighted arcs,
    and optional observed per-arc volumes. Node ids must be the dense indices
    0..n-1 (in any order)."""

    nodes: tuple[dict, ...]
    arcs: tuple[dict, ...]
    observed_flows: Optional[tuple[dict, ...]] = None
    schema_version: int = SCHEMA_VERSION

    def to_network(self) -> DirectedNetwork:
        n = len(self.nodes)
        labels = [""] * n
        for node in self.nodes:
            labels[node["id"]] = node.get("label", str(node["id"] + 1))
        return DirectedNetwork.from_arcs(
            n,
            [(a["tail"], a["head"], a.get("capacity", 1.0)) for a in self.arcs],
            labels,
        )

    def observed_matrix(self) -> Optional[np.ndarray]:
        if self.observed_flows is None:
            return None
        n = len(self.nodes)
        out = np.zeros((n, n))
        for rec in self.observed_flows:
            out[rec["tail"], rec["head"]] = rec["volume"]
        return out


def _expect(condition: bool, path: str, reason: str) -> None:
    if not condition:
        raise SchemaError(path, reason)


def load_document(text: str) -> NetworkDocument:
    """Parse and validate a JSON network document (schemaVersion 1)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg}")
    _expect(isinstance(doc, dict), "$", "document must be a JSON object")
    _expect(
        doc.get("schemaVersion") == SCHEMA_VERSION,
        "$.schemaVersion",
        f"must be {SCHEMA_VERSION}",
    )
    nodes = doc.get("nodes")
    _expect(isinstance(nodes, list) and nodes, "$.nodes", "must be a non-empty array")
    n = len(nodes)
    ids: set[int] = set()
    clean_nodes = []
    for i, node in enumerate(nodes):
        path = f"$.nodes[{i}]"
        _expect(isinstance(node, dict), path, "must be an object")
        nid = node.get("id")
        _expect(isinstance(nid, int) and not isinstance(nid, bool), f"{path}.id", "must be an integer")
        _expect(0 <= nid < n, f"{path}.id", f"must lie in 0..{n - 1}")
        _expect(nid not in ids, f"{path}.id", "duplicate node id")
        ids.add(nid)
        entry = {"id": nid}
        if "label" in node:
            _expect(isinstance(node["label"], str), f"{path}.label", "must be a string")
            entry["label"] = node["label"]
        for coord in ("x", "y"):
            if coord in node:
                _expect(
                    isinstance(node[coord], (int, float)) and not isinstance(node[coord], bool),
                    f"{path}.{coord}",
                    "must be a number",
                )
                entry[coord] = float(node[coord])
        clean_nodes.append(entry)

    arcs = doc.get("arcs")
    _expect(isinstance(arcs, list), "$.arcs", "must be an array")
    clean_arcs = []
    seen_arcs: set[tuple[int, int]] = set()
    for i, arc in enumerate(arcs):
        path = f"$.arcs[{i}]"
        _expect(isinstance(arc, dict), path, "must be an object")
        for endpoint in ("tail", "head"):
            v = arc.get(endpoint)
            _expect(isinstance(v, int) and not isinstance(v, bool), f"{path}.{endpoint}", "must be an integer")
            _expect(v in ids, f"{path}.{endpoint}", f"references missing node {v}")
        cap = arc.get("capacity", 1.0)
        _expect(
            isinstance(cap, (int, float)) and not isinstance(cap, bool) and cap > 0,
            f"{path}.capacity",
            "must be a positive number",
        )
        key = (arc["tail"], arc["head"])
        _expect(key not in seen_arcs, path, f"duplicate arc {key[0]}->{key[1]}")
        seen_arcs.add(key)
        clean_arcs.append({"tail": arc["tail"], "head": arc["head"], "capacity": float(cap)})

    observed = None
    if "observedFlows" in doc and doc["observedFlows"] is not None:
        flows = doc["observedFlows"]
        _expect(isinstance(flows, list), "$.observedFlows", "must be an array")
        clean_flows = []
        seen_flows: set[tuple[int, int]] = set()
        for i, rec in enumerate(flows):
            path = f"$.observedFlows[{i}]"
            _expect(isinstance(rec, dict), path, "must be an object")
            for endpoint in ("tail", "head"):
                v = rec.get(endpoint)
                _expect(isinstance(v, int) and not isinstance(v, bool), f"{path}.{endpoint}", "must be an integer")
                _expect(v in ids, f"{path}.{endpoint}", f"references missing node {v}")
            vol = rec.get("volume")
            _expect(
                isinstance(vol, (int, float)) and not isinstance(vol, bool) and vol >= 0,
                f"{path}.volume",
                "must be a nonnegative number",
            )
            key = (rec["tail"], rec["head"])
            _expect(key not in seen_flows, path, "duplicate observed-flow arc")
            seen_flows.add(key)
            clean_flows.append({"tail": rec["tail"], "head": rec["head"], "volume": float(vol)})
        observed = tuple(clean_flows)

    return NetworkDocument(
        nodes=tuple(clean_nodes), arcs=tuple(clean_arcs), observed_flows=observed
    )


def save_document(doc: NetworkDocument) -> str:
    """Serialize a document to stable, LF-terminated JSON."""
    payload = {
        "schemaVersion": doc.schema_version,
        "nodes": [dict(node) for node in doc.nodes],
        "arcs": [dict(arc) for arc in doc.arcs],
    }
    if doc.observed_flows is not None:
        payload["observedFlows"] = [dict(rec) for rec in doc.observed_flows]
    return json.dumps(payload, indent=2) + "\n"


def document_from_network(
    net: DirectedNetwork, observed: Optional[np.ndarray] = None
) -> NetworkDocument:
    nodes = tuple({"id": i, "label": net.labels[i]} for i in range(net.n))
    arcs = tuple(
        {"tail": a.tail, "head": a.head, "capacity": a.capacity} for a in net.arcs
    )
    flows = None
    if observed is not None:
        flows = tuple(
            {"tail": int(i), "head": int(j), "volume": float(observed[i, j])}
            for i, j in np.argwhere(observed > 0)
        )
    return NetworkDocument(nodes=nodes, arcs=arcs, observed_flows=flows)


def export_matrix_csv(m: np.ndarray, labels: Optional[Sequence[str]] = None) -> str:
    """Square matrix as CSV: a corner+labels header, then one labeled row per node."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if labels is None:
        labels = [str(i + 1) for i in range(n)]
    lines = ["node," + ",".join(labels)]
    for i in range(n):
        lines.append(labels[i] + "," + ",".join(fmt12(v) for v in m[i]))
    return "\n".join(lines) + "\n"


def import_matrix_csv(text: str) -> tuple[np.ndarray, list[str]]:
    """Inverse of export_matrix_csv; returns the matrix and its labels."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError(1, "empty CSV")
    labels = lines[0].split(",")[1:]
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        try:
            rows.append([float(c) for c in cells[1:]])
        except ValueError:
            raise ParseError(lineno, "non-numeric matrix cell")
    matrix = np.array(rows)
    if matrix.shape != (len(labels), len(labels)):
        raise ParseError(1, "CSV is not a labeled square matrix")
    return matrix, labels
