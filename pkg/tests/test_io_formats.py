import json

import numpy as np
import pytest

from idealflow import DirectedNetwork, is_strongly_connected
from idealflow.errors import MetadataMismatch, ParseError, SchemaError, UnknownArc
from idealflow.io_formats import (
    document_from_network,
    export_matrix_csv,
    fmt12,
    import_matrix_csv,
    load_document,
    parse_tntp_flow,
    parse_tntp_net,
    save_document,
)

from conftest import DATA_DIR, DEMO5_FLOW, cycle_net

MINI_NET = """\
<NUMBER OF ZONES> 2
<NUMBER OF NODES> 2
<FIRST THRU NODE> 1
<NUMBER OF LINKS> 2
<END OF METADATA>
~ header comment
1 2 100.0 1 1 0.15 4 0 0 1 ;
2 1 50.0  1 1 0.15 4 0 0 1 ;
"""


class TestTntpNet:
    def test_sioux_falls_counts(self):
        net, tntp = parse_tntp_net((DATA_DIR / "siouxfalls_net.tntp").read_text())
        assert net.n == 24
        assert net.p == 76
        assert tntp.num_links == 76
        assert tntp.num_zones == 24
        assert is_strongly_connected(net)

    def test_capacity_column_feeds_network(self):
        net, tntp = parse_tntp_net(MINI_NET)
        caps = {(a.tail, a.head): a.capacity for a in net.arcs}
        assert caps == {(0, 1): 100.0, (1, 0): 50.0}
        assert tntp.links[0].free_flow_time == 1.0

    def test_count_mismatch(self):
        broken = MINI_NET.replace("<NUMBER OF LINKS> 2", "<NUMBER OF LINKS> 3")
        with pytest.raises(MetadataMismatch):
            parse_tntp_net(broken)

    def test_bad_capacity_reports_line(self):
        broken = MINI_NET.replace("1 2 100.0", "1 2 oops")
        with pytest.raises(ParseError) as err:
            parse_tntp_net(broken)
        assert err.value.line == 7

    def test_node_index_out_of_range(self):
        broken = MINI_NET.replace("2 1 50.0", "3 1 50.0")
        with pytest.raises(ParseError):
            parse_tntp_net(broken)

    def test_whitespace_and_semicolons_tolerated(self):
        messy = MINI_NET.replace("1 2 100.0 1 1", "\t 1\t2   100.0\t1  1")
        net, _ = parse_tntp_net(messy)
        assert net.p == 2


class TestTntpFlow:
    def test_sioux_falls_volume_count(self):
        net, _ = parse_tntp_net((DATA_DIR / "siouxfalls_net.tntp").read_text())
        volumes, records = parse_tntp_flow(
            (DATA_DIR / "siouxfalls_flow.tntp").read_text(), net=net, strict=True
        )
        assert len(records) == 76
        assert int((volumes > 0).sum()) == 76

    def test_duplicate_pair_rejected(self):
        text = "From To Volume Cost\n1 2 5.0 1.0\n1 2 6.0 1.0\n"
        with pytest.raises(ParseError):
            parse_tntp_flow(text)

    def test_empty_body(self):
        volumes, records = parse_tntp_flow("From To Volume Cost\n")
        assert records == ()
        assert volumes.shape == (0, 0)

    def test_strict_unknown_arc(self):
        net = cycle_net(3)
        text = "From To Volume Cost\n1 3 9.0 0.0\n"
        with pytest.raises(UnknownArc):
            parse_tntp_flow(text, net=net, strict=True)

    def test_lenient_mode_keeps_unknown_arc(self):
        net = cycle_net(3)
        text = "From To Volume Cost\n1 3 9.0 0.0\n"
        volumes, _ = parse_tntp_flow(text, net=net, strict=False)
        assert volumes[0, 2] == 9.0


class TestNetworkDocument:
    def test_round_trip_demo5(self, demo5):
        doc = document_from_network(demo5, observed=DEMO5_FLOW)
        reloaded = load_document(save_document(doc))
        assert reloaded.to_network() == demo5
        assert np.array_equal(reloaded.observed_matrix(), DEMO5_FLOW)

    def test_missing_node_reference(self):
        text = json.dumps(
            {
                "schemaVersion": 1,
                "nodes": [{"id": 0}, {"id": 1}],
                "arcs": [{"tail": 0, "head": 5}],
            }
        )
        with pytest.raises(SchemaError) as err:
            load_document(text)
        assert "arcs[0]" in err.value.path

    def test_five_node_cycle_document(self):
        doc = load_document(
            json.dumps(
                {
                    "schemaVersion": 1,
                    "nodes": [{"id": i, "label": str(i + 1)} for i in range(5)],
                    "arcs": [{"tail": i, "head": (i + 1) % 5} for i in range(5)],
                }
            )
        )
        net = doc.to_network()
        assert net.n == 5 and net.p == 5
        assert net == cycle_net(5)

    def test_bad_schema_version(self):
        with pytest.raises(SchemaError) as err:
            load_document(json.dumps({"schemaVersion": 2, "nodes": [{"id": 0}], "arcs": []}))
        assert err.value.path == "$.schemaVersion"

    def test_invalid_json(self):
        with pytest.raises(SchemaError):
            load_document("{not json")

    def test_duplicate_node_id(self):
        text = json.dumps(
            {"schemaVersion": 1, "nodes": [{"id": 0}, {"id": 0}], "arcs": []}
        )
        with pytest.raises(SchemaError):
            load_document(text)


class TestMatrixCsv:
    def test_demo5_line_count(self):
        text = export_matrix_csv(DEMO5_FLOW)
        assert len(text.splitlines()) == 6
        assert text.endswith("\n")

    def test_single_zero_cell(self):
        text = export_matrix_csv(np.zeros((1, 1)))
        assert len(text.splitlines()) == 2

    def test_round_trip_precision(self):
        rng = np.random.default_rng(83)
        m = rng.uniform(0, 1e6, size=(7, 7))
        back, labels = import_matrix_csv(export_matrix_csv(m))
        assert len(labels) == 7
        assert np.abs(back - m).max() <= 1e-10 * np.abs(m).max()

    def test_deterministic_output(self):
        m = np.array([[0.0, 1.0 / 3.0], [2.0, 0.0]])
        assert export_matrix_csv(m) == export_matrix_csv(m.copy())

    def test_fmt12_examples(self):
        assert fmt12(2.0) == "2"
        assert fmt12(1.0 / 3.0) == "0.333333333333"
        assert fmt12(2632809.30) == "2632809.3"
