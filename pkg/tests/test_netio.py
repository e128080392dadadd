import pytest

from paranet.netbuild import Network
from paranet.netio import NetworkFormatError, read_edgelist, read_graphml, write_edgelist, write_graphml

NET = Network(4, ((0, 1), (1, 3)), target_density=0.5, edge_weights=(0.25, 1 / 3),
              node_labels=(10, 11, 12, 13))


def test_graphml_roundtrip(tmp_path):
    path = tmp_path / "n.graphml"
    write_graphml(NET, path, doc_id="luke", kind="SW", sample_index=3)
    net, attrs = read_graphml(path)
    assert net.edges == NET.edges and net.node_count == 4
    assert net.edge_weights == NET.edge_weights
    assert net.node_labels == NET.node_labels
    assert attrs == {"doc_id": "luke", "kind": "SW", "sample_index": 3, "density": 0.5}


def test_graphml_deterministic(tmp_path):
    write_graphml(NET, tmp_path / "a.graphml")
    write_graphml(NET, tmp_path / "b.graphml")
    assert (tmp_path / "a.graphml").read_bytes() == (tmp_path / "b.graphml").read_bytes()


@pytest.mark.parametrize("content", ["not xml", "<graphml><graph edgedefault='directed'>"
                                     "<node id='0'/><node id='1'/><edge source='0' target='1'/>"
                                     "</graph></graphml>"])
def test_graphml_malformed_names_file(tmp_path, content):
    path = tmp_path / "bad.graphml"
    path.write_text(content)
    with pytest.raises(NetworkFormatError, match="bad.graphml"):
        read_graphml(path)


def test_edgelist_roundtrip(tmp_path):
    path = tmp_path / "n.edges"
    write_edgelist(NET, path)
    assert path.read_text().splitlines()[0] == "0 1 0.25"
    net = read_edgelist(path, node_count=4)
    assert net.edges == NET.edges and net.edge_weights == NET.edge_weights
    plain = Network(3, ((0, 2),))
    write_edgelist(plain, path)
    assert path.read_text() == "0 2\n"
    assert read_edgelist(path).node_count == 3


@pytest.mark.parametrize("content", ["0\n", "0 1 0.5\n1 2\n", "0 x\n", "1 1\n", "0 1\n1 0\n"])
def test_edgelist_malformed(tmp_path, content):
    path = tmp_path / "bad.edges"
    path.write_text(content)
    with pytest.raises(NetworkFormatError):
        read_edgelist(path)
