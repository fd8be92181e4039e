import math

import pytest

from blockflow import DocumentError, compute_blocks, validate_network
from blockflow.importers import read_edge_list, read_gaslib, read_scenario

NET_XML = """<?xml version="1.0" encoding="UTF-8"?>
<network xmlns="http://gaslib.zib.de/Gas" xmlns:framework="http://gaslib.zib.de/Framework">
  <framework:nodes>
    <source id="S1"><pressureMax unit="bar" value="70"/></source>
    <innode id="I1"/>
    <innode id="I2"/>
    <sink id="T1"/>
    <sink id="T2"/>
  </framework:nodes>
  <framework:connections>
    <pipe id="p1" from="S1" to="I1">
      <length unit="km" value="10"/><diameter unit="mm" value="500"/><roughness unit="mm" value="0.012"/>
    </pipe>
    <pipe id="p2" from="I1" to="I2">
      <length unit="km" value="20"/><diameter unit="mm" value="500"/><roughness unit="mm" value="0.012"/>
    </pipe>
    <pipe id="p3" from="I2" to="S1">
      <length unit="km" value="40"/><diameter unit="mm" value="500"/><roughness unit="mm" value="0.012"/>
    </pipe>
    <compressorStation id="cs1" from="I2" to="T1"/>
    <resistor id="r1" from="T1" to="T2"><dragFactor value="3.5"/></resistor>
  </framework:connections>
</network>
"""

SCN_XML = """<?xml version="1.0" encoding="UTF-8"?>
<boundaryValue xmlns="http://gaslib.zib.de/Gas">
  <scenario id="s1">
    <node type="entry" id="S1"><flow bound="lower" value="10"/><flow bound="upper" value="10"/></node>
    <node type="exit" id="T1"><flow bound="both" value="4"/></node>
    <node type="exit" id="T2"><flow bound="lower" value="5"/><flow bound="upper" value="7"/></node>
  </scenario>
</boundaryValue>
"""


@pytest.fixture
def gaslib_files(tmp_path):
    net, scn = tmp_path / "mini.net", tmp_path / "mini.scn"
    net.write_text(NET_XML)
    scn.write_text(SCN_XML)
    return net, scn


def test_gaslib_topology(gaslib_files):
    net = read_gaslib(gaslib_files[0])
    assert net.name == "mini"
    assert [j.id for j in net.junctions] == ["S1", "I1", "I2", "T1", "T2"]
    assert list(net.slack_ids) == ["S1"]
    assert net.junction_by_id["S1"].potential == 4900.0
    kinds = {e.id: e.kind for e in net.edges}
    assert kinds == {"p1": "pipe", "p2": "pipe", "p3": "pipe", "cs1": "ideal", "r1": "pipe"}
    assert validate_network(net).ok
    sizes = sorted(b.size for b in compute_blocks(net).blocks)
    assert sizes == [2, 2, 3]


def test_gaslib_pipe_coefficients(gaslib_files):
    net = read_gaslib(gaslib_files[0])
    # same diameter and roughness: alpha scales with length, median (20 km) is 1
    assert net.edge_by_id["p1"].alpha == pytest.approx(0.5)
    assert net.edge_by_id["p2"].alpha == pytest.approx(1.0)
    assert net.edge_by_id["p3"].alpha == pytest.approx(2.0)
    assert net.edge_by_id["r1"].alpha == 3.5
    assert net.edge_by_id["cs1"].gamma == 1.0


def test_scenario_signs(gaslib_files):
    flows = read_scenario(gaslib_files[1])
    assert flows == {"S1": -10.0, "T1": 4.0, "T2": 6.0}
    net = read_gaslib(*gaslib_files)
    assert net.junction_by_id["T2"].injection == 6.0
    assert net.junction_by_id["S1"].slack  # the slack absorbs the entry


def test_gaslib_bad_xml(tmp_path):
    path = tmp_path / "bad.net"
    path.write_text("<network><unclosed></network>")
    with pytest.raises(DocumentError):
        read_gaslib(path)
    path.write_text("<network/>")
    with pytest.raises(DocumentError):
        read_gaslib(path)


def test_edge_list(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("id,from,to\nx,A,B\n,B,C\ny,C,A\nz,C,C\nw,C,D\n")
    net = read_edge_list(path)
    assert [j.id for j in net.junctions] == ["A", "B", "C", "D"]
    assert net.junction_by_id["A"].slack
    assert [e.id for e in net.edges] == ["x", "e1", "y", "w"]  # self-loop dropped
    assert all(e.kind == "pipe" and e.alpha == 1.0 for e in net.edges)
    assert read_edge_list(path, slack="D").junction_by_id["D"].slack


def test_edge_list_needs_columns(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(DocumentError):
        read_edge_list(path)


def test_convert_script_reads_zip_archives(gaslib_files, tmp_path, capsys):
    import runpy
    import zipfile
    from pathlib import Path

    from blockflow.io import load_network

    archive = tmp_path / "mini.zip"
    with zipfile.ZipFile(archive, "w") as zf:
        zf.write(gaslib_files[0], "mini/mini.net")
        zf.write(gaslib_files[1], "mini/mini.scn")
    script = runpy.run_path(str(Path(__file__).resolve().parents[1] / "scripts" / "convert_gaslib.py"))
    out = tmp_path / "fixtures" / "mini.json"
    assert script["main"]([str(archive), "--scenario", "mini.scn", "-o", str(out)]) == 0
    assert load_network(out) == read_gaslib(*gaslib_files)
