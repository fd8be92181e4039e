"""Converters from upstream dataset formats to network documents.

``read_gaslib`` understands the GasLib ``.net`` XML layout (``nodes`` with
``source``/``sink``/``innode`` children, ``connections`` with ``pipe``,
``shortPipe``, ``resistor``, ``valve``, ``controlValve`` and
``compressorStation`` children). Only topology is needed for block
statistics, so the physics is a coarse stand-in:

* pipes get ``alpha = L / D**5`` scaled by a Nikuradse friction factor,
  relative units, normalized so the median pipe has ``alpha = 1``;
* resistors become pipes with ``alpha = dragFactor`` (1 when absent);
* short pipes, valves, control valves and compressor stations become ideal
  edges with ``gamma = 1`` (open, unit ratio).

The first source is the slack. Without a scenario file every other node has
zero injection; with a ``.scn`` nomination file exits withdraw and entries
supply their nominated flow (entry flows are negated to match the
demand-positive convention).

``read_edge_list`` covers plain ``from,to`` CSV exports (e.g. of synthetic
pipeline datasets).
"""

from __future__ import annotations

import csv
import math
import statistics
import xml.etree.ElementTree as ET
from pathlib import Path

from .errors import DocumentError
from .network import Edge, Junction, Network

IDEAL_TAGS = {"shortPipe", "valve", "controlValve", "compressorStation"}
NODE_TAGS = {"source", "sink", "innode"}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _child_value(elem, name, default=None):
    for child in elem:
        if _local(child.tag) == name and child.get("value") is not None:
            try:
                return float(child.get("value"))
            except ValueError:
                return default
    return default


def _friction(diameter_m, roughness_m):
    if roughness_m and roughness_m > 0 and diameter_m > roughness_m:
        return (2.0 * math.log10(3.7 * diameter_m / roughness_m)) ** -2
    return 0.01


def read_scenario(path) -> dict[str, float]:
    """Nominated flows per node id, demand-positive (exits +, entries -)."""
    tree = ET.parse(path)
    flows = {}
    for elem in tree.iter():
        if _local(elem.tag) != "node" or elem.get("id") is None:
            continue
        bounds = {}
        for child in elem:
            if _local(child.tag) == "flow" and child.get("value") is not None:
                bounds[child.get("bound", "both")] = float(child.get("value"))
        if not bounds:
            continue
        if "both" in bounds:
            value = bounds["both"]
        else:
            value = 0.5 * (bounds.get("lower", 0.0) + bounds.get("upper", bounds.get("lower", 0.0)))
        sign = -1.0 if elem.get("type") == "entry" else 1.0
        flows[elem.get("id")] = sign * value
    return flows


def read_gaslib(path, scenario=None, name: str | None = None) -> Network:
    path = Path(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise DocumentError(str(exc), str(path)) from exc
    nodes = []
    conns = []
    for elem in root.iter():
        tag = _local(elem.tag)
        if tag in NODE_TAGS and elem.get("id"):
            nodes.append((tag, elem))
        elif (tag == "pipe" or tag == "resistor" or tag in IDEAL_TAGS) and elem.get("from"):
            conns.append((tag, elem))
    if not nodes:
        raise DocumentError("no source/sink/innode elements found", str(path))
    nominations = read_scenario(scenario) if scenario else {}
    slack_id = next((e.get("id") for t, e in nodes if t == "source"), nodes[0][1].get("id"))
    junctions = []
    for tag, elem in nodes:
        jid = elem.get("id")
        if jid == slack_id:
            pmax = _child_value(elem, "pressureMax", 1.0)
            junctions.append(Junction(jid, slack=True, potential=pmax * pmax))
        else:
            junctions.append(Junction(jid, injection=nominations.get(jid, 0.0)))
    raw_alpha = {}
    for tag, elem in conns:
        if tag == "pipe":
            length = _child_value(elem, "length", 1.0)
            diameter = _child_value(elem, "diameter", 1000.0) / 1000.0
            rough = _child_value(elem, "roughness", 0.0) / 1000.0
            raw_alpha[elem.get("id")] = _friction(diameter, rough) * length / diameter**5
    norm = statistics.median(raw_alpha.values()) if raw_alpha else 1.0
    edges = []
    for tag, elem in conns:
        eid, src, dst = elem.get("id"), elem.get("from"), elem.get("to")
        if tag == "pipe":
            edges.append(Edge(eid, src, dst, "pipe", alpha=raw_alpha[eid] / norm))
        elif tag == "resistor":
            edges.append(Edge(eid, src, dst, "pipe", alpha=_child_value(elem, "dragFactor", 1.0) or 1.0))
        else:
            edges.append(Edge(eid, src, dst, "ideal", gamma=1.0))
    return Network(tuple(junctions), tuple(edges), name=name or path.stem)


def read_edge_list(path, slack: str | None = None, name: str | None = None,
                   from_col: str = "from", to_col: str = "to", id_col: str = "id") -> Network:
    """Topology from a CSV with ``from``/``to`` columns; every edge a unit pipe."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or from_col not in reader.fieldnames or to_col not in reader.fieldnames:
            raise DocumentError(f"CSV needs columns {from_col!r} and {to_col!r}", str(path))
        rows = list(reader)
    order: dict[str, None] = {}
    edges = []
    for k, row in enumerate(rows):
        src, dst = row[from_col].strip(), row[to_col].strip()
        if src == dst:
            continue
        order.setdefault(src)
        order.setdefault(dst)
        eid = (row.get(id_col) or "").strip() or f"e{k}"
        edges.append(Edge(eid, src, dst, "pipe", alpha=1.0))
    slack = slack or next(iter(order))
    junctions = [
        Junction(v, slack=True, potential=1.0) if v == slack else Junction(v, injection=0.0) for v in order
    ]
    return Network(tuple(junctions), tuple(edges), name=name or path.stem)
