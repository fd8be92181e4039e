"""JSON documents: networks in, solutions and reports out.

Network document::

    {"version": "1.0", "name": "...",
     "nodes": [{"id": "a", "slack": true, "potential": 100.0},
               {"id": "b", "slack": false, "injection": 2.0}],
     "edges": [{"id": "e1", "from": "a", "to": "b", "kind": "pipe", "alpha": 1.0}]}

A non-slack node without ``injection`` has zero injection.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import DocumentError, InvalidNetwork
from .network import EDGE_KINDS, Edge, Junction, Network, Solution

DOC_VERSION = "1.0"
PARAM_OF_KIND = {"pipe": "alpha", "linear": "r", "ideal": "gamma", "offset": "c"}


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"expected a number, got {value!r}", where)
    if not math.isfinite(value):
        raise DocumentError("number must be finite", where)
    return float(value)


def _string(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return str(value)
    if not isinstance(value, str) or not value:
        raise DocumentError(f"expected a non-empty string, got {value!r}", where)
    return value


def network_from_dict(doc: dict, name: str = "") -> Network:
    if not isinstance(doc, dict):
        raise DocumentError("top level must be an object", "$")
    for key in ("nodes", "edges"):
        if not isinstance(doc.get(key), list):
            raise DocumentError("missing or not a list", key)
    junctions = []
    ids = set()
    for i, raw in enumerate(doc["nodes"]):
        where = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise DocumentError("expected an object", where)
        jid = _string(raw.get("id"), f"{where}.id")
        where = f"nodes[{i}] (id {jid!r})"
        if jid in ids:
            raise DocumentError("duplicate node id", where)
        ids.add(jid)
        is_slack = raw.get("slack", False)
        if not isinstance(is_slack, bool):
            raise DocumentError("expected true/false", f"{where}.slack")
        if is_slack:
            if raw.get("potential") is None:
                raise DocumentError("slack node needs a potential", f"{where}.potential")
            if raw.get("injection") is not None:
                raise DocumentError("slack node cannot have an injection", f"{where}.injection")
            junctions.append(Junction(jid, slack=True, potential=_number(raw["potential"], f"{where}.potential")))
        else:
            if raw.get("potential") is not None:
                raise DocumentError("only slack nodes carry a potential", f"{where}.potential")
            inj = raw.get("injection")
            junctions.append(Junction(jid, injection=0.0 if inj is None else _number(inj, f"{where}.injection")))
    edges = []
    eids = set()
    for i, raw in enumerate(doc["edges"]):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise DocumentError("expected an object", where)
        eid = _string(raw.get("id"), f"{where}.id")
        where = f"edges[{i}] (id {eid!r})"
        if eid in eids:
            raise DocumentError("duplicate edge id", where)
        eids.add(eid)
        ends = {}
        for key in ("from", "to"):
            ends[key] = _string(raw.get(key), f"{where}.{key}")
            if ends[key] not in ids:
                raise DocumentError(f"unknown node {ends[key]!r}", f"{where}.{key}")
        kind = raw.get("kind", "pipe")
        if kind not in EDGE_KINDS:
            raise DocumentError(f"kind must be one of {', '.join(EDGE_KINDS)}", f"{where}.kind")
        param = PARAM_OF_KIND[kind]
        for other in PARAM_OF_KIND.values():
            if other != param and raw.get(other) is not None:
                raise DocumentError(f"not a {kind} parameter", f"{where}.{other}")
        if raw.get(param) is None:
            raise DocumentError(f"{kind} edge needs {param}", f"{where}.{param}")
        value = _number(raw[param], f"{where}.{param}")
        try:
            edges.append(Edge(eid, ends["from"], ends["to"], kind, **{param: value}))
        except InvalidNetwork as exc:
            raise DocumentError(str(exc), where) from exc
    try:
        return Network(tuple(junctions), tuple(edges), name=doc.get("name") or name)
    except InvalidNetwork as exc:
        raise DocumentError(str(exc), "$") from exc


def network_to_dict(net: Network) -> dict:
    nodes = []
    for j in net.junctions:
        if j.slack:
            nodes.append({"id": j.id, "slack": True, "potential": j.potential})
        else:
            nodes.append({"id": j.id, "slack": False, "injection": j.injection})
    edges = []
    for e in net.edges:
        param = PARAM_OF_KIND[e.kind]
        edges.append({"id": e.id, "from": e.src, "to": e.dst, "kind": e.kind, param: getattr(e, param)})
    doc = {"version": DOC_VERSION}
    if net.name:
        doc["name"] = net.name
    doc["nodes"] = nodes
    doc["edges"] = edges
    return doc


def parse_network(text: str, name: str = "") -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return network_from_dict(doc, name)


def load_network(path) -> Network:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DocumentError(str(exc), str(path)) from exc
    return parse_network(text, name=path.stem)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def save_network(net: Network, path) -> None:
    Path(path).write_text(dump_json(network_to_dict(net)))


def solution_to_dict(sol: Solution, method: str = "", report: dict | None = None) -> dict:
    doc = {
        "version": DOC_VERSION,
        "method": method,
        "potentials": {k: sol.potentials[k] for k in sorted(sol.potentials)},
        "flows": {k: sol.flows[k] for k in sorted(sol.flows)},
        "residual_inf_norm": sol.residual_inf_norm,
        "iterations_total": sol.iterations_total,
    }
    if report is not None:
        doc["report"] = report
    return doc


def solution_from_dict(doc: dict) -> Solution:
    try:
        return Solution(
            {k: float(v) for k, v in doc["potentials"].items()},
            {k: float(v) for k, v in doc["flows"].items()},
            float(doc.get("residual_inf_norm", math.nan)),
            int(doc.get("iterations_total", 0)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DocumentError(f"malformed solution document: {exc}") from exc
