"""Convert upstream dataset files into blockflow network documents.

GasLib instances (``.net`` XML, optionally inside the distributed ``.zip``
archive, plus an optional ``.scn`` nomination)::

    python scripts/convert_gaslib.py GasLib-582.zip -o fixtures/gaslib-582.json
    python scripts/convert_gaslib.py GasLib-40.net --scenario GasLib-40.scn -o fixtures/gaslib-40.json

Plain edge lists (``from,to`` CSV, e.g. a synthetic Texas pipeline export)::

    python scripts/convert_gaslib.py texas.csv --edge-list --slack N1 -o fixtures/texas-2451.json

After conversion ``blockflow stats`` prints the block statistics; the
acceptance suite looks for ``gaslib-40``, ``gaslib-134``, ``gaslib-582`` and
``texas-2451`` documents in ``fixtures/`` (or ``$BLOCKFLOW_FIXTURES``).
"""

import argparse
import sys
import tempfile
import zipfile
from pathlib import Path

from blockflow import validate_network
from blockflow.importers import read_edge_list, read_gaslib
from blockflow.io import save_network


def _from_zip(archive: Path, scenario: str | None, tmp: Path):
    with zipfile.ZipFile(archive) as zf:
        names = zf.namelist()
        nets = [n for n in names if n.endswith(".net")]
        if len(nets) != 1:
            raise SystemExit(f"{archive}: expected exactly one .net member, found {nets}")
        zf.extract(nets[0], tmp)
        scn = None
        if scenario:
            matches = [n for n in names if n.endswith(scenario)]
            if not matches:
                raise SystemExit(f"{archive}: no member ending in {scenario!r}")
            zf.extract(matches[0], tmp)
            scn = tmp / matches[0]
    return tmp / nets[0], scn


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", type=Path, help=".net, .zip or .csv file")
    parser.add_argument("-o", "--output", type=Path, required=True)
    parser.add_argument("--scenario", help=".scn path (or member name suffix inside a .zip)")
    parser.add_argument("--name", help="network name (default: output file stem)")
    parser.add_argument("--edge-list", action="store_true", help="input is a from,to CSV")
    parser.add_argument("--slack", help="slack junction for edge lists (default: first junction)")
    args = parser.parse_args(argv)

    name = args.name or args.output.stem
    if args.edge_list:
        net = read_edge_list(args.input, slack=args.slack, name=name)
    elif args.input.suffix == ".zip":
        with tempfile.TemporaryDirectory() as tmp:
            net_path, scn = _from_zip(args.input, args.scenario, Path(tmp))
            net = read_gaslib(net_path, scn, name=name)
    else:
        net = read_gaslib(args.input, args.scenario, name=name)

    report = validate_network(net)
    for code, message in report.violations + report.warnings:
        print(f"{code}: {message}", file=sys.stderr)
    args.output.parent.mkdir(parents=True, exist_ok=True)
    save_network(net, args.output)
    print(f"{args.output}: {net.n_junctions} junctions, {net.n_edges} edges")
    return 0 if report.ok else 2


if __name__ == "__main__":
    sys.exit(main())
