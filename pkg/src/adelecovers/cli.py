"""Command-line entry point.

Exit status: 0 on success, 1 when a mathematical precondition fails (for
example a ramified prime), 2 on usage errors. JSON output has sorted keys and
carries exact numbers only; logarithms appear only in DOT labels.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .errors import DomainError
from .extensions import parse_extension
from .frobenius_covers import cover_fiber_over_Cp, density_scan, ramification_set
from .ktheory import load_instance, solve
from .profinite import linking_data
from .schwartz import ProductBSFunction, is_factorable_at, sheaf_glue_check
from .semilocal import DEFAULT_PRECISION, PlaceSet, parse_adele, reduce_orbit_Cp, strata_json


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _read_config(path: str | None) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    if not path:
        return {}
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line without '=': {line!r}")
        out[key.strip()] = value.strip().strip('"')
    return out


def _precision(args, config) -> int:
    if args.precision is not None:
        return args.precision
    return int(config.get("precision", DEFAULT_PRECISION))


def _ext(text):
    try:
        return parse_extension(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"--ext: {exc}") from None


def _places(text: str) -> PlaceSet:
    try:
        return PlaceSet([v for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"--places: {exc}") from None


def cover_dot(report, ext) -> str:
    """One circle per component, labelled with its length f*log p."""
    p, f = report.prime, report.residue_degree
    length = f"{f * math.log(p):.6g}"
    lines = [
        "digraph mapping_torus {",
        f'  label="cover of C_{p}: {report.component_count} component(s), monodromy {report.monodromy.rep}";',
        "  node [shape=circle];",
        f'  base [label="C_{p}\\nlen = log {p} = {math.log(p):.6g}", shape=doublecircle];',
    ]
    for i, coset in enumerate(report.component_labels):
        members = ",".join(map(str, coset))
        lines.append(f'  c{i} [label="{{{members}}}\\nlen = {f}·log {p} = {length}"];')
        lines.append(f"  c{i} -> base;")
    lines.append("}")
    return "\n".join(lines)


def cmd_cover(args, config) -> str:
    ext = _ext(args.ext)
    report = cover_fiber_over_Cp(ext, args.prime)
    if args.dot or args.format == "dot":
        return cover_dot(report, ext)
    return _dump({"ext": ext.to_json(), **report.to_json()})


def cmd_ramify(args, config) -> str:
    ext = _ext(args.ext)
    return _dump({"ext": ext.to_json(), "conductor": ext.conductor, **ramification_set(ext).to_json()})


def cmd_density(args, config) -> str:
    ext = _ext(args.ext)
    return _dump({"ext": ext.to_json(), **density_scan(ext, args.bound).to_json()})


def cmd_linking(args, config) -> str:
    return _dump(linking_data(args.p, args.q, _precision(args, config)).to_json())


def cmd_linking_table(args, config) -> str:
    try:
        primes = [int(x) for x in args.primes.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--primes: {exc}") from None
    k = _precision(args, config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p\\q", *primes])
    for p in primes:
        row = [p]
        for q in primes:
            if p == q:
                row.append("")
            else:
                d = linking_data(p, q, k)
                row.append(f"{d.residue}:{d.order}")
        w.writerow(row)
    return buf.getvalue().rstrip("\n")


def cmd_strata(args, config) -> str:
    S = _places(args.places)
    a = parse_adele(S, args.adele, _precision(args, config))
    return _dump(strata_json(a))


def cmd_reduce(args, config) -> str:
    S = _places(args.places)
    a = parse_adele(S, args.adele, _precision(args, config))
    return _dump(reduce_orbit_Cp(a, args.orbit_prime).to_json())


def cmd_schwartz_check(args, config) -> str:
    text = args.table
    if not text.lstrip().startswith("{"):
        text = Path(text).read_text()
    f = ProductBSFunction.from_json(text)
    out = {"factorable": {str(v): is_factorable_at(f, v) for v in f.primes}}
    if args.glue:
        sets = [[int(x) for x in part.split(",") if x.strip()] for part in args.glue.split(";")]
        g = sheaf_glue_check(f, sets)
        out["glue"] = {"member": g.member, "premise": g.premise, "consistent": g.consistent}
    return _dump(out)


def cmd_ktheory(args, config) -> str:
    try:
        hexagon = load_instance(args.instance)
    except OSError as exc:
        raise UsageError(f"--instance: {exc}") from None
    return _dump(solve(hexagon).to_json())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adelecovers", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file with defaults (e.g. precision = 8)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cover", help="fiber of the cover over the periodic orbit C_p")
    p.add_argument("--ext", required=True, help='extension: JSON, "cyclotomic:m" or "quadratic:d"')
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--dot", action="store_true", help="same as --format dot")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("ramify", help="ramified places and conductor")
    p.add_argument("--ext", required=True)
    p.set_defaults(func=cmd_ramify)

    p = sub.add_parser("density", help="histogram of Frobenius classes for p <= bound")
    p.add_argument("--ext", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("linking", help="p in Z_q^* at precision K")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_linking)

    p = sub.add_parser("linking-table", help="CSV of residue:order for all ordered pairs")
    p.add_argument("--primes", required=True)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_linking_table)

    p = sub.add_parser("strata", help="zero set Z(x), nu(x) and orbit label of an adele")
    p.add_argument("--places", required=True)
    p.add_argument("--adele", required=True, help='e.g. {"2": "12", "3": "0", "inf": "-5/2"}')
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_strata)

    p = sub.add_parser("reduce", help="mapping-torus normal form of an adele over C_p")
    p.add_argument("--places", required=True)
    p.add_argument("--orbit-prime", type=int, required=True)
    p.add_argument("--adele", required=True)
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("schwartz-check", help="factorisation test for a Schwartz table")
    p.add_argument("--table", required=True, help="JSON table or path to one")
    p.add_argument("--glue", help='place sets S_j separated by ";", e.g. "2;3"')
    p.set_defaults(func=cmd_schwartz_check)

    p = sub.add_parser("ktheory", help="solve a six-term exact hexagon")
    p.add_argument("--instance", required=True, help='"paper-pq", inline JSON or a JSON file')
    p.set_defaults(func=cmd_ktheory)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _read_config(args.config)
        out = args.func(args, config)
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except (UsageError, ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"usage error: {exc}", file=stderr)
        sub = parser._subparsers._group_actions[0].choices.get(args.command)
        if sub is not None:
            print(sub.format_usage().rstrip(), file=stderr)
        return 2
    print(out, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
