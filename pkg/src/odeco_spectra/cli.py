"""Command-line interface.

Exit status is 0 on success, 1 on invalid input and 2 on numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

from . import __version__
from .complex_geometry import (base_locus_dimension, build_incidence_complex,
                               complex_to_dict, export_complex,
                               formats_with_dimension, generic_count)
from .errors import NumericFailure, ValidationError
from .fixtures import load_fixture
from .numeric_lab.experiments import (perturbation_experiment, residual_report,
                                      rows_to_csv, rows_to_json)
from .numeric_lab.power_method import power_method_decompose
from .numeric_lab.solver import SearchStrategy
from .serialization import (component_to_dict, odeco_to_dict,
                            parse_tensor_file, spec_to_dict, tuple_to_dict)
from .spectra_enum import (enumerate_type1, enumerate_type2, realize_type1,
                           sample_base_point, type1_counts, type2_counts)
from .tensor_core import OdecoTensor, TensorShape

FORMATS = ("json", "csv", "dot", "text")


def _table(header, rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*r).rstrip() for r in [header] + rows) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _require_shape(args) -> TensorShape:
    if args.shape is None:
        raise ValidationError(f"{args.command} needs --shape")
    return TensorShape.parse(args.shape)


def _load_odeco(args) -> OdecoTensor:
    if args.shape and (args.input or args.fixture):
        raise ValidationError("--shape conflicts with --input/--fixture")
    if args.input and args.fixture:
        raise ValidationError("--input and --fixture are mutually exclusive")
    if args.fixture:
        return load_fixture(args.fixture)[0]
    if not args.input:
        raise ValidationError(f"{args.command} needs --input or --fixture")
    tensor = parse_tensor_file(args.input)
    if not isinstance(tensor, OdecoTensor):
        raise ValidationError(f"{args.input} holds a dense tensor; {args.command} needs an odeco file")
    return tensor


def _unsupported(args, allowed):
    if args.format not in allowed:
        raise ValidationError(f"{args.command} supports --format {'|'.join(allowed)}, got {args.format}")


def cmd_count(args) -> str:
    _unsupported(args, ("json", "text"))
    shape = _require_shape(args)
    t1 = type1_counts(shape.n, shape.d)
    t2 = type2_counts(shape)
    out = {
        "type1": t1.total,
        "type1_real": t1.real_total,
        "type2": t2.closed_form,
        "dim": t2.dimension,
        "generic": generic_count(shape.dims),
    }
    if t2.dimension == 1:
        out["vertices"] = build_incidence_complex(shape).vertex_count
    if args.format == "text":
        return _table(["quantity", "value"], out.items())
    # counts are exact integers; JSON integers keep full precision
    return json.dumps(out) + "\n"


def cmd_enumerate(args) -> str:
    _unsupported(args, ("json", "text"))
    odeco = _load_odeco(args) if (args.input or args.fixture) else None
    shape = odeco.shape if odeco is not None else _require_shape(args)
    type1 = []
    for spec in enumerate_type1(shape):
        if args.real_only and not spec.is_real():
            continue
        rec = spec_to_dict(spec)
        if odeco is not None:
            rec["tuple"] = tuple_to_dict(realize_type1(spec, odeco))
        type1.append(rec)
    type2 = [component_to_dict(c) for c in enumerate_type2(shape)]
    if args.format == "text":
        lines = [f"type I ({len(type1)})"]
        lines += [f"  support={r['support']} eta={r['eta']} signs={r['signs']}" for r in type1]
        lines.append(f"type II ({len(type2)})")
        lines += [f"  rows={r['rows']} dim={r['dimension']}" for r in type2]
        return "\n".join(lines) + "\n"
    return json.dumps({"shape": list(shape.dims), "type1": type1, "type2": type2}, indent=2) + "\n"


def cmd_complex(args) -> str:
    _unsupported(args, ("json", "dot", "text"))
    cx = build_incidence_complex(_require_shape(args))
    if args.format == "text":
        d = complex_to_dict(cx)
        out = _table(["facet", "rows", "dim"], [(f["id"], f["rows"], f["dimension"]) for f in d["facets"]])
        if d["vertices"]:
            out += "\n" + _table(["vertex", "point", "facets"],
                                 [(v["id"], v["point"], v["facets"]) for v in d["vertices"]])
        return out
    return export_complex(cx, args.format)


def cmd_formats(args) -> str:
    _unsupported(args, ("json", "csv", "text"))
    if args.k is None:
        raise ValidationError("formats needs --k")
    found = formats_with_dimension(args.k)
    if args.format == "json":
        return json.dumps({"k": args.k, "formats": [list(f) for f in found]}) + "\n"
    rows = [("x".join(map(str, f)), base_locus_dimension(f), generic_count(f)) for f in found]
    if args.format == "csv":
        return _csv(["format", "dimension", "generic"], rows)
    return _table(["format", "dimension", "generic"], rows)


def cmd_verify(args) -> str:
    _unsupported(args, ("json", "csv", "text"))
    odeco = _load_odeco(args)
    tol = args.tol if args.tol is not None else 1e-8
    tuples, labels = [], []
    for spec in enumerate_type1(odeco.shape):
        if args.real_only and not spec.is_real():
            continue
        tuples.append(realize_type1(spec, odeco))
        labels.append("type1")
    for comp in enumerate_type2(odeco.shape):
        for s in range(args.samples):
            tuples.append(sample_base_point(comp, odeco, seed=args.seed * 1000 + s))
            labels.append("type2")
    report = residual_report(odeco, tuples, tol)
    rows = [(r.index, lab, r.kind, f"{r.residual:.3e}", f"{r.contraction:.6e}")
            for r, lab in zip(report, labels)]
    header = ["index", "source", "kind", "residual", "contraction"]
    expected = {"type1": "fixed", "type2": "base"}
    failures = sum(1 for r, lab in zip(report, labels) if r.kind != expected[lab])
    if args.format == "json":
        text = json.dumps({"tuples": [dict(zip(header, row)) for row in rows],
                           "failures": failures}, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv(header, rows)
    else:
        text = _table(header, rows) + f"\n{failures} misclassified of {len(rows)}\n"
    if failures:
        return text, 2, f"{failures} of {len(rows)} tuples failed classification"
    return text


def cmd_perturb(args) -> str:
    _unsupported(args, ("csv", "json"))
    if args.fixture and args.input:
        raise ValidationError("--input and --fixture are mutually exclusive")
    if args.fixture:
        S, T = load_fixture(args.fixture)
    else:
        if not (args.input and args.direction):
            raise ValidationError("perturb needs --fixture, or --input S.json with --direction T.json")
        S = parse_tensor_file(args.input)
        T = parse_tensor_file(args.direction)
        if not isinstance(S, OdecoTensor):
            raise ValidationError(f"{args.input} must hold an odeco tensor")
    epsilons = args.eps or [1e-6]
    strategy = SearchStrategy(random_starts=args.starts, real_only=args.real_only,
                              threads=args.threads,
                              tol=args.tol if args.tol is not None else 1e-12)
    rows = perturbation_experiment(S, T, epsilons, strategy, seed=args.seed)
    return rows_to_json(rows) + "\n" if args.format == "json" else rows_to_csv(rows)


def cmd_decompose(args) -> str:
    _unsupported(args, ("json",))
    if not args.input:
        raise ValidationError("decompose needs --input")
    tensor = parse_tensor_file(args.input)
    tol = args.tol if args.tol is not None else 1e-10
    odeco = power_method_decompose(tensor, tol=tol, seed=args.seed)
    return json.dumps(odeco_to_dict(odeco), indent=2) + "\n"


COMMANDS = {
    "count": (cmd_count, "count fixed points, base components and generic singular tuples", "json"),
    "enumerate": (cmd_enumerate, "list fixed-point specs and base components", "json"),
    "complex": (cmd_complex, "intersection complex of the base locus", "json"),
    "formats": (cmd_formats, "formats whose base components have dimension k", "json"),
    "verify": (cmd_verify, "residual report for the exact tuples of an odeco tensor", "text"),
    "perturb": (cmd_perturb, "perturbation sweep S + eps*T", "csv"),
    "decompose": (cmd_decompose, "odeco decomposition by the power method", "json"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odeco-spectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text, default_fmt) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--shape", help="format as comma-separated dimensions, e.g. 2,3,3")
        p.add_argument("--input", help="tensor JSON file")
        p.add_argument("--output", help="write to FILE instead of stdout")
        p.add_argument("--format", choices=FORMATS, default=default_fmt)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None, help="override the default tolerance")
        p.add_argument("--real-only", action="store_true")
        p.add_argument("--threads", type=int, default=None,
                       help="worker cap (falls back to ODECO_SPECTRA_THREADS)")
        if name == "formats":
            p.add_argument("--k", type=int)
        if name in ("enumerate", "verify", "perturb"):
            p.add_argument("--fixture", help="bundled example name (example22)")
        if name == "verify":
            p.add_argument("--samples", type=int, default=3, help="base samples per component")
        if name == "perturb":
            p.add_argument("--eps", type=float, action="append", help="repeatable")
            p.add_argument("--direction", help="dense perturbation tensor file")
            p.add_argument("--starts", type=int, default=500, help="random starts per epsilon")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    status, message = 0, None
    try:
        text = handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    if isinstance(text, tuple):
        text, status, message = text
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if message:
        print(f"numeric failure: {message}", file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
