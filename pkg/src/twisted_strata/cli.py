"""twisted-strata: command-line front end.

Exit status 0 on success, 1 on a domain error (invalid graph, ambient
mismatch, failed self-check, ...), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .calculus import (ForgetfulError, forgetful_comparison, product, pushforward_forgetful,
                       pushforward_gluing)
from .enumerate import EnumBounds, enumerate_graphs, enumerate_strata, write_json_lines
from .expr import ExprError, parse_class_expr
from .graph import (AmbientSpace, GraphError, TwistedGraph, ambient_from_json, canonical_form,
                    graph_from_json, graph_to_json, validate, vertex_ambient)
from .semigroup import SemigroupError, SemigroupSpec, value_from_json
from .strata import (AmbientMismatch, TautClass, class_from_json, class_to_json, decoration_from_json,
                     decoration_to_json, restrict_to_unvalued, substitute_kappa0)
from . import selfcheck


class UsageError(Exception):
    pass


DOMAIN_ERRORS = (GraphError, AmbientMismatch, SemigroupError, ForgetfulError, ExprError, ValueError,
                 RecursionError)


# -- input helpers --------------------------------------------------------------

def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON ({exc})") from exc


def _parse_legs(text: str) -> tuple:
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ":" not in part:
            raise UsageError(f"leg {part!r} must be written label:twist")
        label, twist = part.rsplit(":", 1)
        try:
            out.append((label, int(twist)))
        except ValueError as exc:
            raise UsageError(f"twist of leg {label!r} is not an integer: {twist!r}") from exc
    return tuple(out)


def _parse_value(text: str, spec: SemigroupSpec):
    t = text.strip().lower()
    if spec.kind == "A0":
        if t in ("one", "1"):
            return spec.one
        if t in ("zero", "0"):
            return spec.zero
        raise UsageError(f"--a must be one/zero for semigroup a0, got {text!r}")
    try:
        return value_from_json([int(x) for x in t.split(",")] if t not in ("zero", "0") else [0] * spec.rank, spec)
    except ValueError as exc:
        raise UsageError(f"--a must be a comma list of {spec.rank} integers, got {text!r}") from exc


def ambient_of(args) -> AmbientSpace:
    if getattr(args, "ambient", None):
        amb = ambient_from_json(_read_json(args.ambient))
        if args.semigroup != "a0" and str(amb.spec) != args.semigroup:
            raise AmbientMismatch(f"--semigroup {args.semigroup} differs from the ambient file's {amb.spec}")
        return amb
    if args.g is None:
        raise UsageError("the ambient space is required: give --ambient FILE or --g/--legs/--a")
    try:
        spec = SemigroupSpec.parse(args.semigroup)
    except SemigroupError as exc:
        raise UsageError(str(exc)) from exc
    return AmbientSpace(args.g, _parse_legs(args.legs or ""), _parse_value(args.a, spec))


def load_graph(path: str, amb: AmbientSpace) -> tuple[TwistedGraph, object]:
    obj = _read_json(path)
    if "graph" in obj:
        return graph_from_json(obj["graph"], amb.spec), decoration_from_json(obj.get("decoration"))
    return graph_from_json(obj, amb.spec), decoration_from_json(None)


def load_operand(text: str, amb: AmbientSpace, bindings: dict, kappa0: str) -> TautClass:
    """A class operand: a JSON file (class or graph) or a class expression."""
    if text.endswith(".json") or os.path.isfile(text):
        obj = _read_json(text)
        if "terms" in obj:
            return class_from_json(obj, amb)
        g, d = load_graph(text, amb)
        validate(g, amb).raise_if_bad()
        out = TautClass(amb)
        out.add_term(g, d, 1)
        return out
    return parse_class_expr(text, amb, bindings, kappa0)


def load_bindings(items, amb: AmbientSpace) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--bind expects NAME=FILE, got {item!r}")
        name, path = item.split("=", 1)
        obj = _read_json(path)
        if "terms" in obj:
            out[name] = class_from_json(obj, amb if "ambient" not in obj else None)
        else:
            g = graph_from_json(obj.get("graph", obj), amb.spec)
            d = decoration_from_json(obj.get("decoration"))
            # a bare graph may be used both as a skeleton and as the class [graph]
            out[name] = g if d.is_unit else (g, d)
    return out


# -- output ---------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def emit_class(x: TautClass, args) -> None:
    if args.kappa0 == "substitute":
        x = substitute_kappa0(x)
    if args.format == "text":
        print(str(x))
    else:
        print(_dump(class_to_json(x)))


# -- commands -----------------------------------------------------------------------

def cmd_validate(args) -> int:
    amb = ambient_of(args)
    g, _ = load_graph(args.graph, amb)
    report = validate(g, amb)
    if args.format == "text":
        print("ok" if report.ok else str(report))
    else:
        print(_dump({"ok": report.ok, "violations": [
            {"code": v.code, "message": v.message, "where": v.where} for v in report.violations]}))
    return 0 if report.ok else 1


def cmd_canon(args) -> int:
    amb = ambient_of(args)
    obj = _read_json(args.input)
    if "terms" in obj:
        emit_class(class_from_json(obj, amb), args)
        return 0
    g, d = load_graph(args.input, amb)
    validate(g, amb).raise_if_bad()
    cf = canonical_form(g, d)
    if args.format == "text":
        print(f"{cf.graph}  {cf.decoration}\nautomorphisms: {cf.automorphisms}\nkey: {cf.key.decode()}")
    else:
        print(_dump({"graph": graph_to_json(cf.graph), "decoration": decoration_to_json(cf.decoration),
                     "automorphisms": cf.automorphisms, "key": cf.key.decode()}))
    return 0


def cmd_product(args) -> int:
    amb = ambient_of(args)
    b = load_bindings(args.bind, amb)
    x = load_operand(args.x, amb, b, args.kappa0)
    y = load_operand(args.y, amb, b, args.kappa0)
    emit_class(product(x, y, jobs=args.jobs), args)
    return 0


def cmd_pushglue(args) -> int:
    amb = ambient_of(args)
    g, _ = load_graph(args.skeleton, amb)
    validate(g, amb).raise_if_bad()
    if len(args.classes) != g.n_vertices:
        raise UsageError(f"the skeleton has {g.n_vertices} vertices; give one class per vertex")
    classes = []
    for v, text in enumerate(args.classes):
        amb_v = vertex_ambient(g, v)
        b = load_bindings(args.bind, amb_v)
        classes.append(load_operand(text, amb_v, b, args.kappa0))
    emit_class(pushforward_gluing(g, amb, classes), args)
    return 0


def cmd_pushforget(args) -> int:
    amb = ambient_of(args)
    b = load_bindings(args.bind, amb)
    x = load_operand(args.x, amb, b, args.kappa0)
    emit_class(pushforward_forgetful(x, args.point, args.kappa0), args)
    return 0


def cmd_pull(args) -> int:
    amb = ambient_of(args)
    up = amb.with_marking(args.point, 1)
    kind, _, arg = args.generator.partition(":")
    if kind not in ("psi", "kappa") or not arg:
        raise UsageError("--generator must be psi:LABEL or kappa:J")
    if kind == "psi" and arg not in amb.labels:
        raise GraphError(f"no marking {arg!r} on {amb}")
    gen = (kind, arg if kind == "psi" else int(arg))
    emit_class(forgetful_comparison(up, gen, args.point), args)
    return 0


def cmd_restrict(args) -> int:
    amb = ambient_of(args)
    b = load_bindings(args.bind, amb)
    emit_class(restrict_to_unvalued(load_operand(args.x, amb, b, args.kappa0)), args)
    return 0


def cmd_enumerate(args) -> int:
    amb = ambient_of(args)
    bounds = EnumBounds(args.max_edges, args.twist_bound, args.max_degree if args.max_degree is not None
                        else (args.codim if args.codim is not None else 0))
    if args.codim is None:
        items = enumerate_graphs(amb, bounds)
    else:
        items = enumerate_strata(amb, bounds, args.codim)
    if args.format == "text":
        for it in items:
            print(it)
    else:
        write_json_lines(items, sys.stdout)
    return 0


def cmd_selfcheck(args) -> int:
    seed = selfcheck.seed_from_env()
    sizes = selfcheck.Sizes(20, 10, 5, 10, 10) if args.quick else selfcheck.Sizes()
    only = {int(x) for x in args.only.split(",")} if args.only else None
    results = selfcheck.run(seed, sizes, only)
    if args.format == "text":
        print(selfcheck.format_table(results, seed))
    else:
        print(_dump({"seed": seed, "results": [
            {"criterion": r.number, "name": r.name, "pass": r.ok, "detail": r.detail} for r in results]}))
    return 0 if all(r.ok for r in results) else 1


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    amb = common.add_argument_group("ambient space")
    amb.add_argument("--ambient", metavar="FILE", help="ambient space JSON")
    amb.add_argument("--g", type=int, help="genus")
    amb.add_argument("--legs", default="", help="markings as label:twist,... (e.g. 1:1,2:3)")
    amb.add_argument("--a", default="one", help="total value: one/zero for a0, comma list for free:k")
    amb.add_argument("--semigroup", default="a0", help="a0 (default) or free:k")
    common.add_argument("--kappa0", choices=("formal", "substitute"), default="formal")
    common.add_argument("--format", choices=("json", "text"), help="output format (default json; text for selfcheck)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    common.add_argument("--bind", action="append", metavar="NAME=FILE",
                        help="bind a name in class expressions to a class or graph JSON file")

    p = argparse.ArgumentParser(prog="twisted-strata", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a twisted graph")
    s.add_argument("graph")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("canon", parents=[common], help="canonical form of a graph or class")
    s.add_argument("input")
    s.set_defaults(fn=cmd_canon)

    s = sub.add_parser("product", parents=[common], help="intersection product x * y")
    s.add_argument("x", help="class JSON file or class expression")
    s.add_argument("y", help="class JSON file or class expression")
    s.set_defaults(fn=cmd_product)

    s = sub.add_parser("pushglue", parents=[common], help="gluing pushforward along a skeleton graph")
    s.add_argument("skeleton")
    s.add_argument("classes", nargs="*", help="one class per skeleton vertex, on that vertex's space")
    s.set_defaults(fn=cmd_pushglue)

    s = sub.add_parser("pushforget", parents=[common],
                       help="pushforward forgetting a marking (the ambient is the source space)")
    s.add_argument("x")
    s.add_argument("--point", required=True, help="label of the forgotten marking (twist 1)")
    s.set_defaults(fn=cmd_pushforget)

    s = sub.add_parser("pull", parents=[common],
                       help="pullback of psi/kappa along forgetting a new marking (the ambient is the base)")
    s.add_argument("--generator", required=True, help="psi:LABEL or kappa:J")
    s.add_argument("--point", required=True, help="label of the new marking")
    s.set_defaults(fn=cmd_pull)

    s = sub.add_parser("restrict", parents=[common], help="restriction to the locus without value-0 components")
    s.add_argument("x")
    s.set_defaults(fn=cmd_restrict)

    s = sub.add_parser("enumerate", parents=[common], help="list graphs or decorated strata (JSON lines)")
    s.add_argument("--max-edges", type=int, required=True)
    s.add_argument("--twist-bound", type=int, required=True)
    s.add_argument("--codim", type=int, help="list decorated strata of this codimension instead of graphs")
    s.add_argument("--max-degree", type=int, help="bound on the decoration degree (default: codim)")
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("selfcheck", parents=[common], help="run the acceptance checks")
    s.add_argument("--quick", action="store_true", help="smaller random samples")
    s.add_argument("--only", help="comma list of criterion numbers")
    s.set_defaults(fn=cmd_selfcheck)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    if args.format is None:
        args.format = "text" if args.command == "selfcheck" else "json"
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"twisted-strata: usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"twisted-strata: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
