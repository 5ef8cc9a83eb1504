"""Command-line front end: JSON in, JSON out, reproducible traces.

Exit codes: 0 success, 2 parse error, 3 domain error, 4 budget error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any

from . import catalog as cat
from . import constructions as con
from .embeddings import (
    Empty,
    MeetEmbedding,
    Valid,
    extend,
    preimage_cone,
    validate,
)
from .metric import Bounded, Dyadic, Exact, SCHEDULES, distance
from .sequences import (
    AugmentedPoint,
    BudgetExceeded,
    DepthBudget,
    DomainMismatch,
    FinitePoint,
    InfinitePoint,
    PeriodicPoint,
    Point,
    Seq,
    meet,
)
from .serialize import (
    ParseError,
    basic_from_json,
    dyadic_from_json,
    embedding_from_json,
    point_from_json,
    point_to_json,
    table_to_json,
    value_to_json,
)
from .topology import Cone, Counterexample, basic_member, cover_decide, uncovered_descent
from .trace import recheck

EXIT_PARSE, EXIT_DOMAIN, EXIT_BUDGET = 2, 3, 4


def _json_arg(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"bad JSON for {what}: {e}") from e


def _seq_arg(text: str, what: str) -> Seq:
    obj = _json_arg(text, what)
    if not isinstance(obj, list) or not all(isinstance(x, int) and x >= 0 for x in obj):
        raise ParseError(f"{what} must be a JSON list of nonnegative integers")
    return tuple(obj)


def _schedule(args):
    name = getattr(args, "schedule", "weight") or "weight"
    if name not in SCHEDULES:
        raise ParseError(f"unknown schedule {name!r}; known: {sorted(SCHEDULES)}")
    return SCHEDULES[name]()


def _budget(args) -> DepthBudget:
    return DepthBudget(
        depth=getattr(args, "depth", None) or 64,
        branch=getattr(args, "branch", None) or 64,
        steps=getattr(args, "steps", None) or 100_000,
    )


def _emit(doc: dict) -> int:
    print(json.dumps(doc, ensure_ascii=False, sort_keys=True))
    return 0


def _extend_point(pi: MeetEmbedding, p: Point, budget: DepthBudget) -> Point:
    """Extension with a finitely presented result for periodic inputs.

    The accepted embedding kinds all act coordinate-by-coordinate beyond a
    finite depth, so an eventually periodic input has an eventually
    periodic image.
    """
    if isinstance(p, (FinitePoint, AugmentedPoint)):
        return extend(pi, p, budget)
    if isinstance(p, PeriodicPoint):
        d = max(len(p.head) + len(p.period), budget.depth // 4)
        head = pi.apply(p.restrict(d, budget).seq)
        k = (d - len(p.head)) % len(p.period)
        return PeriodicPoint(head, p.period[k:] + p.period[:k])
    raise DomainMismatch("only finitely presented points are accepted")


# --- subcommand handlers --------------------------------------------------


def _cmd_dist(args) -> int:
    a = point_from_json(_json_arg(args.a, "--a"))
    b = point_from_json(_json_arg(args.b, "--b"))
    d = distance(a, b, _schedule(args), _budget(args))
    if isinstance(d, Exact):
        return _emit({"exact": str(d.value)})
    return _emit({"upper": str(d.upper)})


def _cmd_meet(args) -> int:
    s = _seq_arg(args.s, "--s")
    t = _seq_arg(args.t, "--t")
    return _emit({"meet": list(meet(s, t))})


def _cmd_eps(args) -> int:
    t = _seq_arg(args.t, "--t")
    return _emit({"eps": str(_schedule(args)(t))})


def _cmd_member(args) -> int:
    B = basic_from_json(_json_arg(args.set, "--set"))
    p = point_from_json(_json_arg(args.point, "--point"))
    return _emit({"member": basic_member(B, p, _budget(args))})


def _parse_family(text: str):
    obj = _json_arg(text, "--family")
    if not isinstance(obj, list):
        raise ParseError("--family must be a JSON list of basic sets")
    return [basic_from_json(x) for x in obj]


def _cmd_cover_check(args) -> int:
    family = _parse_family(args.family)
    r = cover_decide(family)
    if isinstance(r, Counterexample):
        return _emit({"covers": False, "counterexample": point_to_json(r.point)})
    return _emit({"covers": True})


def _cmd_descent(args) -> int:
    family = _parse_family(args.family)
    try:
        p = uncovered_descent(family)
    except ValueError as e:
        raise DomainMismatch(str(e)) from e
    return _emit({"point": point_to_json(p)})


def _cmd_embed(args) -> int:
    budget = _budget(args)
    pi = embedding_from_json(_json_arg(args.pi, "--pi"))
    depth = args.depth or 3
    branch = args.branch or 3
    if args.action == "check":
        v = validate(pi.apply, depth, branch)
        if isinstance(v, Valid):
            return _emit({"valid": True})
        return _emit({"valid": False,
                      "violation": {"t": list(v.t), "i": v.i, "j": v.j}})
    if args.action == "eval":
        t = _seq_arg(args.t, "--t")
        return _emit({"image": list(pi.apply(t))})
    if args.action == "extend":
        p = point_from_json(_json_arg(args.point, "--point"))
        return _emit({"point": point_to_json(_extend_point(pi, p, budget))})
    if args.action == "compose":
        pi2 = embedding_from_json(_json_arg(args.pi2, "--pi2"))
        composed = pi.compose(pi2)
        from .sequences import nodes_in_range

        table = {t: composed.apply(t) for t in nodes_in_range(depth, branch)}
        return _emit({"table": table_to_json(table)})
    if args.action == "preimage":
        t = _seq_arg(args.t, "--t")
        r = preimage_cone(pi, t, depth, branch)
        if isinstance(r, Empty):
            return _emit({"empty": True, "range_limited": r.range_limited})
        return _emit({"cone": list(r.t)})
    raise ParseError(f"unknown embed action {args.action!r}")


def _catalog_set(name: str):
    if name == "a":
        return cat.catalog_a()
    if name == "b":
        return cat.catalog_b()
    raise ParseError("--set must be 'a' or 'b'")


def _tagged_to_json(v: cat.TaggedValue) -> dict:
    def payload(x):
        if x is cat.INFTY:
            return "infty"
        if isinstance(x, cat.Left):
            return {"left": payload(x.payload)}
        if isinstance(x, cat.Right):
            return {"right": payload(x.payload)}
        if isinstance(x, Point):
            return point_to_json(x)
        if isinstance(x, tuple):
            return list(x)
        raise ParseError(f"unserializable payload {x!r}")

    return {"space": v.space.value, "payload": payload(v.payload)}


def _domain_samples(f: cat.CatalogFunction, n: int, seed: int) -> list[Point]:
    rng = random.Random(seed)
    dom = cat.domain_of(f)
    out: list[Point] = []
    seen: set = set()
    tries = 0
    while len(out) < n and tries < 50 * n:
        tries += 1
        t = tuple(rng.randrange(4) for _ in range(rng.randrange(4)))
        choices = [p for p in (FinitePoint(t), AugmentedPoint(t),
                               PeriodicPoint(t, (1,)))
                   if cat.tag_member(dom, p)]
        if not choices:
            continue
        p = rng.choice(choices)
        key = (type(p).__name__, t, getattr(p, "period", None))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def _cmd_catalog(args) -> int:
    if args.action == "list":
        fns = _catalog_set(args.set)
        return _emit({"count": len(fns),
                      "functions": [cat.descriptor_to_json(f) for f in fns]})
    fns = _catalog_set(args.set)
    if not 0 <= args.fn < len(fns):
        raise ParseError(f"--fn must be in [0, {len(fns)})")
    f = fns[args.fn]
    if args.action == "eval":
        p = point_from_json(_json_arg(args.point, "--point"))
        return _emit({"value": _tagged_to_json(cat.evaluate(f, p, _budget(args)))})
    if args.action == "check-embed":
        pi = embedding_from_json(_json_arg(args.pi, "--pi"))
        from .registry import space_function

        phi = space_function("compactify-identity")
        samples = _domain_samples(f, args.samples, args.seed)
        r = cat.embed_via(pi, f, phi, samples, _budget(args))
        if isinstance(r, cat.Mismatch):
            return _emit({"pairing": False, "witness": point_to_json(r.witness)})
        return _emit({"pairing": True, "samples": len(samples),
                      "distinct_outputs": len(r.psi)})
    raise ParseError(f"unknown catalog action {args.action!r}")


def _cmd_construct(args) -> int:
    from .registry import space_function, tree_family, tree_set

    budget = _budget(args)
    schedule = _schedule(args)
    depth = args.depth or 2
    branch = args.branch or 3
    op = args.op

    if op == "recheck":
        text = args.trace
        if text == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(text, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError:
                pass  # treat the argument as inline JSON
        report = recheck(_json_arg(text, "trace"))
        return _emit({"ok": report.ok, "checked": report.checked,
                      "failures": report.failures})

    if op == "ramsey":
        side, pe = con.ramsey_split(tree_set(args.set), depth, branch, budget)
        return _emit(pe.trace)
    if op == "category":
        pe = con.category_refine(tree_family(args.family),
                                 _seq_arg(args.root, "--root"), depth, branch, budget)
        return _emit(pe.trace)
    if op == "continuity":
        pe = con.continuity_refine(tree_family(args.family),
                                   _seq_arg(args.root, "--root"), depth, branch, budget)
        return _emit(pe.trace)

    phi = space_function(args.fn)
    if op == "shrink":
        pe = con.diameter_shrink(phi, schedule, depth, branch, budget)
        return _emit(pe.trace)
    if op == "stabilize":
        pe, _ = con.children_stabilize(phi, args.selector_budget, depth, branch, budget)
        return _emit(pe.trace)
    if op == "disjointify":
        pe = con.disjointify(phi, depth, branch, budget)
        return _emit(pe.trace)
    if op == "limit":
        _, pe = con.limit_refine(phi, schedule, depth, branch, budget)
        return _emit(pe.trace)
    if op == "eps-split":
        eps = dyadic_from_json(args.eps)
        _, pe = con.epsilon_discrete_or_ball(phi, eps, _seq_arg(args.root, "--root"),
                                             depth, branch, budget)
        return _emit(pe.trace)
    if op == "shrink-or-discrete":
        _, pe = con.shrink_or_discrete(phi, schedule, depth, branch, budget)
        return _emit(pe.trace)
    if op == "avoid":
        x = dyadic_from_json(args.x)
        _, pe = con.point_avoid(phi, x, budget)
        return _emit(pe.trace)
    if op == "finite-avoid":
        F = [dyadic_from_json(s.strip()) for s in args.values.split(";")]
        _, pe = con.finite_avoid_or_converge(phi, F, _seq_arg(args.root, "--root"),
                                             depth, branch, budget)
        return _emit(pe.trace)
    if op == "discrete-refine":
        _, pe = con.discrete_refine(phi, schedule, depth, branch, budget)
        return _emit(pe.trace)
    if op == "classify":
        _, pe, _ = con.classify_baire_function(phi, depth, branch, budget)
        return _emit(pe.trace)
    raise ParseError(f"unknown construct op {op!r}")


# --- argument parsing -----------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--branch", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--schedule", default="weight")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="seqstar",
                                 description="Exact tools for the compactified "
                                             "sequence space and its embedding calculus")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("dist", help="ultrametric distance between two points")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _common(p)
    p.set_defaults(run=_cmd_dist)

    p = sub.add_parser("meet", help="longest common prefix of two nodes")
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(run=_cmd_meet)

    p = sub.add_parser("eps", help="schedule radius at a node")
    p.add_argument("--t", required=True)
    _common(p)
    p.set_defaults(run=_cmd_eps)

    p = sub.add_parser("member", help="membership of a point in a basic set")
    p.add_argument("--set", required=True)
    p.add_argument("--point", required=True)
    _common(p)
    p.set_defaults(run=_cmd_member)

    p = sub.add_parser("cover-check", help="decide whether basic sets cover the space")
    p.add_argument("--family", required=True)
    _common(p)
    p.set_defaults(run=_cmd_cover_check)

    p = sub.add_parser("descent", help="walk to an uncovered point of a non-cover")
    p.add_argument("--family", required=True)
    _common(p)
    p.set_defaults(run=_cmd_descent)

    p = sub.add_parser("embed", help="embedding calculus")
    p.add_argument("action", choices=["check", "eval", "extend", "compose", "preimage"])
    p.add_argument("--pi", required=True)
    p.add_argument("--pi2")
    p.add_argument("--t")
    p.add_argument("--point")
    _common(p)
    p.set_defaults(run=_cmd_embed)

    p = sub.add_parser("catalog", help="the 24/27-element function catalogs")
    p.add_argument("action", choices=["list", "eval", "check-embed"])
    p.add_argument("--set", default="a")
    p.add_argument("--fn", type=int, default=0)
    p.add_argument("--point")
    p.add_argument("--pi")
    p.add_argument("--samples", type=int, default=16)
    _common(p)
    p.set_defaults(run=_cmd_catalog)

    p = sub.add_parser("construct", help="oracle-driven embedding constructions")
    p.add_argument("op", choices=["ramsey", "category", "continuity", "shrink",
                                  "stabilize", "disjointify", "limit", "eps-split",
                                  "shrink-or-discrete", "avoid", "finite-avoid",
                                  "discrete-refine", "classify", "recheck"])
    p.add_argument("--set", default="all", help="tree set name (ramsey)")
    p.add_argument("--family", default="all-levels", help="tree family name")
    p.add_argument("--fn", default="const-zero", help="space function name")
    p.add_argument("--root", default="[]")
    p.add_argument("--eps", default="1")
    p.add_argument("--x", default="0")
    p.add_argument("--values", default="0", help="semicolon-separated dyadics")
    p.add_argument("--selector-budget", type=int, default=48)
    p.add_argument("--trace", default="-", help="trace file, inline JSON, or - for stdin")
    _common(p)
    p.set_defaults(run=_cmd_construct)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ParseError as e:
        print(json.dumps({"error": {"kind": "parse", "message": str(e)}}), file=sys.stderr)
        return EXIT_PARSE
    except DomainMismatch as e:
        print(json.dumps({"error": {"kind": "domain", "message": str(e)}}), file=sys.stderr)
        return EXIT_DOMAIN
    except BudgetExceeded as e:
        doc = {"error": {"kind": "budget", "message": str(e), "stage": e.stage}}
        print(json.dumps(doc), file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
