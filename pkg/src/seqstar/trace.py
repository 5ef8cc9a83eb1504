"""Offline re-verification of construction traces.

A trace names its oracles (registry names, possibly with precompose
tables), lists the constructed table, and carries certificates.  Recheck
rebuilds the oracles, re-runs every recorded query, and re-evaluates each
certifying comparison in exact dyadic arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .constructions import SpaceFunction
from .embeddings import Agrees, Valid, meet_preservation_oracle, validate
from .metric import Dyadic
from .sequences import Seq
from .serialize import (
    ParseError,
    node_from_key,
    point_from_json,
    table_from_json,
    value_from_json,
)


@dataclass
class RecheckReport:
    ok: bool
    checked: int
    failures: list[str] = field(default_factory=list)

    def merge(self, other: "RecheckReport") -> None:
        self.ok = self.ok and other.ok
        self.checked += other.checked
        self.failures.extend(other.failures)


def _table_range(table: dict[Seq, Seq]) -> tuple[int, int]:
    depth = max((len(t) for t in table), default=0)
    branch = max((e + 1 for t in table for e in t), default=1)
    return depth, branch


def _resolve_function(trace: dict) -> SpaceFunction | None:
    from .registry import build_function

    spec = trace.get("function")
    return None if spec is None else build_function(spec)


def _check_cert(cert: dict, trace: dict, phi: SpaceFunction | None,
                table: dict[Seq, Seq]) -> str | None:
    """Return a failure message, or None when the certificate holds."""
    from .registry import tree_family, tree_set

    kind = cert.get("kind")
    if kind == "valid_table":
        depth, branch = _table_range(table)
        v = validate(lambda t: table[t], depth, branch)
        return None if isinstance(v, Valid) else f"table validation failed: {v}"
    if kind == "meet_table":
        depth, branch = _table_range(table)
        r = meet_preservation_oracle(lambda t: table[t], depth, branch)
        return None if isinstance(r, Agrees) else f"meet preservation failed: {r}"
    if kind == "in_set":
        node = tuple(cert["node"])
        if "family_level" in cert:
            oracle = tree_family(trace["family"])(cert["family_level"])
        else:
            oracle = tree_set(cert["oracle"])
        got = oracle.member(node)
        want = cert["member"]
        return None if got == want else f"in_set: member({node}) = {got}, recorded {want}"
    if phi is None:
        return f"certificate {kind!r} needs a function but the trace names none"
    if kind == "diam_lt":
        node = tuple(cert["node"])
        eps = Dyadic.parse(cert["eps"])
        got = phi.cone_diameter(node)
        return None if got < eps else f"diam_lt: cone_diameter({node}) = {got} not < {eps}"
    if kind in ("value_dist_lt", "value_dist_le", "value_dist_ge", "value_dist_gt"):
        a = phi.evaluate(point_from_json(cert["a"]))
        b = phi.evaluate(point_from_json(cert["b"]))
        d = phi.value_distance(a, b)
        bound = Dyadic.parse(cert["bound"])
        ok = {"value_dist_lt": d < bound, "value_dist_le": d <= bound,
              "value_dist_ge": d >= bound, "value_dist_gt": d > bound}[kind]
        return None if ok else f"{kind}: distance {d} vs bound {bound}"
    if kind == "avoid_value":
        v = phi.evaluate(point_from_json(cert["a"]))
        x = value_from_json(cert["x"])
        d = phi.value_distance(v, x)
        bound = Dyadic.parse(cert["bound"])
        if cert.get("op") == "lt":
            return None if d < bound else f"avoid_value: distance {d} not < {bound}"
        if bound.is_zero() or d < bound:
            return f"avoid_value: distance {d} below positive bound {bound}"
        return None
    if kind == "avoid_pair":
        a = phi.evaluate(point_from_json(cert["a"]))
        b = phi.evaluate(point_from_json(cert["b"]))
        d = phi.value_distance(a, b)
        bound = Dyadic.parse(cert["bound"])
        if bound.is_zero() or d < bound:
            return f"avoid_pair: distance {d} below positive bound {bound}"
        return None
    if kind == "dist_gt_sum":
        a = phi.evaluate(point_from_json(cert["a"]))
        b = phi.evaluate(point_from_json(cert["b"]))
        d = phi.value_distance(a, b)
        lim = phi.cone_diameter(tuple(cert["na"])) + phi.cone_diameter(tuple(cert["nb"]))
        return None if d > lim else f"dist_gt_sum: {d} not > {lim}"
    if kind == "cone_value_diam_lt":
        from .sequences import AugmentedPoint

        eps = Dyadic.parse(cert["eps"])
        members = [tuple(m) for m in cert["members"]]
        vals = [phi.evaluate(AugmentedPoint(m)) for m in members]
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                d = phi.value_distance(vals[i], vals[j])
                if not d < eps:
                    return f"cone_value_diam_lt: {d} not < {eps} " \
                           f"({members[i]} vs {members[j]})"
        return None
    return f"unknown certificate kind {kind!r}"


def recheck(trace: dict) -> RecheckReport:
    """Re-verify a construction trace from scratch; recurses into stages."""
    if not isinstance(trace, dict) or "certificates" not in trace:
        raise ParseError("trace must be an object with a 'certificates' list")
    try:
        phi = _resolve_function(trace)
    except ParseError as e:
        return RecheckReport(False, 0, [f"cannot rebuild function: {e}"])
    table = table_from_json(trace.get("table", {}))
    report = RecheckReport(True, 0)
    for cert in trace["certificates"]:
        report.checked += 1
        msg = _check_cert(cert, trace, phi, table)
        if msg is not None:
            report.ok = False
            report.failures.append(msg)
    for stage in trace.get("stages", []):
        report.merge(recheck(stage))
    return report
