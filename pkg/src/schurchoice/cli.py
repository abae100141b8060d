"""Command-line interface: ``schurchoice {admit,frontier,audit,compare,indexes,tabulate}``.

Output is deterministic JSON (or flat TSV).  Errors go to stderr as a JSON
object with an ``error.code`` field and a nonzero exit status.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dataio
from .audit import audit, canonical_key, schur_table
from .choice import merit_trichotomy, schur_trace, xi
from .errors import (
    ConsistencyError,
    InputError,
    PreconditionError,
    ResourceError,
    SchurChoiceError,
)
from .frontier import BudgetSpec, frontier, frontier_bruteforce, frontier_diagnostics
from .indexes import builtin_indexes, index_count_representation, support_size
from .majorization import as_distribution

EXIT_CODES = {
    InputError: 2,
    ResourceError: 3,
    PreconditionError: 4,
    ConsistencyError: 5,
}


def _rat(v: Fraction) -> str:
    return str(Fraction(v))


def _parse_dist(text: str):
    try:
        return as_distribution(int(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--dist must be comma-separated integers, got {text!r}") from None


def _frontier_payload(spec, b, config, verify: bool) -> dict:
    front = frontier(spec, b, cap=config.caps["frontier"])
    out = {
        "x": list(spec.x),
        "capacity": spec.q,
        "bias": [_rat(v) for v in b.bias],
        "target_total": front.target_total,
        "frontier": [list(y) for y in front],
        "diagnostics": None,
    }
    if len(front) > 1:
        diag = frontier_diagnostics(front, b)
        out["diagnostics"] = {
            "shared_value": _rat(diag.shared_value),
            "involutions": [
                {"y": list(y), "z": list(z), "pi": [p + 1 for p in pi]}
                for (y, z), pi in sorted(diag.pairwise_involutions.items())
            ],
        }
    if verify:
        oracle = frontier_bruteforce(spec, b, cap=config.caps["budget"])
        if oracle.elements != front.elements:
            raise ConsistencyError(f"frontier {front.elements} disagrees with oracle {oracle.elements}")
        out["verified_against_bruteforce"] = True
    return out


def cmd_frontier(config, dist, verify=False) -> dict:
    if len(dist) != config.n:
        raise InputError(f"--dist has {len(dist)} coordinates, config n is {config.n}")
    return _frontier_payload(BudgetSpec(dist, config.capacity), config.bias, config, verify)


def cmd_admit(config, roster, verify=False) -> dict:
    b = config.bias
    chosen, steps, front = schur_trace(roster.students, roster.ranking, b, config.capacity,
                                       cap=config.caps["frontier"])
    pool = xi(roster.students, config.n)
    dist = xi(chosen, config.n)
    if dist not in front:
        raise ConsistencyError(f"admitted distribution {dist} is not in the frontier")
    out = {
        "capacity": config.capacity,
        "bias": [_rat(v) for v in b.bias],
        "pool_distribution": list(pool),
        "admitted": sorted(s.id for s in chosen),
        "admitted_distribution": list(dist),
        "frontier": [list(y) for y in front],
        "trace": [{"student": st.student, "decision": "accept" if st.admitted else "skip"} for st in steps],
        "tie_broken_by_id": roster.tie_broken,
    }
    if verify:
        oracle = frontier_bruteforce(BudgetSpec(pool, config.capacity), b, cap=config.caps["budget"])
        if dist not in oracle:
            raise ConsistencyError(f"admitted distribution {dist} not in brute-force frontier")
        out["verified_against_bruteforce"] = True
    return out


def cmd_audit(config, roster, table, partial=False) -> dict:
    universe = roster.universe(config.n)
    report = audit(table, universe, config.bias, partial=partial, limit=config.caps["universe"])
    return {"capacity": table.capacity, **report.to_dict()}


def cmd_compare(config, roster, table_a, table_b) -> dict:
    """Merit comparison of a Schur table (A) against an alternative (B) on every shared subset."""
    universe = roster.universe(config.n)
    b = config.bias
    if table_a.capacity != table_b.capacity:
        raise InputError(f"capacities differ: {table_a.capacity} vs {table_b.capacity}")
    q = table_a.capacity
    rows = []
    counts: dict[str, int] = {}
    for sub in sorted(set(table_a.entries) & set(table_b.entries), key=canonical_key):
        a, c = table_a[sub], table_b[sub]
        if a == c:
            continue
        try:
            verdict = merit_trichotomy(universe.resolve(a), universe.resolve(c), universe.resolve(sub),
                                       roster.ranking, b, q)
        except InputError as exc:
            raise InputError(f"applicants {sorted(sub)}: {exc}") from None
        counts[verdict.verdict] = counts.get(verdict.verdict, 0) + 1
        rows.append({
            "applicants": sorted(sub),
            "schur": sorted(a),
            "other": sorted(c),
            "verdict": verdict.verdict,
            "holding": list(verdict.holding),
        })
    return {"capacity": q, "differing_subsets": len(rows),
            "verdict_counts": dict(sorted(counts.items())), "comparisons": rows}


def cmd_indexes(dist, renyi_order="2", count_constants=None) -> dict:
    values = {name: f.display(dist) for name, f in builtin_indexes(renyi_order).items()}
    out = {"x": list(dist), "support_size": support_size(dist), "values": values}
    if count_constants is not None:
        f = index_count_representation(count_constants)
        out["values"][f.name] = f.display(dist)
    return out


def cmd_tabulate(config, roster) -> dict:
    universe = roster.universe(config.n)
    table = schur_table(universe, roster.ranking, config.bias, config.capacity,
                        limit=config.caps["universe"])
    return dataio.rule_table_to_json(table)


# -- Output ------------------------------------------------------------------


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    elif isinstance(obj, list):
        yield prefix, ",".join(_scalar(v) for v in obj)
    else:
        yield prefix, _scalar(obj)


def _scalar(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render(payload: dict, fmt: str) -> str:
    if fmt == "tsv":
        return "\n".join(f"{k}\t{v}" for k, v in _flatten(payload)) + "\n"
    return json.dumps(payload, indent=2) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schurchoice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, roster=False):
        p.add_argument("--config", required=True, help="JSON run configuration")
        if roster:
            p.add_argument("--roster", required=True, help="CSV student_id,type,priority_score")
        p.add_argument("--format", choices=("json", "tsv"), help="overrides the config format")

    p = sub.add_parser("admit", help="run the Schur choice rule on a roster")
    common(p, roster=True)
    p.add_argument("--verify", action="store_true", help="cross-check against the brute-force frontier")

    p = sub.add_parser("frontier", help="frontier of a pool distribution")
    common(p)
    p.add_argument("--dist", required=True, help="comma-separated counts, e.g. 2,2")
    p.add_argument("--verify", action="store_true", help="cross-check against the brute-force frontier")

    p = sub.add_parser("audit", help="audit a rule table against the axioms")
    common(p, roster=True)
    p.add_argument("--rule", required=True, help="rule table JSON")
    p.add_argument("--partial", action="store_true", help="audit only the subsets present in the table")

    p = sub.add_parser("compare", help="merit comparison of a Schur table against another rule")
    common(p, roster=True)
    p.add_argument("--rule", action="append", required=True,
                   help="rule table JSON; give twice (Schur first) or once to compare against the roster's Schur rule")

    p = sub.add_parser("indexes", help="diversity index values of a distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--renyi-order", default="2")
    p.add_argument("--count-constants", help="comma-separated nondecreasing constants c_1..c_n")
    p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = sub.add_parser("tabulate", help="emit the Schur rule table of a roster over all subsets")
    common(p, roster=True)
    return parser


def run(argv=None) -> str:
    args = build_parser().parse_args(argv)
    if args.command == "indexes":
        dist = _parse_dist(args.dist)
        consts = args.count_constants.split(",") if args.count_constants else None
        return render(cmd_indexes(dist, args.renyi_order, consts), args.format)

    config = dataio.load_config(args.config)
    fmt = args.format or config.format
    roster = None
    if hasattr(args, "roster"):
        roster = dataio.load_roster(args.roster, config.n, config.tie_break)

    if args.command == "admit":
        payload = cmd_admit(config, roster, args.verify)
    elif args.command == "frontier":
        payload = cmd_frontier(config, _parse_dist(args.dist), args.verify)
    elif args.command == "audit":
        payload = cmd_audit(config, roster, dataio.load_rule_table(args.rule), args.partial)
    elif args.command == "compare":
        if len(args.rule) > 2:
            raise InputError("--rule may be given at most twice")
        tables = [dataio.load_rule_table(p) for p in args.rule]
        if len(tables) == 1:
            universe = roster.universe(config.n)
            tables.insert(0, schur_table(universe, roster.ranking, config.bias, tables[0].capacity,
                                         limit=config.caps["universe"]))
        payload = cmd_compare(config, roster, *tables)
    else:
        payload = cmd_tabulate(config, roster)
    return render(payload, fmt)


def main(argv=None) -> int:
    try:
        sys.stdout.write(run(argv))
    except SchurChoiceError as exc:
        code = next((v for cls, v in EXIT_CODES.items() if isinstance(exc, cls)), 1)
        sys.stderr.write(json.dumps({"error": {"code": exc.code, "message": str(exc)}}) + "\n")
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
