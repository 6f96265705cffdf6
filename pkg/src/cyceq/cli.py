"""Command line entry point.

One binary with verb-noun subcommands; machine-readable JSON on stdout,
diagnostics on stderr.  Exit codes: 0 the property holds or the object
was produced, 1 the property fails (a witness is printed), 2 usage
error, 3 a resource bound was exceeded or the outcome is inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from . import abundance as ab
from . import constructions as con
from . import cycle_equations as ce
from . import equations as eqmod
from . import removal as rm
from .errors import CyceqError, ResourceLimit, ValidationError
from .graphs import ColouredGraph, Graph, K3, cycle_basis, enumerate_cycles, hom_exists

EXIT_OK = 0
EXIT_PROPERTY_FAILS = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _emit(obj, pretty: bool = False) -> None:
    if pretty:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _parse_coeffs(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise ValidationError(f"cannot parse coefficient list {text!r}")


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_graph(path: str) -> Graph:
    return Graph.from_json(_load_json(path))


def _load_coloured(path: str) -> ColouredGraph:
    return ColouredGraph.from_json(_load_json(path))


def _pattern_by_name(name: str) -> Graph:
    from .graphs import complete_graph, cycle_graph, path_graph

    name = name.lower()
    if name.startswith("k"):
        return complete_graph(int(name[1:]))
    if name.startswith("c"):
        return cycle_graph(int(name[1:]))
    if name.startswith("p"):
        return path_graph(int(name[1:]))
    raise ValidationError(f"unknown pattern name {name!r}")


def _ordering(text: Optional[str], size: int) -> tuple[int, ...]:
    if text is None or text == "identity":
        return tuple(range(1, size + 1))
    vals = tuple(_parse_coeffs(text))
    if len(vals) != size:
        raise ValidationError(f"ordering needs {size} values")
    return vals


# ---------------------------------------------------------------------------
# eq group

def cmd_eq(args) -> int:
    if args.eq_cmd == "validate":
        try:
            eq = eqmod.validate(_parse_coeffs(args.coeffs))
        except ValidationError as exc:
            _emit({"valid": False, "reason": str(exc)}, args.pretty)
            return EXIT_PROPERTY_FAILS
        _emit({"valid": True, "coeffs": eq.to_json()}, args.pretty)
        return EXIT_OK
    eq = eqmod.validate(_parse_coeffs(args.coeffs))
    if args.eq_cmd == "genus":
        res = eqmod.genus(eq)
        if args.witness:
            _emit(
                {"genus": res.genus, "parts": [list(p) for p in res.witness.parts]},
                args.pretty,
            )
        else:
            _emit(res.genus, args.pretty)
        return EXIT_OK
    if args.eq_cmd == "convex":
        val = eqmod.is_convex(eq)
        _emit(val, args.pretty)
        return EXIT_OK if val else EXIT_PROPERTY_FAILS
    if args.eq_cmd == "symmetric":
        val = eqmod.is_symmetric(eq)
        _emit(val, args.pretty)
        return EXIT_OK if val else EXIT_PROPERTY_FAILS
    if args.eq_cmd == "classify":
        values = _parse_coeffs(args.values)
        _emit(eqmod.classify_solution(eq, values).value, args.pretty)
        return EXIT_OK
    if args.eq_cmd == "avoid":
        mode = (
            eqmod.AvoidanceMode.DISTINCT_FREE
            if args.mode == "distinct"
            else eqmod.AvoidanceMode.NONTRIVIAL_FREE
        )
        res = eqmod.brute_avoidance(eq, args.N, mode)
        _emit(
            {"n_max": res.n_max, "witness": list(res.witness), "mode": res.mode.value},
            args.pretty,
        )
        return EXIT_OK
    if args.eq_cmd == "count-distinct":
        members = _load_json(args.set)
        _emit(eqmod.count_distinct_solutions(eq, members), args.pretty)
        return EXIT_OK
    raise ValidationError(f"unknown eq subcommand {args.eq_cmd!r}")


# ---------------------------------------------------------------------------
# graph group

def cmd_graph(args) -> int:
    if args.graph_cmd == "cycles":
        g = _load_graph(args.graph)
        listing = enumerate_cycles(g, max_count=args.max_count, max_len=args.max_len)
        _emit(
            {"cycles": [list(c) for c in listing.cycles], "truncated": listing.truncated},
            args.pretty,
        )
        return EXIT_RESOURCE if listing.truncated else EXIT_OK
    if args.graph_cmd == "basis":
        g = _load_graph(args.graph)
        _emit([list(c) for c in cycle_basis(g)], args.pretty)
        return EXIT_OK
    if args.graph_cmd == "hom":
        g = _load_graph(args.graph)
        t = _pattern_by_name(args.target) if not args.target.endswith(".json") else _load_graph(args.target)
        res = hom_exists(g, t, budget=args.budget)
        _emit(
            {"status": res.status, "mapping": list(res.mapping) if res.mapping else None},
            args.pretty,
        )
        if res.status == "budget":
            return EXIT_RESOURCE
        return EXIT_OK if res.found else EXIT_PROPERTY_FAILS
    if args.graph_cmd == "path-hom":
        cg = _load_coloured(args.graph)
        from .graphs import colour_hom_to_p3inf

        res = colour_hom_to_p3inf(cg)
        _emit(
            {
                "levels": list(res.levels) if res.levels else None,
                "wrapped_cycle": list(res.wrapped_cycle) if res.wrapped_cycle else None,
            },
            args.pretty,
        )
        return EXIT_OK if res.exists else EXIT_PROPERTY_FAILS
    raise ValidationError(f"unknown graph subcommand {args.graph_cmd!r}")


# ---------------------------------------------------------------------------
# cycle-equation group

def cmd_check_all(args) -> int:
    g = _load_graph(args.graph)
    ordering = _ordering(args.orderings if args.orderings != "all" else "identity", 3)
    orderings = None
    if args.check == "convex" and args.orderings == "all":
        orderings = ce.all_orderings(3)
    report = ce.check_all_colourings(
        g,
        check=args.check,
        ordering=ordering,
        orderings=orderings,
        t=args.t,
        bound=args.L,
        reduce_symmetry=not args.no_symmetry_reduction,
        max_count=args.max_count,
        max_len=args.max_len,
    )
    for record in report.records:
        _emit(record.to_json(), args.pretty)
    _emit(report.summary_json(), args.pretty)
    return EXIT_OK


def cmd_cycle_eq(args) -> int:
    cg = _load_coloured(args.graph)
    ordering = _ordering(args.ordering, cg.pattern.n)
    cycle = [int(v) for v in args.cycle.split(",")]
    ceq = ce.build_cycle_equation(cycle, cg, ordering)
    _emit(ceq.to_json(), args.pretty)
    return EXIT_OK


# ---------------------------------------------------------------------------
# abundance group

def cmd_abundance(args) -> int:
    if args.ab_cmd == "verify":
        cert = ab.AbundanceCertificate.from_json(_load_json(args.cert))
        res = ab.verify_certificate(cert, expand_joins=args.expand_joins)
        _emit(res.to_json(), args.pretty)
        return EXIT_OK if res.ok else EXIT_PROPERTY_FAILS
    if args.ab_cmd == "split":
        cg = _load_coloured(args.graph)
        cert = ab.splittable_decompose(cg)
        if cert is None:
            _emit({"splittable": False}, args.pretty)
            return EXIT_PROPERTY_FAILS
        _emit({"splittable": True, "certificate": cert.to_json()}, args.pretty)
        return EXIT_OK
    if args.ab_cmd == "peel":
        cg = _load_coloured(args.graph)
        cert = ab.peel_order_search(cg)
        if cert is None:
            _emit({"peelable": False}, args.pretty)
            return EXIT_PROPERTY_FAILS
        _emit({"peelable": True, "certificate": cert.to_json()}, args.pretty)
        return EXIT_OK
    if args.ab_cmd == "hm":
        pattern = _pattern_by_name(args.pattern)
        if args.seed_graph:
            seed = _load_coloured(args.seed_graph)
        else:
            seed = ColouredGraph(
                Graph.from_edges(pattern.n, []), pattern, tuple(range(pattern.n))
            )
        built = ab.build_hm(seed, args.m)
        _emit(built.to_json(), args.pretty)
        return EXIT_OK
    if args.ab_cmd == "double":
        cg = _load_coloured(args.graph)
        a, b = (int(x) for x in args.edge.split(","))
        _emit(ab.double_along_edge(cg, (a, b)).to_json(), args.pretty)
        return EXIT_OK
    raise ValidationError(f"unknown abundance subcommand {args.ab_cmd!r}")


# ---------------------------------------------------------------------------
# construct / solve groups

def cmd_construct(args) -> int:
    if args.con_cmd == "behrend":
        b = con.behrend_set(args.n)
        _emit(
            {
                "n": b.n,
                "size": len(b),
                "members": list(b.members),
                "base": b.base,
                "dim": b.dim,
                "radius_sq": b.radius_sq,
            },
            args.pretty,
        )
        return EXIT_OK
    if args.con_cmd == "rs":
        pattern = _pattern_by_name(args.pattern)
        members = _load_json(args.set)
        ordering = _ordering(args.ordering, pattern.n)
        rs = con.rs_graph(pattern, ordering, args.N, members)
        out = rs.coloured.to_json()
        out["packing"] = [list(c) for c in rs.packing]
        out["packing_keys"] = [list(k) for k in rs.packing_keys]
        out["dropped"] = rs.dropped
        _emit(out, args.pretty)
        return EXIT_OK
    if args.con_cmd == "fig5":
        _emit(con.fig5_graph().to_json(), args.pretty)
        return EXIT_OK
    if args.con_cmd == "gn":
        _emit(con.g_n(args.n).to_json(), args.pretty)
        return EXIT_OK
    raise ValidationError(f"unknown construct subcommand {args.con_cmd!r}")


def cmd_solve(args) -> int:
    eq = eqmod.validate(_parse_coeffs(args.eq))
    members = _load_json(args.set)
    report = con.find_distinct_solution(eq, members, args.N)
    _emit(report.to_json(), args.pretty)
    return EXIT_RESOURCE if report.abstain else EXIT_OK


# ---------------------------------------------------------------------------
# removal group

def cmd_removal(args) -> int:
    if args.rm_cmd == "pack":
        g = _load_graph(args.graph)
        pattern = _pattern_by_name(args.pattern)
        packing = rm.greedy_packing(g, pattern)
        _emit([list(c) for c in packing], args.pretty)
        return EXIT_OK
    if args.rm_cmd == "uniformize":
        g = _load_graph(args.graph)
        pattern = _pattern_by_name(args.pattern)
        packing = [tuple(c) for c in _load_json(args.packing)]
        sub, wit, vmap = rm.uniformize(g, pattern, packing, args.eps, seed=args.seed)
        check = rm.verify_uniform_far(sub, pattern, wit)
        _emit(
            {
                "subgraph": sub.to_json(),
                "partition": list(wit.partition),
                "packing": [list(c) for c in wit.packing],
                "eps_out": wit.eps,
                "vertex_map": list(vmap),
                "verified": check.ok,
            },
            args.pretty,
        )
        return EXIT_OK if check.ok else EXIT_PROPERTY_FAILS
    if args.rm_cmd == "count-c5":
        g = _load_graph(args.graph)
        _emit(rm.count_c5(g), args.pretty)
        return EXIT_OK
    if args.rm_cmd == "count-p4":
        g = _load_graph(args.graph)
        parts = _load_json(args.parts)
        _emit(rm.count_p4_aligned(g, (parts[0], parts[1], parts[2])), args.pretty)
        return EXIT_OK
    if args.rm_cmd == "dense-core":
        g = _load_graph(args.graph)
        report = rm.dense_core_c5(g, delta=args.delta, seed=args.seed)
        _emit(report.to_json(), args.pretty)
        return EXIT_OK
    raise ValidationError(f"unknown removal subcommand {args.rm_cmd!r}")


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cyceq", description=__doc__)
    p.add_argument("--version", action="version", version=f"cyceq {__version__}")
    p.add_argument("--pretty", action="store_true", help="indent JSON output")
    p.add_argument("--jobs", type=int, default=1, help="work-splitting hint; output order is canonical regardless")
    sub = p.add_subparsers(dest="cmd", required=True)

    eq = sub.add_parser("eq", help="equation classification")
    eqsub = eq.add_subparsers(dest="eq_cmd", required=True)
    for name in ("validate", "genus", "convex", "symmetric"):
        sp = eqsub.add_parser(name)
        sp.add_argument("coeffs")
        if name == "genus":
            sp.add_argument("--witness", action="store_true")
    sp = eqsub.add_parser("classify")
    sp.add_argument("coeffs")
    sp.add_argument("values")
    sp = eqsub.add_parser("avoid")
    sp.add_argument("coeffs")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--mode", choices=("distinct", "nontrivial"), default="nontrivial")
    sp = eqsub.add_parser("count-distinct")
    sp.add_argument("coeffs")
    sp.add_argument("--set", required=True)
    eq.set_defaults(func=cmd_eq)

    gr_p = sub.add_parser("graph", help="graph utilities")
    grsub = gr_p.add_subparsers(dest="graph_cmd", required=True)
    sp = grsub.add_parser("cycles")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--max-count", type=int, default=10**5)
    sp.add_argument("--max-len", type=int, default=20)
    sp = grsub.add_parser("basis")
    sp.add_argument("--graph", required=True)
    sp = grsub.add_parser("hom")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--budget", type=int, default=10**6)
    sp = grsub.add_parser("path-hom")
    sp.add_argument("--graph", required=True)
    gr_p.set_defaults(func=cmd_graph)

    ca = sub.add_parser("check-all", help="per-colouring checks over all proper K3-colourings")
    ca.add_argument("--graph", required=True)
    ca.add_argument("--check", choices=("genus1", "convex", "symmetric"), default="genus1")
    ca.add_argument("--t", type=int, default=ce.GENUS_ONE_DEFAULT_T)
    ca.add_argument("--L", type=int, default=ce.GENUS_ONE_DEFAULT_L)
    ca.add_argument("--orderings", default="identity")
    ca.add_argument("--no-symmetry-reduction", action="store_true")
    ca.add_argument("--max-count", type=int, default=10**5)
    ca.add_argument("--max-len", type=int, default=20)
    ca.set_defaults(func=cmd_check_all)

    ceq = sub.add_parser("cycle-eq", help="build one cycle-equation")
    ceq.add_argument("--graph", required=True)
    ceq.add_argument("--cycle", required=True)
    ceq.add_argument("--ordering", default="identity")
    ceq.set_defaults(func=cmd_cycle_eq)

    abp = sub.add_parser("abundance", help="abundance certificates")
    absub = abp.add_subparsers(dest="ab_cmd", required=True)
    sp = absub.add_parser("verify")
    sp.add_argument("--cert", required=True)
    sp.add_argument("--expand-joins", action="store_true")
    sp = absub.add_parser("split")
    sp.add_argument("--graph", required=True)
    sp = absub.add_parser("peel")
    sp.add_argument("--graph", required=True)
    sp = absub.add_parser("hm")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed-graph")
    sp = absub.add_parser("double")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--edge", required=True)
    abp.set_defaults(func=cmd_abundance)

    co = sub.add_parser("construct", help="named constructions")
    cosub = co.add_subparsers(dest="con_cmd", required=True)
    sp = cosub.add_parser("behrend")
    sp.add_argument("--n", type=int, required=True)
    sp = cosub.add_parser("rs")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--ordering", default="identity")
    sp = cosub.add_parser("fig5")
    sp = cosub.add_parser("gn")
    sp.add_argument("--n", type=int, required=True)
    co.set_defaults(func=cmd_construct)

    so = sub.add_parser("solve", help="distinct-solution finder")
    sosub = so.add_subparsers(dest="so_cmd", required=True)
    sp = sosub.add_parser("distinct")
    sp.add_argument("--eq", required=True)
    sp.add_argument("--set", required=True)
    sp.add_argument("--N", type=int, required=True)
    so.set_defaults(func=cmd_solve)

    rmp = sub.add_parser("removal", help="farness and counting")
    rmsub = rmp.add_subparsers(dest="rm_cmd", required=True)
    sp = rmsub.add_parser("pack")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--pattern", required=True)
    sp = rmsub.add_parser("uniformize")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--packing", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp = rmsub.add_parser("count-c5")
    sp.add_argument("--graph", required=True)
    sp = rmsub.add_parser("count-p4")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--parts", required=True)
    sp = rmsub.add_parser("dense-core")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--delta", type=float, default=0.01)
    sp.add_argument("--seed", type=int, default=0)
    rmp.set_defaults(func=cmd_removal)

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValidationError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        return _fail_usage(str(exc))
    except CyceqError as exc:
        return _fail_usage(str(exc))


if __name__ == "__main__":
    sys.exit(main())
