"""Command line front end.

Results go to stdout, diagnostics to stderr.  Exit status 0 means success
or a passed check, 1 means a check or verification came out negative, and
2 means the input could not be used.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import graphio
from .compelled import compelled_ancestors, min_ancestor_dag
from .constraint import (
    build_system,
    simulate_compatible_conditional,
    simulate_generic_conditional,
    solve_membership,
)
from .equivalence import NoExtension, cpdag_of, enumerate_class, same_class
from .graphs import Dag, GraphError, induced_subgraph
from .graphio import ParseError, ParsedGraph
from .models import random_bn
from .reduction import (
    SelectionProblem,
    random_selection_problem,
    reduce_full,
    restrict_to_ancestors,
    shm_membership_check,
    shm_of,
)
from .tables import JointTable, chained_condition_gap
from .witnesses import (
    ancestor_join_witness,
    ancestor_split_witness,
    nested_absorb_witness,
    nested_expand_witness,
    parent_conditioning_reverse_witness,
    parent_conditioning_witness,
    selection_sink_witness,
)

LAWS = ("lemma1", "lemma3", "lemma4", "thm1", "thm7", "shm", "lauritzen")
DEFAULT_TOL = {law: 1e-10 for law in LAWS}
DEFAULT_TOL["shm"] = 1e-8
DEFAULT_TOL["lauritzen"] = 1e-8
GENERATED_LAWS = ("lemma1", "lemma4", "lauritzen")


class CliError(Exception):
    """Unusable input; maps to exit status 2."""


def _load(name: str) -> ParsedGraph:
    path = Path(name)
    if path.is_file():
        if path.suffix == ".json":
            return graphio.load_graph_json(path)
        return graphio.load_graph(path)
    base = name[:-len(".graph")] if name.endswith(".graph") else name
    if base in graphio.list_fixtures():
        return graphio.load_fixture(base)
    raise CliError(f"no file or bundled graph named {name!r}; "
                   f"bundled: {', '.join(graphio.list_fixtures())}")


def _targets(raw: str, pg: ParsedGraph):
    names = [t for t in raw.split(",") if t]
    if not names:
        raise CliError("no targets given")
    unknown = set(names) - set(pg.names)
    if unknown:
        raise CliError(f"unknown targets: {sorted(unknown)}")
    return names


def _representative(pg: ParsedGraph):
    """Undirected edges mean the input already names a class; a plain DAG
    stands for the class containing it."""
    if pg.undirected:
        return pg.to_pdag()
    return cpdag_of(pg.to_dag())


def _print_json(obj, compact=False):
    if compact:
        print(json.dumps(obj, separators=(",", ":"), sort_keys=True))
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def _edge_lines(directed, undirected=()):
    return ([f"{a} -> {b}" for a, b in sorted(directed)]
            + [f"{a} -- {b}" for a, b in sorted(undirected)])


def cmd_cpdag(args) -> int:
    pg = _load(args.graph)
    rep = cpdag_of(pg.to_dag())
    out = ParsedGraph(pg.node_decls, tuple(sorted(rep.directed_edges)),
                      tuple(sorted(rep.undirected_edges)))
    if args.format == "json":
        _print_json(graphio.to_json_dict(out))
    elif args.format == "dot":
        print(graphio.to_dot(rep), end="")
    else:
        print("\n".join(_edge_lines(rep.directed_edges, rep.undirected_edges)))
    return 0


def cmd_same_class(args) -> int:
    a = _load(args.graph).to_dag()
    b = _load(args.other).to_dag()
    equivalent = same_class(a, b)
    if args.format == "json":
        _print_json({"equivalent": equivalent})
    else:
        print("equivalent" if equivalent else "different")
    return 0 if equivalent else 1


def cmd_enumerate(args) -> int:
    pg = _load(args.graph)
    members = enumerate_class(_representative(pg))
    if args.format == "json":
        _print_json({
            "count": len(members),
            "members": [[list(e) for e in sorted(m.edges)] for m in members],
        })
    else:
        for i, m in enumerate(members, start=1):
            edges = " ".join(f"{a}->{b}" for a, b in sorted(m.edges))
            print(f"member {i}: {edges}")
        print(f"count: {len(members)}")
    return 0


def cmd_compelled(args) -> int:
    pg = _load(args.graph)
    targets = _targets(args.targets, pg)
    result = compelled_ancestors(_representative(pg), targets)
    if args.format == "json":
        _print_json({
            "A": sorted(result.ancestors_in_cpdag),
            "U": sorted(result.interior_nodes),
            "compelled": sorted(result.compelled),
        }, compact=True)
    else:
        print("A:", " ".join(sorted(result.ancestors_in_cpdag)))
        print("U:", " ".join(sorted(result.interior_nodes)))
        print("compelled:", " ".join(sorted(result.compelled)))
        print("proper:", " ".join(sorted(result.proper(targets))))
    return 0


def cmd_min_ancestor_dag(args) -> int:
    pg = _load(args.graph)
    targets = _targets(args.targets, pg)
    dag = min_ancestor_dag(_representative(pg), targets)
    if args.format == "json":
        out = ParsedGraph(pg.node_decls, tuple(sorted(dag.edges)), ())
        _print_json(graphio.to_json_dict(out))
    elif args.format == "dot":
        print(graphio.to_dot(dag), end="")
    else:
        print("\n".join(_edge_lines(dag.edges)))
    return 0


def cmd_reduce(args) -> int:
    sp = SelectionProblem.from_parsed(_load(args.graph))
    report = reduce_full(sp, use_compelled=args.use_compelled)
    final = report.final
    rest = report.conditional_part
    if args.format == "json":
        _print_json({
            "steps": [{
                "rule": s.rule,
                "description": s.description,
                "removed_nodes": list(s.removed_nodes),
                "removed_edges": [list(e) for e in s.removed_edges],
            } for s in report.steps],
            "final": {
                "observed": list(final.observed),
                "selection": list(final.selection),
                "values": final.values,
                "edges": [list(e) for e in sorted(final.graph.edges)],
            },
            "conditional_part": {
                "random": list(rest.random_nodes),
                "fixed": list(rest.fixed_nodes),
                "edges": [list(e) for e in sorted(rest.edges)],
            },
            "conditioning_target":
                list(report.conditioning_target)
                if report.conditioning_target is not None else None,
        })
    else:
        for i, s in enumerate(report.steps, start=1):
            extra = ""
            if s.removed_nodes:
                extra = " (nodes: " + " ".join(s.removed_nodes) + ")"
            if s.removed_edges:
                extra = (" (edges: "
                         + " ".join(f"{a}->{b}" for a, b in s.removed_edges)
                         + ")")
            print(f"step {i} [{s.rule}]: {s.description}{extra}")
        print("final observed:", " ".join(final.observed) or "-")
        print("final selection:", " ".join(final.selection) or "-")
        for line in _edge_lines(final.graph.edges):
            print("final edge:", line)
        print("conditional part random:", " ".join(rest.random_nodes) or "-")
        print("conditional part fixed:", " ".join(rest.fixed_nodes) or "-")
        for line in _edge_lines(rest.edges):
            print("conditional part edge:", line)
        if report.conditioning_target is not None:
            print("conditioning target:",
                  " ".join(report.conditioning_target) or "-")
    return 0


def cmd_shm(args) -> int:
    sp = SelectionProblem.from_parsed(_load(args.graph))
    model = shm_of(sp)
    if args.format == "json":
        _print_json({
            "variables": [[n, c] for n, c in model.variables],
            "generators": [sorted(g) for g in model.generators],
        })
    else:
        print("variables:", " ".join(n for n, _ in model.variables))
        for g in model.generators:
            print("generator:", " ".join(sorted(g)))
    return 0


def _fixture_problem(name: str) -> SelectionProblem:
    return SelectionProblem.from_parsed(graphio.load_fixture(name))


def _law_lemma1(args):
    gaps = []
    for t in range(args.trials):
        rng = np.random.default_rng(args.seed + t)
        cells = rng.dirichlet(np.ones(16))
        p = JointTable([("A", 2), ("B", 2), ("C", 2), ("D", 2)], cells)
        gaps.append((f"{t}", chained_condition_gap(
            p, ["A", "B"],
            {"C": int(rng.integers(2))}, {"D": int(rng.integers(2))})))
    return gaps


def _law_lemma3(args):
    if args.graph:
        sp = SelectionProblem.from_parsed(_load(args.graph))
    else:
        pg = graphio.load_fixture("fig1")
        graph = Dag(pg.names, list(pg.directed) + [("S1", "O3")])
        sp = SelectionProblem(graph, pg.observed_nodes, pg.selection_nodes,
                              pg.selection_values(), pg.cardinalities())
    gaps = []
    for t in range(args.trials):
        bn = random_bn(sp.graph, sp.cardinalities, seed=args.seed + t,
                       positivity_floor=args.floor)
        gaps.append((f"{t}", selection_sink_witness(sp, bn).max_gap))
    return gaps


def _lemma4_problem() -> SelectionProblem:
    # One extra sink under O2 alone, nested inside S1's parents {O1, O2}.
    pg = graphio.load_fixture("fig1")
    graph = Dag(list(pg.names) + ["S4"],
                list(pg.directed) + [("O2", "S4")])
    values = pg.selection_values()
    values["S4"] = 0
    cards = pg.cardinalities()
    cards["S4"] = 2
    return SelectionProblem(graph, pg.observed_nodes,
                            list(pg.selection_nodes) + ["S4"], values, cards)


def _law_lemma4(args):
    sp = _lemma4_problem()
    reduced_graph = induced_subgraph(
        sp.graph, [v for v in sp.graph.nodes if v != "S4"])
    gaps = []
    for t in range(args.trials):
        reduced_bn = random_bn(reduced_graph, sp.cardinalities,
                               seed=args.seed + t,
                               positivity_floor=args.floor)
        w = nested_expand_witness(sp, "S4", reduced_bn)
        gaps.append((f"{t}-expand", w.max_gap))
        full_bn = random_bn(sp.graph, sp.cardinalities,
                            seed=args.seed + 10_000 + t,
                            positivity_floor=args.floor)
        w = nested_absorb_witness(sp, "S4", "S1", full_bn)
        gaps.append((f"{t}-absorb", w.max_gap))
    return gaps


def _law_thm1(args):
    sp = (SelectionProblem.from_parsed(_load(args.graph))
          if args.graph else _fixture_problem("fig3a"))
    core, rest, _ = restrict_to_ancestors(sp)
    gaps = []
    for t in range(args.trials):
        bn = random_bn(sp.graph, sp.cardinalities, seed=args.seed + t,
                       positivity_floor=args.floor)
        gaps.append((f"{t}-split", ancestor_split_witness(sp, bn).max_gap))
        core_bn = random_bn(core.graph, sp.cardinalities,
                            seed=args.seed + 10_000 + t,
                            positivity_floor=args.floor)
        rest_bn = random_bn(rest, sp.cardinalities,
                            seed=args.seed + 20_000 + t,
                            positivity_floor=args.floor)
        w = ancestor_join_witness(sp, core_bn, rest_bn)
        gaps.append((f"{t}-join", w.max_gap))
    return gaps


def _law_thm7(args):
    sp = (SelectionProblem.from_parsed(_load(args.graph))
          if args.graph else _fixture_problem("fig2"))
    s = sp.selection[0]
    parents = sorted(sp.graph.parents_of(s))
    observed_graph = induced_subgraph(sp.graph, sp.observed)
    gaps = []
    for t in range(args.trials):
        bn = random_bn(sp.graph, sp.cardinalities, seed=args.seed + t,
                       positivity_floor=args.floor)
        w = parent_conditioning_witness(sp, bn)
        gaps.append((f"{t}-strata", w.max_gap))
        obs_bn = random_bn(observed_graph, sp.cardinalities,
                           seed=args.seed + 10_000 + t,
                           positivity_floor=args.floor)
        rng = np.random.default_rng(args.seed + 20_000 + t)
        size = int(np.prod([sp.cardinalities[p] for p in parents]))
        marginal = JointTable([(p, sp.cardinalities[p]) for p in parents],
                              rng.dirichlet(np.ones(size)))
        w = parent_conditioning_reverse_witness(sp, obs_bn, marginal)
        gaps.append((f"{t}-retarget", w.max_gap))
    return gaps


def _law_shm(args):
    sp = (SelectionProblem.from_parsed(_load(args.graph))
          if args.graph else _fixture_problem("fig1"))
    check = shm_membership_check(sp, trials=args.trials, seed=args.seed,
                                 positivity_floor=args.floor)
    return [(f"{t}", kl) for t, kl in enumerate(check.kls)]


def _law_lauritzen(args):
    gaps = []
    for t in range(args.trials):
        sp = random_selection_problem(args.seed + t)
        check = shm_membership_check(sp, trials=1,
                                     seed=args.seed + 50_000 + t,
                                     positivity_floor=args.floor)
        gaps.append((f"{t}", check.kls[0]))
    return gaps


LAW_RUNNERS = {
    "lemma1": _law_lemma1,
    "lemma3": _law_lemma3,
    "lemma4": _law_lemma4,
    "thm1": _law_thm1,
    "thm7": _law_thm7,
    "shm": _law_shm,
    "lauritzen": _law_lauritzen,
}


def cmd_verify(args) -> int:
    if args.graph and args.law in GENERATED_LAWS:
        raise CliError(f"law {args.law} runs on generated instances; "
                       "it does not accept --graph")
    tol = args.tol if args.tol is not None else DEFAULT_TOL[args.law]
    labeled = LAW_RUNNERS[args.law](args)
    gaps = [g for _, g in labeled]
    worst = max(gaps) if gaps else 0.0
    passed = worst <= tol
    if args.report_dir:
        from . import report
        base = Path(args.report_dir)
        report.write_rows(base / f"verify_{args.law}.csv",
                          ["law", "instance", "gap"],
                          [(args.law, label, f"{g:.3e}")
                           for label, g in labeled])
        report.gap_chart(base / f"verify_{args.law}.png", gaps,
                         title=f"verify {args.law}",
                         ylabel="max abs gap", threshold=tol)
        print(f"wrote {base / f'verify_{args.law}.csv'} and "
              f"{base / f'verify_{args.law}.png'}", file=sys.stderr)
    print(f"law={args.law} trials={args.trials} instances={len(gaps)} "
          f"max_gap={worst:.3e} tol={tol:g} "
          f"{'PASS' if passed else 'FAIL'}")
    return 0 if passed else 1


def cmd_constraint_check(args) -> int:
    with open(args.table) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        if "conditional" not in data:
            raise CliError("JSON object needs a 'conditional' entry")
        data = data["conditional"]
    try:
        verdict = solve_membership(build_system(np.asarray(data, dtype=float)))
    except ValueError as e:
        raise CliError(str(e)) from None
    if args.format == "json":
        _print_json({
            "consistent": verdict.consistent,
            "roots": list(verdict.roots),
            "resultant": verdict.resultant,
            "tolerance": verdict.tolerance,
            "note": verdict.note,
        })
    else:
        print("consistent:", "yes" if verdict.consistent else "no")
        print("roots:", " ".join(f"{r:.10f}" for r in verdict.roots) or "-")
        print(f"resultant: {verdict.resultant:.3e}")
        print("note:", verdict.note)
    return 0 if verdict.consistent else 1


def cmd_constraint_demo(args) -> int:
    rows = []
    root_errors = []
    truths, recovered = [], []
    compatible_ok = 0
    for t in range(args.trials):
        q, truth = simulate_compatible_conditional(
            args.seed + t, positivity_floor=args.floor)
        verdict = solve_membership(build_system(q))
        err = (min(abs(r - truth) for r in verdict.roots)
               if verdict.roots else float("nan"))
        compatible_ok += verdict.consistent
        if verdict.consistent:
            root_errors.append(err)
            truths.append(truth)
            recovered.append(min(verdict.roots, key=lambda r: abs(r - truth)))
        rows.append(("compatible", args.seed + t, f"{truth:.10f}",
                     f"{err:.3e}", verdict.consistent,
                     f"{verdict.resultant:.3e}"))
    generic_consistent = 0
    for t in range(args.trials):
        q = simulate_generic_conditional(args.seed + 90_000 + t)
        verdict = solve_membership(build_system(q))
        generic_consistent += verdict.consistent
        rows.append(("generic", args.seed + 90_000 + t, "-", "-",
                     verdict.consistent, f"{verdict.resultant:.3e}"))
    if args.report_dir:
        from . import report
        base = Path(args.report_dir)
        report.write_rows(
            base / "constraint_demo.csv",
            ["kind", "seed", "truth", "root_error", "consistent", "resultant"],
            rows)
        report.recovery_chart(base / "constraint_demo_recovery.png",
                              truths, recovered,
                              title="stratum weight recovery")
        report.verdict_chart(
            base / "constraint_demo_verdicts.png",
            ["compatible", "generic"],
            [compatible_ok / args.trials, generic_consistent / args.trials],
            title="membership verdicts")
        print(f"wrote 3 files under {base}", file=sys.stderr)
    max_err = max(root_errors) if root_errors else float("nan")
    print(f"compatible: {compatible_ok}/{args.trials} consistent, "
          f"max root error {max_err:.3e}")
    print(f"generic: {generic_consistent}/{args.trials} consistent")
    healthy = (compatible_ok == args.trials
               and generic_consistent <= args.trials // 2)
    return 0 if healthy else 1


def cmd_export_dot(args) -> int:
    pg = _load(args.graph)
    highlight = [d.name for d in pg.node_decls if d.role is not None]
    text = graphio.to_dot(pg.to_pdag(), highlight=highlight)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(text, end="")
    return 0


def _add_format(sub, choices=("text", "json")):
    sub.add_argument("--format", choices=choices, default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnselect",
        description="Equivalence classes, compelled ancestors, and "
                    "selection-problem reduction for categorical networks.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("cpdag", help="completed representative of a DAG's class")
    p.add_argument("--graph", required=True)
    _add_format(p, ("text", "json", "dot"))
    p.set_defaults(func=cmd_cpdag)

    p = subs.add_parser("same-class", help="are two DAGs Markov equivalent")
    p.add_argument("--graph", required=True)
    p.add_argument("--other", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_same_class)

    p = subs.add_parser("enumerate", help="every member of a class")
    p.add_argument("--graph", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_enumerate)

    p = subs.add_parser("compelled-ancestors",
                        help="ancestors of the targets in every member")
    p.add_argument("--graph", required=True)
    p.add_argument("--targets", required=True,
                   help="comma separated node names")
    _add_format(p)
    p.set_defaults(func=cmd_compelled)

    p = subs.add_parser("min-ancestor-dag",
                        help="member with the fewest ancestors of the targets")
    p.add_argument("--graph", required=True)
    p.add_argument("--targets", required=True)
    _add_format(p, ("text", "json", "dot"))
    p.set_defaults(func=cmd_min_ancestor_dag)

    p = subs.add_parser("reduce", help="shrink a selection problem")
    p.add_argument("--graph", required=True)
    p.add_argument("--use-compelled", action="store_true",
                   help="also reorient to the minimal-ancestor member")
    _add_format(p)
    p.set_defaults(func=cmd_reduce)

    p = subs.add_parser("shm", help="hierarchical model of the conditioned "
                                    "observed nodes")
    p.add_argument("--graph", required=True)
    _add_format(p)
    p.set_defaults(func=cmd_shm)

    p = subs.add_parser("verify", help="numeric spot checks of the laws")
    p.add_argument("--law", choices=LAWS, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--graph", default=None)
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("constraint-check",
                        help="shared-root membership test for a stratified "
                             "conditional")
    p.add_argument("--table", required=True,
                   help="JSON with a (2,2,2,2) nested list, stratum last")
    _add_format(p)
    p.set_defaults(func=cmd_constraint_check)

    p = subs.add_parser("constraint-demo",
                        help="recovery on compatible families, rejection on "
                             "generic ones")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor", type=float, default=0.1)
    p.add_argument("--report-dir", default=None)
    p.set_defaults(func=cmd_constraint_demo)

    p = subs.add_parser("export-dot", help="write a graph as graphviz text")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except NoExtension as e:
        print(f"no extension: {e}", file=sys.stderr)
        return 1
    except (CliError, ParseError, GraphError, FileNotFoundError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
