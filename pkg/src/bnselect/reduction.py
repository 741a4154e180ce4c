"""Shrinking a selection problem without changing what it can express.

A selection problem is a DAG over observed and selection nodes together
with one pinned state per selection node; its meaning is the set of
distributions of the observed nodes obtainable by conditioning some
network on those states.  Each rule here replaces the problem by a
smaller one with the same expressible set, and `reduce_full` chains them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compelled import min_ancestor_dag
from .equivalence import cpdag_of
from .graphs import ConditionalDag, Dag, GraphError, ancestors, fix, induced_subgraph
from .models import (
    CategoricalBn,
    HierarchicalSpec,
    ipf_fit,
    joint_of,
    random_bn,
)
from .tables import CondTable, condition, kl_divergence


class SelectionProblem:
    """A DAG over observed plus selection nodes, with pinned selection states."""

    __slots__ = ("_graph", "_observed", "_selection", "_values", "_cards")

    def __init__(self, graph: Dag, observed, selection, values: dict,
                 cardinalities: dict):
        self._graph = graph
        self._observed = tuple(observed)
        self._selection = tuple(selection)
        both = set(self._observed) & set(self._selection)
        if both:
            raise GraphError(f"nodes both observed and selection: {sorted(both)}")
        if set(self._observed) | set(self._selection) != set(graph.nodes):
            raise GraphError("observed and selection must partition the nodes")
        if set(values) != set(self._selection):
            raise GraphError("need exactly one pinned state per selection node")
        missing = set(graph.nodes) - set(cardinalities)
        if missing:
            raise GraphError(f"no cardinality for: {sorted(missing)}")
        self._cards = {v: int(cardinalities[v]) for v in cardinalities}
        for s, val in values.items():
            if not 0 <= int(val) < self._cards[s]:
                raise GraphError(f"state {val} out of range for {s}")
        self._values = {s: int(v) for s, v in values.items()}

    @classmethod
    def from_parsed(cls, pg) -> "SelectionProblem":
        if any(d.role == "conditioning" for d in pg.node_decls):
            raise GraphError("conditioning nodes have no place here")
        if not pg.selection_nodes:
            raise GraphError("no selection nodes declared")
        return cls(pg.to_dag(), pg.observed_nodes, pg.selection_nodes,
                   pg.selection_values(), pg.cardinalities())

    @property
    def graph(self) -> Dag:
        return self._graph

    @property
    def observed(self):
        return self._observed

    @property
    def selection(self):
        return self._selection

    @property
    def values(self) -> dict:
        return dict(self._values)

    @property
    def cardinalities(self) -> dict:
        return dict(self._cards)

    def replace(self, graph=None, observed=None, selection=None,
                values=None) -> "SelectionProblem":
        return SelectionProblem(
            graph if graph is not None else self._graph,
            observed if observed is not None else self._observed,
            selection if selection is not None else self._selection,
            values if values is not None else self._values,
            self._cards,
        )

    def __repr__(self):
        return (f"SelectionProblem(observed={list(self._observed)!r}, "
                f"selection={list(self._selection)!r})")


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    description: str
    removed_nodes: tuple = ()
    removed_edges: tuple = ()


@dataclass(frozen=True)
class ReductionReport:
    initial: SelectionProblem
    steps: tuple
    final: SelectionProblem
    conditional_part: ConditionalDag
    conditioning_target: tuple | None


def drop_selection_out_edges(sp: SelectionProblem):
    """Make every selection node a sink; children absorb the pinned state."""
    sel = set(sp.selection)
    removed = tuple(sorted(e for e in sp.graph.edges if e[0] in sel))
    if not removed:
        return sp, ()
    keep = [e for e in sp.graph.edges if e[0] not in sel]
    return sp.replace(graph=Dag(sp.graph.nodes, keep)), removed


def _nested_pair(sp: SelectionProblem):
    # First applicable (drop, retain) pair in sorted order; the node with
    # the smaller parent set goes, names break exact ties.
    g = sp.graph
    sinks = [s for s in sorted(sp.selection) if not g.children_of(s)]
    for a in sinks:
        for b in sinks:
            if a >= b:
                continue
            pa, pb = g.parents_of(a), g.parents_of(b)
            if pa < pb:
                return a, b
            if pb < pa:
                return b, a
            if pa == pb:
                return b, a
    return None


def drop_nested_selection(sp: SelectionProblem):
    """Remove selection sinks whose parents are covered by another's.

    The survivor can fold the dropped node's acceptance probability into
    its own table, so nothing expressible is lost.
    """
    dropped = []
    while True:
        pair = _nested_pair(sp)
        if pair is None:
            return sp, tuple(dropped)
        drop, retain = pair
        keep_nodes = [v for v in sp.graph.nodes if v != drop]
        values = sp.values
        values.pop(drop)
        sp = sp.replace(
            graph=induced_subgraph(sp.graph, keep_nodes),
            selection=tuple(s for s in sp.selection if s != drop),
            values=values,
        )
        dropped.append((drop, retain))


def restrict_to_ancestors(sp: SelectionProblem):
    """Split off the part of the graph that cannot influence the selection.

    Returns the problem induced on the ancestors of the selection nodes,
    plus the leftover observed graph with the retained observed nodes
    fixed.  Selection nodes must already be sinks.
    """
    for s in sp.selection:
        if sp.graph.children_of(s):
            raise GraphError(f"selection node {s} still has children; "
                             "drop its outgoing edges first")
    anc = ancestors(sp.graph, sp.selection)
    removed = tuple(sorted(set(sp.graph.nodes) - anc))
    core = sp.replace(
        graph=induced_subgraph(sp.graph, anc),
        observed=tuple(o for o in sp.observed if o in anc),
    )
    observed_graph = induced_subgraph(sp.graph, sp.observed)
    rest = fix(observed_graph, sorted(anc - set(sp.selection)))
    return core, rest, removed


def reduce_full(sp: SelectionProblem, use_compelled=False) -> ReductionReport:
    """Apply every rule once, in the order that keeps each one sound."""
    initial = sp
    steps = []
    sp, removed_edges = drop_selection_out_edges(sp)
    if removed_edges:
        steps.append(ReductionStep(
            "selection-sinks",
            "dropped edges leaving selection nodes",
            removed_edges=removed_edges))
    sp, nested = drop_nested_selection(sp)
    for drop, retain in nested:
        steps.append(ReductionStep(
            "nested-selection",
            f"{drop} absorbed into {retain}",
            removed_nodes=(drop,)))
    if use_compelled:
        member = min_ancestor_dag(cpdag_of(sp.graph), sp.selection)
        if member.edges != sp.graph.edges:
            steps.append(ReductionStep(
                "reorient-minimal",
                "swapped in the equivalent graph with the fewest "
                "ancestors of the selection nodes"))
            sp = sp.replace(graph=member)
    core, rest, removed_nodes = restrict_to_ancestors(sp)
    if removed_nodes:
        steps.append(ReductionStep(
            "ancestors",
            "kept only ancestors of the selection nodes",
            removed_nodes=removed_nodes))
    conditioning_target = None
    if len(core.selection) == 1:
        s = core.selection[0]
        conditioning_target = tuple(sorted(core.graph.parents_of(s)))
        steps.append(ReductionStep(
            "single-selection-conditioning",
            "conditioning the observed nodes on "
            + (" ".join(conditioning_target) or "nothing")
            + " recovers the unselected conditional"))
    return ReductionReport(
        initial=initial,
        steps=tuple(steps),
        final=core,
        conditional_part=rest,
        conditioning_target=conditioning_target,
    )


def shm_of(sp: SelectionProblem) -> HierarchicalSpec:
    """The hierarchical model the conditioned observed nodes must obey.

    One interaction set per node: its observed family, meaning the node
    itself (when observed) together with its observed parents.
    """
    obs = set(sp.observed)
    fams = []
    for x in sp.observed:
        fams.append(frozenset({x} | (set(sp.graph.parents_of(x)) & obs)))
    for s in sp.selection:
        fam = frozenset(set(sp.graph.parents_of(s)) & obs)
        if fam:
            fams.append(fam)
    gens = [f for f in set(fams)
            if not any(f < g for g in fams)]
    variables = [(o, sp.cardinalities[o]) for o in sp.observed]
    return HierarchicalSpec(tuple(variables), tuple(sorted(gens, key=sorted)))


def hm_to_selection_bn(spec: HierarchicalSpec, selected_state=1):
    """A selection problem plus network whose conditioned law is the model.

    Observed nodes are uniform sources; each generator gets one binary
    sink accepting with probability factor / max(factor).  Conditioning
    the network on every sink being in `selected_state` reproduces the
    normalized factor product.
    """
    if spec.factors is None:
        raise ValueError("the model carries no factors to encode")
    obs_names = [n for n, _ in spec.variables]
    cards = {n: c for n, c in spec.variables}
    sink_names = []
    for i in range(len(spec.generators)):
        name = f"S{i + 1}"
        while name in cards or name in sink_names:
            name = name + "_"
        sink_names.append(name)
    edges = []
    cpts = {}
    for n, c in spec.variables:
        cpts[n] = CondTable((), ((n, c),), np.full(c, 1.0 / c))
    values = {}
    for i, name in enumerate(sink_names):
        gen_vars = spec.generator_variables(i)
        phi = spec.factors[i]
        accept = phi / phi.max()
        if selected_state == 1:
            table = np.stack([1.0 - accept, accept], axis=-1)
        else:
            table = np.stack([accept, 1.0 - accept], axis=-1)
        cpts[name] = CondTable(gen_vars, ((name, 2),), table)
        cards[name] = 2
        values[name] = selected_state
        edges.extend((v, name) for v, _ in gen_vars)
    graph = Dag(obs_names + sink_names, edges)
    sp = SelectionProblem(graph, obs_names, sink_names, values, cards)
    return sp, CategoricalBn(graph, cards, cpts)


@dataclass(frozen=True)
class MembershipCheck:
    kls: tuple
    max_kl: float


def shm_membership_check(sp: SelectionProblem, trials=20, seed=0,
                         positivity_floor=0.05, fit_tol=1e-10) -> MembershipCheck:
    """Condition random positive networks and fit the claimed model."""
    model = shm_of(sp)
    kls = []
    for t in range(trials):
        bn = random_bn(sp.graph, sp.cardinalities, seed=seed + t,
                       positivity_floor=positivity_floor)
        cond = condition(joint_of(bn), sp.observed, sp.values)
        fit = ipf_fit(cond, model, tol=fit_tol)
        kls.append(kl_divergence(cond, fit.table))
    return MembershipCheck(tuple(kls), max(kls) if kls else 0.0)


def random_selection_problem(seed, n_observed=4, n_selection=2,
                             edge_prob=0.4, cardinality=2) -> SelectionProblem:
    """A reproducible random problem with selection sinks."""
    rng = np.random.default_rng(seed)
    obs = [f"O{i + 1}" for i in range(n_observed)]
    sel = [f"S{i + 1}" for i in range(n_selection)]
    edges = []
    for i in range(n_observed):
        for j in range(i + 1, n_observed):
            if rng.random() < edge_prob:
                edges.append((obs[i], obs[j]))
    for s in sel:
        k = int(rng.integers(1, n_observed + 1))
        parents = rng.choice(n_observed, size=k, replace=False)
        edges.extend((obs[int(p)], s) for p in sorted(parents))
    cards = {v: cardinality for v in obs + sel}
    values = {s: int(rng.integers(cardinality)) for s in sel}
    return SelectionProblem(Dag(obs + sel, edges), obs, sel, values, cards)
