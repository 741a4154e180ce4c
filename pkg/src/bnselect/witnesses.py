"""Constructive checks that each reduction rule preserves expressibility.

Every function here takes concrete networks, rebuilds them on the other
side of one rule, and reports how far the two conditioned distributions
actually are.  A sound rule must drive every gap to rounding error; the
builders never enforce that themselves, callers assert on `max_gap`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import GraphError, induced_subgraph
from .models import CategoricalBn, joint_of
from .reduction import (
    SelectionProblem,
    drop_selection_out_edges,
    restrict_to_ancestors,
)
from .tables import (
    CondTable,
    JointTable,
    assignments,
    chain,
    condition,
    conditional_from_joint,
    max_abs_diff,
)


@dataclass(frozen=True)
class Witness:
    built: object
    gaps: dict

    @property
    def max_gap(self) -> float:
        return max(self.gaps.values())


def _conditioned(sp: SelectionProblem, bn: CategoricalBn) -> JointTable:
    return condition(joint_of(bn), sp.observed, sp.values)


def selection_sink_witness(sp: SelectionProblem, bn: CategoricalBn) -> Witness:
    """Cutting the edges out of selection nodes changes nothing observed.

    Each child of a selection node absorbs the cut by pinning that parent
    to its selected state inside its own table.
    """
    reduced, removed = drop_selection_out_edges(sp)
    cpts = {}
    for v in sp.graph.nodes:
        lost = sp.graph.parents_of(v) - reduced.graph.parents_of(v)
        cpt = bn.cpt(v)
        if lost:
            cpt = cpt.restrict({s: sp.values[s] for s in lost})
        cpts[v] = cpt
    rebuilt = CategoricalBn(reduced.graph, sp.cardinalities, cpts)
    gap = max_abs_diff(_conditioned(reduced, rebuilt), _conditioned(sp, bn))
    return Witness(rebuilt, {"conditioned": gap})


def _drop_node_problem(sp: SelectionProblem, drop: str) -> SelectionProblem:
    values = sp.values
    values.pop(drop)
    return sp.replace(
        graph=induced_subgraph(sp.graph, [v for v in sp.graph.nodes
                                          if v != drop]),
        selection=tuple(s for s in sp.selection if s != drop),
        values=values,
    )


def nested_expand_witness(sp: SelectionProblem, drop: str,
                          reduced_bn: CategoricalBn) -> Witness:
    """A dropped selection sink can be re-added as an always-true filter."""
    if drop not in sp.selection:
        raise GraphError(f"{drop} is not a selection node")
    if sp.graph.children_of(drop):
        raise GraphError(f"{drop} is not a sink")
    reduced = _drop_node_problem(sp, drop)
    if set(reduced_bn.graph.nodes) != set(reduced.graph.nodes):
        raise GraphError("network does not match the reduced problem")
    card = sp.cardinalities[drop]
    parents = [v for v in sp.graph.nodes if v in sp.graph.parents_of(drop)]
    given = [(u, sp.cardinalities[u]) for u in parents]
    one_hot = np.zeros([c for _, c in given] + [card])
    one_hot[..., sp.values[drop]] = 1.0
    cpts = dict(reduced_bn.cpts)
    cpts[drop] = CondTable(given, ((drop, card),), one_hot)
    rebuilt = CategoricalBn(sp.graph, sp.cardinalities, cpts)
    gap = max_abs_diff(_conditioned(sp, rebuilt),
                       _conditioned(reduced, reduced_bn))
    return Witness(rebuilt, {"conditioned": gap})


def nested_absorb_witness(sp: SelectionProblem, drop: str, retain: str,
                          bn: CategoricalBn) -> Witness:
    """A nested selection sink folds into the one whose parents cover its own.

    The survivor's acceptance probability becomes the product of both
    acceptance probabilities; leftover mass spreads evenly over its other
    states.
    """
    for s in (drop, retain):
        if s not in sp.selection:
            raise GraphError(f"{s} is not a selection node")
        if sp.graph.children_of(s):
            raise GraphError(f"{s} is not a sink")
    pa_drop = sp.graph.parents_of(drop)
    pa_keep = sp.graph.parents_of(retain)
    if not pa_drop <= pa_keep:
        raise GraphError(f"parents of {drop} are not inside parents of {retain}")
    reduced = _drop_node_problem(sp, drop)

    keep_cpt = bn.cpt(retain)
    drop_cpt = bn.cpt(drop)
    accept_keep = keep_cpt.values[..., sp.values[retain]]
    accept_drop = drop_cpt.values[..., sp.values[drop]]
    letters = {n: chr(ord("a") + i)
               for i, n in enumerate(keep_cpt.given_names)}
    sub_keep = "".join(letters.values())
    sub_drop = "".join(letters[n] for n in drop_cpt.given_names)
    merged = np.einsum(f"{sub_keep},{sub_drop}->{sub_keep}",
                       accept_keep, accept_drop)
    card = sp.cardinalities[retain]
    table = np.repeat(((1.0 - merged) / (card - 1))[..., None], card, axis=-1)
    table[..., sp.values[retain]] = merged

    cpts = {v: bn.cpt(v) for v in reduced.graph.nodes if v != retain}
    cpts[retain] = CondTable(keep_cpt.given_variables, ((retain, card),), table)
    rebuilt = CategoricalBn(reduced.graph, sp.cardinalities, cpts)
    gap = max_abs_diff(_conditioned(reduced, rebuilt), _conditioned(sp, bn))
    return Witness(rebuilt, {"conditioned": gap})


def ancestor_split_witness(sp: SelectionProblem, bn: CategoricalBn) -> Witness:
    """The conditioned law factorizes across the ancestor boundary.

    The ancestor part keeps its tables and reproduces the conditioned
    marginal; the rest keeps its tables with the boundary fixed and
    reproduces the conditional of the remaining nodes, which the
    selection states cannot reach.
    """
    core, rest, _ = restrict_to_ancestors(sp)
    core_bn = CategoricalBn(core.graph, sp.cardinalities,
                            {v: bn.cpt(v) for v in core.graph.nodes})
    rest_bn = CategoricalBn(rest, sp.cardinalities,
                            {v: bn.cpt(v) for v in rest.random_nodes})
    full = _conditioned(sp, bn)
    core_cond = _conditioned(core, core_bn)
    gap_core = max_abs_diff(core_cond, full.marginal(core.observed))

    rest_cond = joint_of(rest_bn)
    boundary = [(n, sp.cardinalities[n]) for n in rest_cond.given_names]
    outside = list(rest_cond.over_names)
    full_joint = joint_of(bn)
    gap_rest = 0.0
    for a in assignments(boundary):
        observed_slice = condition(full_joint, outside, {**sp.values, **a})
        gap_rest = max(gap_rest, max_abs_diff(rest_cond.at(a), observed_slice))

    gap_product = max_abs_diff(chain(core_cond.reorder(rest_cond.given_names),
                                     rest_cond), full)
    return Witness((core_bn, rest_bn), {
        "ancestor_part": gap_core,
        "outside_part": gap_rest,
        "product": gap_product,
    })


def ancestor_join_witness(sp: SelectionProblem, core_bn: CategoricalBn,
                          rest_bn: CategoricalBn) -> Witness:
    """Any ancestor-part law and any outside conditional combine into one
    network on the full graph."""
    core, rest, _ = restrict_to_ancestors(sp)
    if set(core_bn.graph.nodes) != set(core.graph.nodes):
        raise GraphError("core network does not match the ancestor part")
    if rest_bn.graph != rest:
        raise GraphError("outside network does not match the fixed remainder")
    cpts = dict(core_bn.cpts)
    cpts.update(rest_bn.cpts)
    rebuilt = CategoricalBn(sp.graph, sp.cardinalities, cpts)
    core_cond = _conditioned(core, core_bn)
    rest_cond = joint_of(rest_bn)
    expected = chain(core_cond.reorder(rest_cond.given_names), rest_cond)
    gap = max_abs_diff(_conditioned(sp, rebuilt), expected)
    return Witness(rebuilt, {"joined": gap})


def _single_selection(sp: SelectionProblem) -> str:
    if len(sp.selection) != 1:
        raise GraphError("needs exactly one selection node")
    s = sp.selection[0]
    if sp.graph.children_of(s):
        raise GraphError(f"selection node {s} is not a sink")
    return s


def parent_conditioning_witness(sp: SelectionProblem,
                                bn: CategoricalBn) -> Witness:
    """Within each stratum of the selection node's parents, selecting
    changes nothing: the plain observed network already matches."""
    s = _single_selection(sp)
    parents = sorted(sp.graph.parents_of(s))
    observed_graph = induced_subgraph(sp.graph, sp.observed)
    rebuilt = CategoricalBn(observed_graph, sp.cardinalities,
                            {v: bn.cpt(v) for v in sp.observed})
    selected = _conditioned(sp, bn)
    plain = joint_of(rebuilt)
    rest = [o for o in sp.observed if o not in parents]
    gap = 0.0
    for a in assignments([(n, sp.cardinalities[n]) for n in parents]):
        gap = max(gap, max_abs_diff(condition(selected, rest, a),
                                    condition(plain, rest, a)))
    return Witness(rebuilt, {"stratified": gap})


def parent_conditioning_reverse_witness(
        sp: SelectionProblem, obs_bn: CategoricalBn,
        boundary_marginal: JointTable) -> Witness:
    """Any retargeting of the parents' marginal is reachable by selection.

    Given a positive network on the observed graph and a replacement
    marginal for the selection node's parents, one acceptance table makes
    the conditioned law equal the retargeted joint; the acceptance rate
    comes out as large as the ratio bound allows.
    """
    s = _single_selection(sp)
    parents = sorted(sp.graph.parents_of(s))
    observed_graph = induced_subgraph(sp.graph, sp.observed)
    if set(obs_bn.graph.nodes) != set(observed_graph.nodes):
        raise GraphError("network does not match the observed graph")
    if set(boundary_marginal.names) != set(parents):
        raise GraphError(f"marginal must be over {parents}")
    q = joint_of(obs_bn)
    if q.values.min() <= 0.0:
        raise ValueError("needs a strictly positive observed network")

    q_pa = q.marginal(parents).values
    m_pa = boundary_marginal.reorder(parents).values
    ratio = m_pa / q_pa
    scale = 1.0 / ratio.max()
    accept = scale * ratio

    card = sp.cardinalities[s]
    table = np.repeat(((1.0 - accept) / (card - 1))[..., None], card, axis=-1)
    table[..., sp.values[s]] = accept
    given = [(n, sp.cardinalities[n]) for n in parents]
    cpts = dict(obs_bn.cpts)
    cpts[s] = CondTable(given, ((s, card),), table)
    rebuilt = CategoricalBn(sp.graph, sp.cardinalities, cpts)

    target = chain(boundary_marginal.reorder(parents),
                   conditional_from_joint(q, parents))
    joint_r = joint_of(rebuilt)
    gap_cond = max_abs_diff(condition(joint_r, sp.observed, sp.values), target)
    gap_rate = abs(float(joint_r.marginal([s]).values[sp.values[s]]) - scale)
    return Witness(rebuilt, {"conditioned": gap_cond,
                             "acceptance_rate": gap_rate})
