"""Nodes that are ancestors of a target set in every member of a class.

The search never enumerates the class.  Directed ancestry in the class
representative gives a seed set A; a walk along unshielded undirected
paths then picks up every interior node that any member must route
through.  `compelled_ancestors_bruteforce` recomputes the same set by
intersecting ancestor sets over all members and exists as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equivalence import Cpdag, consistent_extension, enumerate_class, same_class
from .graphs import Dag, GraphError, Pdag, ancestors


@dataclass(frozen=True)
class CompelledResult:
    ancestors_in_cpdag: frozenset
    interior_nodes: frozenset
    compelled: frozenset

    def proper(self, targets) -> frozenset:
        return self.compelled - frozenset(targets)


def _as_cpdag(p: Pdag) -> Cpdag:
    if isinstance(p, Cpdag):
        return p
    return Cpdag(p.nodes, p.directed_edges, p.undirected_edges)


def compelled_ancestors(p: Pdag, targets) -> CompelledResult:
    """Ancestors of `targets` common to every member of p's class.

    A node outside the seed set A joins when some unshielded undirected
    path from a seed passes through it and ends in A again: whichever way
    a member orients that path, the node feeds one of its endpoints.
    """
    p = _as_cpdag(p)
    seed = ancestors(p, targets)
    interior = set()

    # No walk can loop: chordality of the undirected part (checked by the
    # Cpdag constructor) forces at least two shielded triples onto any
    # simple cycle, and an unshielded walk allows at most the one where it
    # would close.  Distinct walks may still pass through a shared node,
    # so nothing is marked visited.
    def walk(y, prev):
        # Arrived at y along prev -- y; extend only to unshielded triples.
        found = False
        blocked = p.neighbors_of(prev) | {prev}
        for z in sorted(p.neighbors_of(y)):
            if z in blocked:
                continue
            if z in seed:
                found = True
            elif walk(z, y):
                found = True
        if found and y not in seed:
            interior.add(y)
        return found

    for x in sorted(seed):
        for y in sorted(p.neighbors_of(x)):
            walk(y, x)

    return CompelledResult(
        ancestors_in_cpdag=frozenset(seed),
        interior_nodes=frozenset(interior),
        compelled=frozenset(seed | interior),
    )


def compelled_ancestors_bruteforce(p: Pdag, targets) -> frozenset:
    """Intersection of ancestor sets over every class member; exponential."""
    members = enumerate_class(p)
    out = None
    for d in members:
        anc = ancestors(d, targets)
        out = anc if out is None else out & anc
    if out is None:
        raise GraphError("class is empty; input is not a valid representative")
    return frozenset(out)


def min_ancestor_dag(p: Pdag, targets) -> Dag:
    """The class member whose ancestor set of `targets` is smallest.

    Every undirected edge leaving the compelled set is pre-oriented
    outward, so nothing new can reach the targets.
    """
    p = _as_cpdag(p)
    compelled = compelled_ancestors(p, targets).compelled
    pre = []
    for a, b in sorted(p.undirected_edges):
        if (a in compelled) != (b in compelled):
            pre.append((a, b) if a in compelled else (b, a))
    return consistent_extension(p, pre)


def merge_ancestral(g1: Dag, g2: Dag, a2) -> Dag:
    """Splice two equivalent DAGs along an ancestral set of the second.

    Edges inside `a2` keep their g1 orientation, all others their g2
    orientation.  For equivalent inputs with `a2` ancestral in g2 the
    result is again a member of the shared class; this is re-checked.
    """
    if not same_class(g1, g2):
        raise GraphError("inputs are not equivalent")
    a2 = frozenset(a2)
    if ancestors(g2, a2) != a2:
        raise GraphError("a2 is not ancestral in g2")
    edges = []
    for u, v in g2.edges:
        if u in a2 and v in a2:
            edges.append((u, v) if (u, v) in g1.edges else (v, u))
        else:
            edges.append((u, v))
    merged = Dag(g2.nodes, edges)
    if not same_class(merged, g2):
        raise GraphError("merge left the equivalence class")
    return merged
