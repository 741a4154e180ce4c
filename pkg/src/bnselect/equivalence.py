"""Markov equivalence classes of DAGs and their completed representatives.

Two DAGs are treated as equivalent when they share a skeleton and the same
unshielded colliders.  A class is represented by a completed partially
directed graph: every edge directed the same way in all members is drawn
directed, everything else is left undirected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graphs import (
    CycleError,
    Dag,
    GraphError,
    JoinTree,
    NotChordalError,
    Pdag,
    is_chordal,
    skeleton,
    unshielded_colliders,
)

ENUMERATION_LIMIT = 20


class NoExtension(GraphError):
    """No full orientation satisfies the requested constraints."""


def _pair(a, b):
    return (a, b) if a < b else (b, a)


class Cpdag(Pdag):
    """A validated class representative.

    Construction checks the two structural facts every completed graph
    satisfies: the undirected part is chordal, and whenever x -> y sits
    next to an undirected y -- z the edge x -> z is also present.
    """

    def __init__(self, nodes, directed_edges=(), undirected_edges=()):
        super().__init__(nodes, directed_edges, undirected_edges)
        if not is_chordal(Pdag(self.nodes, (), self.undirected_edges)):
            raise NotChordalError("undirected part has a chordless cycle")
        for x, y in self.directed_edges:
            for z in self.neighbors_of(y):
                if (x, z) not in self.directed_edges:
                    raise GraphError(
                        f"not closed: {x} -> {y} and {y} -- {z} "
                        f"require {x} -> {z}")


def _adjacent(a, b, directed, undirected):
    return (a, b) in directed or (b, a) in directed or _pair(a, b) in undirected


def _rule_fires(u, v, nodes, directed, undirected):
    # u -- v is oriented to u -> v when leaving it undirected (or reversed)
    # would force a directed cycle or an extra unshielded collider.
    for c in nodes:
        if (c, u) in directed and not _adjacent(c, v, directed, undirected):
            return True  # chain c -> u -- v with c, v apart
        if (u, c) in directed and (c, v) in directed:
            return True  # directed path u -> c -> v
    shared = [c for c in nodes
              if _pair(u, c) in undirected and (c, v) in directed]
    for c, d in itertools.combinations(shared, 2):
        if not _adjacent(c, d, directed, undirected):
            return True  # two apart parents of v reachable from u
    for c in nodes:
        if c == v or _pair(u, c) not in undirected:
            continue
        if _adjacent(c, v, directed, undirected):
            continue
        for d in nodes:
            if (c, d) in directed and (d, v) in directed:
                return True  # v -> u would close a cycle or collide at u
    return False


def _orientation_closure(nodes, directed, undirected):
    """Mutates the edge sets until no orientation rule fires."""
    changed = True
    while changed:
        changed = False
        for pair in sorted(undirected):
            if pair not in undirected:
                continue
            for u, v in (pair, pair[::-1]):
                if _rule_fires(u, v, nodes, directed, undirected):
                    undirected.discard(pair)
                    directed.add((u, v))
                    changed = True
                    break


def cpdag_of(g: Dag) -> Cpdag:
    """The completed representative of g's equivalence class."""
    directed = set()
    undirected = {_pair(a, b) for a, b in g.edges}
    for x, z, y in unshielded_colliders(g):
        for src in (x, y):
            undirected.discard(_pair(src, z))
            directed.add((src, z))
    _orientation_closure(g.nodes, directed, undirected)
    return Cpdag(g.nodes, directed, undirected)


def same_class(a: Dag, b: Dag) -> bool:
    """Whether two DAGs over the same nodes are Markov equivalent."""
    if set(a.nodes) != set(b.nodes):
        raise GraphError("graphs are over different node sets")
    return (skeleton(a).undirected_edges == skeleton(b).undirected_edges
            and unshielded_colliders(a) == unshielded_colliders(b))


def _directed_part_colliders(p: Pdag) -> frozenset:
    out = set()
    for z in p.nodes:
        for x, y in itertools.combinations(sorted(p.parents_of(z)), 2):
            if not p.has_link(x, y):
                out.add((x, z, y))
    return frozenset(out)


def enumerate_class(p: Pdag) -> list:
    """Every member DAG of the class p represents, in a stable order.

    Only the undirected edges are reoriented; orientations that introduce
    a cycle or change the collider set are dropped.  Guarded at
    ENUMERATION_LIMIT undirected edges.
    """
    if not isinstance(p, Cpdag):
        p = Cpdag(p.nodes, p.directed_edges, p.undirected_edges)
    free = sorted(p.undirected_edges)
    if len(free) > ENUMERATION_LIMIT:
        raise GraphError(
            f"{len(free)} undirected edges exceed the enumeration guard "
            f"of {ENUMERATION_LIMIT}")
    reference = _directed_part_colliders(p)
    base = sorted(p.directed_edges)
    out = []
    for mask in range(1 << len(free)):
        edges = list(base)
        for bit, (a, b) in enumerate(free):
            edges.append((a, b) if mask >> bit & 1 == 0 else (b, a))
        try:
            candidate = Dag(p.nodes, edges)
        except CycleError:
            continue
        if unshielded_colliders(candidate) == reference:
            out.append(candidate)
    return out


def _sink_condition(x, parents, children, neighbors):
    if children[x]:
        return False
    around_x = parents[x] | neighbors[x]
    for y in neighbors[x]:
        others = around_x - {y}
        if not others <= (parents[y] | children[y] | neighbors[y]):
            return False
    return True


def consistent_extension(p: Pdag, pre_oriented=()) -> Dag:
    """A member of p's class whose orientation honors `pre_oriented`.

    Repeatedly strips a node that can be made a sink without creating a
    collider, orienting its undirected edges inward.  The result is
    checked against p's collider set; NoExtension means no member of the
    class satisfies the constraints.
    """
    directed = set(p.directed_edges)
    undirected = set(p.undirected_edges)
    for u, v in pre_oriented:
        if (u, v) in directed:
            continue
        if (v, u) in directed:
            raise GraphError(f"pre-orientation {u} -> {v} reverses an edge")
        pair = _pair(u, v)
        if pair not in undirected:
            raise GraphError(f"pre-orientation {u} -> {v} is not an edge of p")
        undirected.discard(pair)
        directed.add((u, v))
    reference = _directed_part_colliders(p)

    parents = {v: set() for v in p.nodes}
    children = {v: set() for v in p.nodes}
    neighbors = {v: set() for v in p.nodes}
    for u, v in directed:
        parents[v].add(u)
        children[u].add(v)
    for a, b in undirected:
        neighbors[a].add(b)
        neighbors[b].add(a)

    remaining = set(p.nodes)
    oriented = []
    while remaining:
        x = next((v for v in sorted(remaining)
                  if _sink_condition(v, parents, children, neighbors)), None)
        if x is None:
            raise NoExtension("sink elimination got stuck")
        for y in sorted(neighbors[x]):
            oriented.append((y, x))
            neighbors[y].discard(x)
        for y in parents[x]:
            children[y].discard(x)
        remaining.discard(x)
        parents[x] = set()
        neighbors[x] = set()

    dag = Dag(p.nodes, sorted(directed) + oriented)
    if unshielded_colliders(dag) != reference:
        raise NoExtension("every orientation honoring the constraints "
                          "changes the collider set")
    return dag


@dataclass(frozen=True)
class TreeOrder:
    """A clique tree walked outward from a chosen root clique."""

    tree: JoinTree
    root: int
    ranks: tuple[int, ...]
    sequence: tuple[int, ...]


def tree_order(jt: JoinTree, root: int = 0) -> TreeOrder:
    k = len(jt.cliques)
    if not 0 <= root < k:
        raise GraphError(f"root {root} out of range for {k} cliques")
    ranks = [None] * k
    ranks[root] = 0
    frontier = [root]
    while frontier:
        i = frontier.pop(0)
        for j in sorted(jt.clique_neighbors(i)):
            if ranks[j] is None:
                ranks[j] = ranks[i] + 1
                frontier.append(j)
    if any(r is None for r in ranks):
        raise GraphError("clique tree is not connected")
    sequence = tuple(sorted(range(k), key=lambda i: (ranks[i], i)))
    return TreeOrder(jt, root, tuple(ranks), sequence)


def induced_node_order(to: TreeOrder) -> frozenset:
    """Pairs (x, y) requiring x before y: one per tree step and node pair.

    Walking a tree edge from the clique nearer the root into its child,
    the shared nodes come before the nodes seen for the first time.
    """
    cliques = to.tree.cliques
    pairs = set()
    for i, j in to.tree.tree_edges:
        parent, child = (i, j) if to.ranks[i] < to.ranks[j] else (j, i)
        shared = cliques[parent] & cliques[child]
        fresh = cliques[child] - cliques[parent]
        pairs.update((x, y) for x in shared for y in fresh)
    return frozenset(pairs)


def orient_by_total_order(u: Pdag, total) -> Dag:
    """Direct every undirected edge from the earlier node to the later one."""
    if u.directed_edges:
        raise GraphError("expected a purely undirected graph")
    total = list(total)
    if len(set(total)) != len(total):
        raise GraphError("order contains repeats")
    position = {name: i for i, name in enumerate(total)}
    missing = [v for v in u.nodes if v not in position]
    if missing:
        raise GraphError(f"order is missing nodes: {missing}")
    edges = []
    for a, b in u.undirected_edges:
        edges.append((a, b) if position[a] < position[b] else (b, a))
    return Dag(u.nodes, edges)
