"""Directed, partially directed, and fixed-node graphs over named nodes.

Graphs are immutable after construction; constructors reject invalid input
(bad names, duplicate links, directed cycles) instead of exposing broken
states.  All operations are pure functions.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable

NODE_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class GraphError(ValueError):
    """Invalid graph construction or query."""


class CycleError(GraphError):
    """A directed cycle where none is allowed."""


class UnknownNodeError(GraphError):
    """A node name not present in the graph."""


class NotChordalError(GraphError):
    """An undirected graph that has a chordless cycle."""


def _checked_nodes(nodes: Iterable[str]) -> tuple[str, ...]:
    out = []
    seen = set()
    for name in nodes:
        if not isinstance(name, str) or not NODE_NAME.match(name):
            raise GraphError(f"invalid node name: {name!r}")
        if name in seen:
            raise GraphError(f"duplicate node: {name}")
        seen.add(name)
        out.append(name)
    return tuple(out)


def _check_membership(nodes, names):
    known = set(nodes)
    for name in names:
        if name not in known:
            raise UnknownNodeError(f"unknown node: {name}")


def _assert_acyclic(nodes, children):
    # Three-color DFS; iterative to stay safe on long chains.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in nodes}
    for start in nodes:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(sorted(children[start])))]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if color[child] == GRAY:
                    raise CycleError(f"directed cycle through {child}")
                if color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, iter(sorted(children[child]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()


class Dag:
    """A directed acyclic graph with at most one edge per node pair."""

    __slots__ = ("_nodes", "_edges", "_parents", "_children")

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str]]):
        self._nodes = _checked_nodes(nodes)
        known = set(self._nodes)
        parents = {v: set() for v in self._nodes}
        children = {v: set() for v in self._nodes}
        edge_set = set()
        for src, dst in edges:
            if src not in known or dst not in known:
                raise UnknownNodeError(f"edge endpoint not declared: {src} -> {dst}")
            if src == dst:
                raise GraphError(f"self-edge on {src}")
            if (dst, src) in edge_set:
                raise GraphError(f"both orientations of {src}, {dst} present")
            edge_set.add((src, dst))
            parents[dst].add(src)
            children[src].add(dst)
        _assert_acyclic(self._nodes, children)
        self._edges = frozenset(edge_set)
        self._parents = {v: frozenset(s) for v, s in parents.items()}
        self._children = {v: frozenset(s) for v, s in children.items()}

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> frozenset:
        return self._edges

    def parents_of(self, node: str) -> frozenset:
        _check_membership(self._nodes, [node])
        return self._parents[node]

    def children_of(self, node: str) -> frozenset:
        _check_membership(self._nodes, [node])
        return self._children[node]

    def adjacent_to(self, node: str) -> frozenset:
        _check_membership(self._nodes, [node])
        return self._parents[node] | self._children[node]

    def has_link(self, a: str, b: str) -> bool:
        return (a, b) in self._edges or (b, a) in self._edges

    def topological_order(self) -> tuple[str, ...]:
        """Nodes sorted parents-first, lexicographic among the ready ones."""
        indeg = {v: len(self._parents[v]) for v in self._nodes}
        ready = sorted(v for v in self._nodes if indeg[v] == 0)
        order = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            changed = False
            for child in self._children[node]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
                    changed = True
            if changed:
                ready.sort()
        return tuple(order)

    def __eq__(self, other):
        if not isinstance(other, Dag):
            return NotImplemented
        return set(self._nodes) == set(other._nodes) and self._edges == other._edges

    def __hash__(self):
        return hash((frozenset(self._nodes), self._edges))

    def __repr__(self):
        return f"Dag(nodes={list(self._nodes)!r}, edges={sorted(self._edges)!r})"


def _canonical_pair(a, b):
    return (a, b) if a < b else (b, a)


class Pdag:
    """A partially directed graph whose directed part is acyclic."""

    __slots__ = ("_nodes", "_directed", "_undirected", "_parents", "_children",
                 "_neighbors")

    def __init__(self, nodes, directed_edges=(), undirected_edges=()):
        self._nodes = _checked_nodes(nodes)
        known = set(self._nodes)
        parents = {v: set() for v in self._nodes}
        children = {v: set() for v in self._nodes}
        neighbors = {v: set() for v in self._nodes}
        directed = set()
        undirected = set()
        for src, dst in directed_edges:
            if src not in known or dst not in known:
                raise UnknownNodeError(f"edge endpoint not declared: {src} -> {dst}")
            if src == dst:
                raise GraphError(f"self-edge on {src}")
            if (dst, src) in directed:
                raise GraphError(f"both orientations of {src}, {dst} present")
            directed.add((src, dst))
            parents[dst].add(src)
            children[src].add(dst)
        for a, b in undirected_edges:
            if a not in known or b not in known:
                raise UnknownNodeError(f"edge endpoint not declared: {a} -- {b}")
            if a == b:
                raise GraphError(f"self-edge on {a}")
            pair = _canonical_pair(a, b)
            if (a, b) in directed or (b, a) in directed:
                raise GraphError(f"edge {a}, {b} both directed and undirected")
            undirected.add(pair)
            neighbors[a].add(b)
            neighbors[b].add(a)
        _assert_acyclic(self._nodes, children)
        self._directed = frozenset(directed)
        self._undirected = frozenset(undirected)
        self._parents = {v: frozenset(s) for v, s in parents.items()}
        self._children = {v: frozenset(s) for v, s in children.items()}
        self._neighbors = {v: frozenset(s) for v, s in neighbors.items()}

    @property
    def nodes(self):
        return self._nodes

    @property
    def directed_edges(self):
        return self._directed

    @property
    def undirected_edges(self):
        return self._undirected

    def parents_of(self, node):
        _check_membership(self._nodes, [node])
        return self._parents[node]

    def children_of(self, node):
        _check_membership(self._nodes, [node])
        return self._children[node]

    def neighbors_of(self, node):
        """Nodes joined to `node` by an undirected edge."""
        _check_membership(self._nodes, [node])
        return self._neighbors[node]

    def adjacent_to(self, node):
        _check_membership(self._nodes, [node])
        return self._parents[node] | self._children[node] | self._neighbors[node]

    def has_link(self, a, b):
        return ((a, b) in self._directed or (b, a) in self._directed
                or _canonical_pair(a, b) in self._undirected)

    def __eq__(self, other):
        if not isinstance(other, Pdag):
            return NotImplemented
        return (set(self._nodes) == set(other._nodes)
                and self._directed == other._directed
                and self._undirected == other._undirected)

    def __hash__(self):
        return hash((frozenset(self._nodes), self._directed, self._undirected))

    def __repr__(self):
        return (f"Pdag(nodes={list(self._nodes)!r}, "
                f"directed={sorted(self._directed)!r}, "
                f"undirected={sorted(self._undirected)!r})")


class ConditionalDag:
    """A DAG split into random and fixed nodes; fixed nodes are sources."""

    __slots__ = ("_random", "_fixed", "_edges", "_parents", "_children")

    def __init__(self, random_nodes, fixed_nodes, edges):
        self._random = _checked_nodes(random_nodes)
        self._fixed = _checked_nodes(fixed_nodes)
        overlap = set(self._random) & set(self._fixed)
        if overlap:
            raise GraphError(f"nodes both random and fixed: {sorted(overlap)}")
        nodes = self._random + self._fixed
        known = set(nodes)
        fixed = set(self._fixed)
        parents = {v: set() for v in nodes}
        children = {v: set() for v in nodes}
        edge_set = set()
        for src, dst in edges:
            if src not in known or dst not in known:
                raise UnknownNodeError(f"edge endpoint not declared: {src} -> {dst}")
            if src == dst:
                raise GraphError(f"self-edge on {src}")
            if dst in fixed:
                raise GraphError(f"fixed node {dst} must be a source")
            if (dst, src) in edge_set:
                raise GraphError(f"both orientations of {src}, {dst} present")
            edge_set.add((src, dst))
            parents[dst].add(src)
            children[src].add(dst)
        _assert_acyclic(nodes, children)
        self._edges = frozenset(edge_set)
        self._parents = {v: frozenset(s) for v, s in parents.items()}
        self._children = {v: frozenset(s) for v, s in children.items()}

    @property
    def random_nodes(self):
        return self._random

    @property
    def fixed_nodes(self):
        return self._fixed

    @property
    def nodes(self):
        return self._random + self._fixed

    @property
    def edges(self):
        return self._edges

    def parents_of(self, node):
        _check_membership(self.nodes, [node])
        return self._parents[node]

    def children_of(self, node):
        _check_membership(self.nodes, [node])
        return self._children[node]

    def __eq__(self, other):
        if not isinstance(other, ConditionalDag):
            return NotImplemented
        return (set(self._random) == set(other._random)
                and set(self._fixed) == set(other._fixed)
                and self._edges == other._edges)

    def __hash__(self):
        return hash((frozenset(self._random), frozenset(self._fixed), self._edges))

    def __repr__(self):
        return (f"ConditionalDag(random={list(self._random)!r}, "
                f"fixed={list(self._fixed)!r}, edges={sorted(self._edges)!r})")


class JoinTree:
    """A tree over maximal cliques satisfying the running-intersection property."""

    __slots__ = ("_cliques", "_tree_edges", "_adjacency")

    def __init__(self, cliques, tree_edges):
        self._cliques = tuple(frozenset(c) for c in cliques)
        k = len(self._cliques)
        edges = set()
        adjacency = {i: set() for i in range(k)}
        for i, j in tree_edges:
            if not (0 <= i < k and 0 <= j < k) or i == j:
                raise GraphError(f"bad clique edge: ({i}, {j})")
            a, b = min(i, j), max(i, j)
            edges.add((a, b))
            adjacency[a].add(b)
            adjacency[b].add(a)
        if k and len(edges) != k - 1:
            raise GraphError("clique edges do not form a tree")
        if k:
            seen = {0}
            frontier = [0]
            while frontier:
                nxt = adjacency[frontier.pop()] - seen
                seen |= nxt
                frontier.extend(nxt)
            if len(seen) != k:
                raise GraphError("clique edges do not form a tree")
        self._tree_edges = frozenset(edges)
        self._adjacency = {i: frozenset(s) for i, s in adjacency.items()}
        self._check_running_intersection()

    def _check_running_intersection(self):
        for i, j in itertools.combinations(range(len(self._cliques)), 2):
            shared = self._cliques[i] & self._cliques[j]
            if not shared:
                continue
            for m in self.path(i, j)[1:-1]:
                if not shared <= self._cliques[m]:
                    raise GraphError(
                        f"running intersection fails between cliques {i} and {j}")

    @property
    def cliques(self):
        return self._cliques

    @property
    def tree_edges(self):
        return self._tree_edges

    def clique_neighbors(self, i):
        return self._adjacency[i]

    def path(self, i, j):
        """Clique indices on the unique tree path from i to j, inclusive."""
        parent = {i: None}
        frontier = [i]
        while frontier and j not in parent:
            node = frontier.pop(0)
            for nxt in sorted(self._adjacency[node]):
                if nxt not in parent:
                    parent[nxt] = node
                    frontier.append(nxt)
        if j not in parent:
            raise GraphError(f"no path between cliques {i} and {j}")
        out = [j]
        while out[-1] != i:
            out.append(parent[out[-1]])
        return list(reversed(out))

    def __repr__(self):
        return (f"JoinTree(cliques={[sorted(c) for c in self._cliques]!r}, "
                f"tree_edges={sorted(self._tree_edges)!r})")


def ancestors(g, targets) -> frozenset:
    """All nodes with a directed path into `targets`, targets included.

    On a partially directed graph only directed edges count.
    """
    targets = list(targets)
    _check_membership(g.nodes, targets)
    out = set(targets)
    frontier = list(targets)
    while frontier:
        node = frontier.pop()
        for parent in g.parents_of(node):
            if parent not in out:
                out.add(parent)
                frontier.append(parent)
    return frozenset(out)


def descendants(g, targets) -> frozenset:
    """All nodes reachable from `targets` along directed edges, targets included."""
    targets = list(targets)
    _check_membership(g.nodes, targets)
    out = set(targets)
    frontier = list(targets)
    while frontier:
        node = frontier.pop()
        for child in g.children_of(node):
            if child not in out:
                out.add(child)
                frontier.append(child)
    return frozenset(out)


def fix(g: Dag, a) -> ConditionalDag:
    """Freeze the nodes in `a`: they become fixed sources, edges into them drop."""
    a = set(a)
    _check_membership(g.nodes, a)
    random_nodes = [v for v in g.nodes if v not in a]
    fixed_nodes = [v for v in g.nodes if v in a]
    edges = [(u, v) for (u, v) in g.edges if v not in a]
    return ConditionalDag(random_nodes, fixed_nodes, edges)


def induced_subgraph(g, a):
    """Restriction of g to the nodes in `a`, keeping edges with both ends inside."""
    a = set(a)
    _check_membership(g.nodes, a)
    nodes = [v for v in g.nodes if v in a]
    if isinstance(g, Dag):
        return Dag(nodes, [e for e in g.edges if e[0] in a and e[1] in a])
    if isinstance(g, Pdag):
        return Pdag(
            nodes,
            [e for e in g.directed_edges if e[0] in a and e[1] in a],
            [e for e in g.undirected_edges if e[0] in a and e[1] in a],
        )
    raise GraphError(f"cannot take induced subgraph of {type(g).__name__}")


def skeleton(g: Dag) -> Pdag:
    """The undirected graph over the same nodes with one link per edge."""
    return Pdag(g.nodes, (), [_canonical_pair(a, b) for a, b in g.edges])


def unshielded_colliders(g: Dag) -> frozenset:
    """Triples (x, z, y), x < y, with x -> z <- y and x, y not linked."""
    out = set()
    for z in g.nodes:
        for x, y in itertools.combinations(sorted(g.parents_of(z)), 2):
            if not g.has_link(x, y):
                out.add((x, z, y))
    return frozenset(out)


def _require_undirected(g: Pdag):
    if not isinstance(g, Pdag) or g.directed_edges:
        raise GraphError("operation requires a purely undirected graph")


def _mcs_order(g: Pdag):
    # Maximum cardinality search; ties broken by name for reproducibility.
    weight = {v: 0 for v in g.nodes}
    unnumbered = set(g.nodes)
    order = []
    while unnumbered:
        node = max(sorted(unnumbered), key=lambda v: weight[v])
        order.append(node)
        unnumbered.remove(node)
        for u in g.neighbors_of(node):
            if u in unnumbered:
                weight[u] += 1
    return order


def is_chordal(g: Pdag) -> bool:
    """True iff every simple cycle of four or more nodes has a chord."""
    _require_undirected(g)
    order = _mcs_order(g)
    position = {v: i for i, v in enumerate(order)}
    # Reversed MCS order is a perfect elimination order iff chordal: each
    # node's earlier-numbered neighbors must be pairwise adjacent.
    for v in order:
        earlier = [u for u in g.neighbors_of(v) if position[u] < position[v]]
        for a, b in itertools.combinations(earlier, 2):
            if not g.has_link(a, b):
                return False
    return True


def maximal_cliques(g: Pdag) -> list:
    """All inclusion-maximal cliques, sorted; Bron-Kerbosch with pivoting."""
    _require_undirected(g)
    if not g.nodes:
        return []
    adj = {v: set(g.neighbors_of(v)) for v in g.nodes}
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(sorted(p | x), key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(g.nodes), set())
    return sorted(out, key=sorted)


def join_tree(g: Pdag) -> JoinTree:
    """A maximum-weight spanning tree over clique intersections.

    Raises NotChordalError when the input has a chordless cycle; on chordal
    input the construction satisfies the running-intersection property,
    which the JoinTree constructor re-checks.
    """
    if not is_chordal(g):
        raise NotChordalError("graph has a chordless cycle")
    cliques = maximal_cliques(g)
    k = len(cliques)
    if k <= 1:
        return JoinTree(cliques, [])
    candidates = sorted(
        ((i, j) for i, j in itertools.combinations(range(k), 2)),
        key=lambda ij: (-len(cliques[ij[0]] & cliques[ij[1]]), ij),
    )
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = []
    for i, j in candidates:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
            if len(edges) == k - 1:
                break
    return JoinTree(cliques, edges)


def unshielded_undirected_path_tree(p: Pdag, x: str) -> Pdag:
    """A spanning tree of everything x reaches by unshielded undirected paths.

    Walks extend only through unshielded triples.  A single walk looping
    back on itself would close a simple cycle carrying at most one shielded
    triple, which chordal graphs do not have, so on a chordal undirected
    component every walk is a simple path and the search terminates; a loop
    raises GraphError.  Two different walks may still meet at a node, in
    which case the first arrival parents it and the result stays a tree.
    """
    _check_membership(p.nodes, [x])
    parent = {x: None}
    arrival = [x]

    def extend(y, prev, on_path):
        blocked = p.adjacent_to(prev) | {prev}
        for z in sorted(p.neighbors_of(y)):
            if z in blocked:
                continue
            if z in on_path:
                raise GraphError(
                    "an unshielded undirected walk loops back on itself; "
                    "the undirected component is not chordal")
            if z not in parent:
                parent[z] = y
                arrival.append(z)
            extend(z, y, on_path | {z})

    for z in sorted(p.neighbors_of(x)):
        if z not in parent:
            parent[z] = x
            arrival.append(z)
        extend(z, x, {x, z})

    tree_edges = [_canonical_pair(parent[v], v) for v in arrival[1:]]
    nodes = [v for v in p.nodes if v in parent]
    return Pdag(nodes, (), tree_edges)
