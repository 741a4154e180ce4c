"""Categorical Bayesian networks and hierarchical log-linear models.

A CategoricalBn pairs a graph with one conditional table per random node.
A HierarchicalSpec names the interaction sets of a hierarchical model;
ipf_fit projects a positive distribution onto that model by iterative
proportional scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import ConditionalDag, Dag, descendants
from .tables import CondTable, JointTable, is_ci, kl_divergence


class ConvergenceError(RuntimeError):
    """Iterative fitting stopped without meeting its tolerance."""


def _letters(names):
    if len(names) > 26:
        raise ValueError("more than 26 variables in one product")
    return {n: chr(ord("a") + i) for i, n in enumerate(names)}


class CategoricalBn:
    """A graph plus a conditional table for every random node.

    Tables are keyed by node; each table's given variables must be exactly
    the node's parents, in any order, with matching cardinalities.
    """

    __slots__ = ("_graph", "_cards", "_cpts")

    def __init__(self, graph, cardinalities: dict, cpts: dict):
        if not isinstance(graph, (Dag, ConditionalDag)):
            raise TypeError(f"unsupported graph type {type(graph).__name__}")
        self._graph = graph
        missing = set(graph.nodes) - set(cardinalities)
        if missing:
            raise ValueError(f"no cardinality for: {sorted(missing)}")
        self._cards = {v: int(cardinalities[v]) for v in graph.nodes}
        for v, c in self._cards.items():
            if c < 2:
                raise ValueError(f"node {v} needs at least 2 states")
        random_nodes = (graph.random_nodes
                        if isinstance(graph, ConditionalDag) else graph.nodes)
        if set(cpts) != set(random_nodes):
            raise ValueError("tables must cover exactly the random nodes")
        for v, cpt in cpts.items():
            if cpt.over_variables != ((v, self._cards[v]),):
                raise ValueError(f"table for {v} is over {cpt.over_variables}")
            want = {(u, self._cards[u]) for u in graph.parents_of(v)}
            if set(cpt.given_variables) != want:
                raise ValueError(
                    f"table for {v} conditions on {cpt.given_names}, "
                    f"parents are {sorted(graph.parents_of(v))}")
        self._cpts = dict(cpts)

    @property
    def graph(self):
        return self._graph

    @property
    def cardinalities(self) -> dict:
        return dict(self._cards)

    def cardinality(self, node) -> int:
        return self._cards[node]

    def cpt(self, node) -> CondTable:
        return self._cpts[node]

    @property
    def cpts(self) -> dict:
        return dict(self._cpts)


def joint_of(bn: CategoricalBn):
    """The product of a network's tables.

    A JointTable for a DAG; for a graph with fixed nodes, a CondTable of
    the random nodes given the fixed ones.
    """
    g = bn.graph
    names = list(g.nodes)
    cards = [bn.cardinality(v) for v in names]
    letters = _letters(names)
    full = "".join(letters[n] for n in names)
    arr = np.ones(cards)
    random_nodes = (g.random_nodes if isinstance(g, ConditionalDag)
                    else g.nodes)
    for v in random_nodes:
        cpt = bn.cpt(v)
        sub = "".join(letters[n] for n in cpt.given_names) + letters[v]
        arr = np.einsum(f"{full},{sub}->{full}", arr, cpt.values)
    variables = list(zip(names, cards))
    if isinstance(g, Dag):
        return JointTable(variables, arr)
    order = list(g.fixed_nodes) + list(g.random_nodes)
    perm = tuple(names.index(n) for n in order)
    arr = np.transpose(arr, perm)
    k = len(g.fixed_nodes)
    reordered = [(n, bn.cardinality(n)) for n in order]
    return CondTable(reordered[:k], reordered[k:], arr)


def markov_statements(g: Dag):
    """One (node, nondescendants, parents) triple per node with something
    to be independent of."""
    out = []
    for x in g.nodes:
        pa = tuple(sorted(g.parents_of(x)))
        nd = set(g.nodes) - descendants(g, [x]) - set(pa)
        if nd:
            out.append((x, tuple(sorted(nd)), pa))
    return out


def in_bn_model(p: JointTable, g: Dag, tol=1e-9) -> bool:
    """Whether p satisfies every local independence the graph asserts."""
    if set(p.names) != set(g.nodes):
        raise ValueError("table and graph disagree on the variables")
    return all(is_ci(p, (x,), nd, pa, tol)
               for x, nd, pa in markov_statements(g))


def random_bn(g, cardinalities, seed=0, positivity_floor=0.05) -> CategoricalBn:
    """A reproducible network with strictly positive tables.

    Each conditional row is drawn flat-Dirichlet, then mixed toward
    uniform so no entry drops below `positivity_floor`:

        row' = floor + (1 - k * floor) * row

    A floor of 1/k collapses every row to the uniform distribution.
    """
    if isinstance(cardinalities, int):
        cardinalities = {v: cardinalities for v in g.nodes}
    cards = {v: int(cardinalities[v]) for v in g.nodes}
    if positivity_floor <= 0:
        raise ValueError("positivity floor must be positive")
    for v, k in cards.items():
        if positivity_floor * k > 1.0 + 1e-12:
            raise ValueError(
                f"floor {positivity_floor} too large for {k} states of {v}")
    rng = np.random.default_rng(seed)
    random_nodes = (g.random_nodes if isinstance(g, ConditionalDag)
                    else g.nodes)
    cpts = {}
    for v in random_nodes:
        parents = [u for u in g.nodes if u in g.parents_of(v)]
        k = cards[v]
        n_rows = int(np.prod([cards[u] for u in parents], dtype=np.int64))
        rows = rng.dirichlet(np.ones(k), size=n_rows)
        rows = positivity_floor + (1.0 - k * positivity_floor) * rows
        given = [(u, cards[u]) for u in parents]
        cpts[v] = CondTable(given, [(v, k)], rows)
    return CategoricalBn(g, cards, cpts)


@dataclass(frozen=True)
class HierarchicalSpec:
    """Interaction sets of a hierarchical model, with optional factors.

    Generators are inclusion-maximal, jointly cover the variables, and are
    stored sorted.  When factors are present, factor i is an array over
    generator i's variables, ordered as in `variables`.
    """

    variables: tuple
    generators: tuple
    factors: tuple | None = None

    def __post_init__(self):
        variables = tuple((str(n), int(c)) for n, c in self.variables)
        names = [n for n, _ in variables]
        if len(set(names)) != len(names):
            raise ValueError("repeated variable")
        gens = []
        for g in self.generators:
            g = frozenset(map(str, g))
            if not g:
                raise ValueError("empty generator")
            if not g <= set(names):
                raise ValueError(f"generator {sorted(g)} has unknown variables")
            gens.append(g)
        for a in gens:
            for b in gens:
                if a < b:
                    raise ValueError(
                        f"generator {sorted(a)} is inside {sorted(b)}")
        if len(set(gens)) != len(gens):
            raise ValueError("repeated generator")
        if frozenset().union(*gens) != set(names):
            raise ValueError("generators do not cover the variables")
        order = sorted(range(len(gens)), key=lambda i: sorted(gens[i]))
        factors = self.factors
        if factors is not None:
            if len(factors) != len(gens):
                raise ValueError("need one factor per generator")
            checked = []
            for i, phi in enumerate(factors):
                shape = tuple(c for n, c in variables if n in gens[i])
                arr = np.asarray(phi, dtype=float).reshape(shape).copy()
                if arr.min() < 0 or not np.isfinite(arr).all():
                    raise ValueError(f"factor {i} has bad entries")
                if arr.max() == 0.0:
                    raise ValueError(f"factor {i} is identically zero")
                arr.setflags(write=False)
                checked.append(arr)
            factors = tuple(checked[i] for i in order)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "generators", tuple(gens[i] for i in order))
        object.__setattr__(self, "factors", factors)

    def generator_variables(self, i):
        return tuple((n, c) for n, c in self.variables
                     if n in self.generators[i])

    def factor_joint(self) -> JointTable:
        """The normalized product of the factors."""
        if self.factors is None:
            raise ValueError("no factors attached")
        names = [n for n, _ in self.variables]
        letters = _letters(names)
        full = "".join(letters.values())
        arr = np.ones([c for _, c in self.variables])
        for i, phi in enumerate(self.factors):
            sub = "".join(letters[n] for n, _ in self.generator_variables(i))
            arr = np.einsum(f"{full},{sub}->{full}", arr, phi)
        total = arr.sum()
        if total <= 0.0:
            raise ValueError("factor product has no mass")
        return JointTable(self.variables, arr / total)


@dataclass(frozen=True)
class IpfResult:
    table: JointTable
    sweeps: int
    max_margin_gap: float


def ipf_fit(p: JointTable, spec: HierarchicalSpec, max_sweeps=1000,
            tol=1e-10) -> IpfResult:
    """Project p onto the hierarchical model by cyclic margin matching.

    Starts uniform and rescales one generator margin at a time; the
    relative entropy from p can only shrink along the way, which is
    re-checked every sweep.  Requires strictly positive p so the margins
    stay positive.
    """
    if set(p.variables) != set(spec.variables):
        raise ValueError("table and model disagree on the variables")
    target = p.reorder([n for n, _ in spec.variables]).values
    if target.min() <= 0.0:
        raise ValueError("fitting requires a strictly positive table")
    axes_of = []
    for g in spec.generators:
        axes_of.append(tuple(i for i, (n, _) in enumerate(spec.variables)
                             if n not in g))
    q = np.full_like(target, 1.0 / target.size)
    last_kl = float("inf")
    gap = float("inf")
    for sweep in range(1, max_sweeps + 1):
        for axes in axes_of:
            p_m = target.sum(axis=axes, keepdims=True)
            q_m = q.sum(axis=axes, keepdims=True)
            q = q * (p_m / q_m)
        kl = float(np.sum(target * np.log(target / np.maximum(q, 1e-300))))
        if kl > last_kl + 1e-12:
            raise ConvergenceError(
                f"relative entropy rose from {last_kl} to {kl}")
        last_kl = kl
        gap = max(
            float(np.abs(q.sum(axis=axes) - target.sum(axis=axes)).max())
            for axes in axes_of)
        if gap <= tol:
            return IpfResult(JointTable(spec.variables, q), sweep, gap)
    raise ConvergenceError(
        f"margins still off by {gap} after {max_sweeps} sweeps")


def fit_gap(p: JointTable, spec: HierarchicalSpec, **kwargs) -> float:
    """Relative entropy from p to its projection onto the model."""
    return kl_divergence(p, ipf_fit(p, spec, **kwargs).table)
