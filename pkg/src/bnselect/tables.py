"""Dense probability tables over named finite variables.

A JointTable is a full distribution; a CondTable is a family of
distributions indexed by the states of its given variables.  Arrays are
row-major over the declared variable order, and every operation that
combines two tables aligns them by variable name first.
"""

from __future__ import annotations

import itertools

import numpy as np

SUM_TOL = 1e-12


class ZeroConditioningEvent(ValueError):
    """Conditioning on an event of probability zero."""


def _checked_variables(variables):
    out = []
    seen = set()
    for name, card in variables:
        name = str(name)
        card = int(card)
        if name in seen:
            raise ValueError(f"repeated variable {name}")
        if card < 1:
            raise ValueError(f"variable {name} needs at least one state")
        seen.add(name)
        out.append((name, card))
    return tuple(out)


def _shaped(values, variables):
    arr = np.asarray(values, dtype=float)
    shape = tuple(card for _, card in variables)
    if arr.size != int(np.prod(shape, dtype=np.int64)):
        raise ValueError(f"got {arr.size} values for shape {shape}")
    arr = arr.reshape(shape).copy()
    if arr.min(initial=0.0) < -1e-12:
        raise ValueError("negative probability")
    np.clip(arr, 0.0, None, out=arr)
    return arr


class JointTable:
    """A distribution over an ordered tuple of (name, cardinality) pairs."""

    __slots__ = ("_vars", "_values")

    def __init__(self, variables, values):
        self._vars = _checked_variables(variables)
        arr = _shaped(values, self._vars)
        if abs(arr.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"mass is {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        self._values = arr

    @property
    def variables(self):
        return self._vars

    @property
    def names(self):
        return tuple(n for n, _ in self._vars)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def card_of(self, name) -> int:
        for n, c in self._vars:
            if n == name:
                return c
        raise KeyError(name)

    def axis_of(self, name) -> int:
        for i, (n, _) in enumerate(self._vars):
            if n == name:
                return i
        raise KeyError(name)

    def prob(self, assignment: dict) -> float:
        if set(assignment) != set(self.names):
            raise ValueError("assignment must cover every variable")
        idx = tuple(assignment[n] for n in self.names)
        return float(self._values[idx])

    def marginal(self, names) -> "JointTable":
        """Distribution over `names`, in the order given."""
        names = list(names)
        if len(set(names)) != len(names) or not set(names) <= set(self.names):
            raise ValueError(f"bad marginal request {names}")
        drop = tuple(i for i, (n, _) in enumerate(self._vars) if n not in names)
        arr = self._values.sum(axis=drop) if drop else self._values
        kept = [n for n in self.names if n in names]
        perm = tuple(kept.index(n) for n in names)
        arr = np.transpose(arr, perm)
        return JointTable([(n, self.card_of(n)) for n in names], arr)

    def reorder(self, names) -> "JointTable":
        if sorted(names) != sorted(self.names):
            raise ValueError("reorder needs a permutation of the variables")
        return self.marginal(names)

    def __repr__(self):
        return f"JointTable({self._vars!r})"


class CondTable:
    """Distributions over `over` variables, one per state of the `given` ones."""

    __slots__ = ("_given", "_over", "_values")

    def __init__(self, given_variables, over_variables, values):
        self._given = _checked_variables(given_variables)
        self._over = _checked_variables(over_variables)
        overlap = {n for n, _ in self._given} & {n for n, _ in self._over}
        if overlap:
            raise ValueError(f"variables on both sides: {sorted(overlap)}")
        arr = _shaped(values, self._given + self._over)
        given_size = int(np.prod([c for _, c in self._given], dtype=np.int64))
        sums = arr.reshape(given_size, -1).sum(axis=1)
        if np.abs(sums - 1.0).max(initial=0.0) > SUM_TOL:
            raise ValueError("a conditional slice does not sum to 1")
        arr.setflags(write=False)
        self._values = arr

    @property
    def given_variables(self):
        return self._given

    @property
    def over_variables(self):
        return self._over

    @property
    def given_names(self):
        return tuple(n for n, _ in self._given)

    @property
    def over_names(self):
        return tuple(n for n, _ in self._over)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def at(self, assignment: dict) -> JointTable:
        """The slice distribution for one full assignment of the given vars."""
        if set(assignment) != set(self.given_names):
            raise ValueError("assignment must cover every given variable")
        idx = tuple(assignment[n] for n in self.given_names)
        return JointTable(self._over, self._values[idx])

    def restrict(self, partial: dict) -> "CondTable":
        """Pin some given variables to fixed states and drop them."""
        unknown = set(partial) - set(self.given_names)
        if unknown:
            raise ValueError(f"not given variables: {sorted(unknown)}")
        idx = tuple(partial.get(n, slice(None)) for n in self.given_names)
        kept = [(n, c) for n, c in self._given if n not in partial]
        return CondTable(kept, self._over, self._values[idx])

    def __repr__(self):
        return f"CondTable(given={self._given!r}, over={self._over!r})"


def _aligned_pair(a: JointTable, b: JointTable):
    if set(a.variables) != set(b.variables):
        raise ValueError(
            f"tables differ: {sorted(a.variables)} vs {sorted(b.variables)}")
    return a.values, b.reorder(a.names).values


def max_abs_diff(a: JointTable, b: JointTable) -> float:
    av, bv = _aligned_pair(a, b)
    return float(np.abs(av - bv).max(initial=0.0))


def kl_divergence(p: JointTable, q: JointTable) -> float:
    """Relative entropy of p from q, with 0 log 0 read as 0."""
    pv, qv = _aligned_pair(p, q)
    mask = pv > 0
    if np.any(qv[mask] == 0):
        return float("inf")
    return float(np.sum(pv[mask] * np.log(pv[mask] / qv[mask])))


def condition(p: JointTable, keep, given: dict) -> JointTable:
    """The distribution of `keep` after observing `given`.

    Variables in neither group are summed out.  Raises
    ZeroConditioningEvent when the observation has no mass.
    """
    keep = list(keep)
    if set(keep) & set(given):
        raise ValueError("keep and given overlap")
    m = p.marginal(keep + sorted(given))
    idx = tuple([slice(None)] * len(keep) + [given[n] for n in sorted(given)])
    block = m.values[idx]
    mass = block.sum()
    if mass <= 0.0:
        raise ZeroConditioningEvent(f"event {given!r} has probability 0")
    return JointTable([(n, p.card_of(n)) for n in keep], block / mass)


def conditional_from_joint(p: JointTable, given_names) -> CondTable:
    """Rewrite a joint as a conditional of the other variables on `given_names`."""
    given_names = list(given_names)
    rest = [n for n in p.names if n not in given_names]
    m = p.reorder(given_names + rest)
    k = len(given_names)
    margin = m.values.sum(axis=tuple(range(k, len(p.names))), keepdims=True)
    if margin.min() <= 0.0:
        raise ZeroConditioningEvent("a conditioning state has probability 0")
    return CondTable(m.variables[:k], m.variables[k:], m.values / margin)


def chain(marginal: JointTable, conditional: CondTable) -> JointTable:
    """p(a) * p(b | a): extend a marginal by a conditional over new variables."""
    if set(conditional.over_names) & set(marginal.names):
        raise ValueError("conditional introduces variables already present")
    if not set(conditional.given_names) <= set(marginal.names):
        raise ValueError("conditional is given variables the marginal lacks")
    letters = {}
    for name, card in marginal.variables + conditional.over_variables:
        letters[name] = chr(ord("a") + len(letters))
    sub_m = "".join(letters[n] for n in marginal.names)
    sub_c = "".join(letters[n] for n in conditional.given_names
                    ) + "".join(letters[n] for n in conditional.over_names)
    out = sub_m + "".join(letters[n] for n in conditional.over_names)
    arr = np.einsum(f"{sub_m},{sub_c}->{out}",
                    marginal.values, conditional.values)
    return JointTable(marginal.variables + conditional.over_variables, arr)


def is_ci(p: JointTable, x, y, z=(), tol=1e-9) -> bool:
    """Whether x and y are independent given z, to within `tol` per cell.

    Checks p(x,y,z) p(z) = p(x,z) p(y,z) cellwise, which needs no division
    and is symmetric in x and y by construction.
    """
    x, y, z = list(x), list(y), list(z)
    groups = x + y + z
    if len(set(groups)) != len(groups):
        raise ValueError("x, y, z must be disjoint")
    if not x or not y:
        return True
    m = p.marginal(groups)
    nx = int(np.prod([p.card_of(n) for n in x], dtype=np.int64))
    ny = int(np.prod([p.card_of(n) for n in y], dtype=np.int64))
    cube = m.values.reshape(nx, ny, -1)
    pz = cube.sum(axis=(0, 1))
    pxz = cube.sum(axis=1)
    pyz = cube.sum(axis=0)
    residual = cube * pz[None, None, :] - pxz[:, None, :] * pyz[None, :, :]
    return float(np.abs(residual).max()) <= tol


def chained_condition_gap(p: JointTable, keep, given1: dict,
                          given2: dict) -> float:
    """How far conditioning in two steps drifts from conditioning at once."""
    if set(given1) & set(given2):
        raise ValueError("the two observations overlap")
    at_once = condition(p, keep, {**given1, **given2})
    step = condition(p, list(keep) + sorted(given2), given1)
    twice = condition(step, keep, given2)
    return max_abs_diff(at_once, twice)


def assignments(variables):
    """Row-major iteration over all joint states of (name, card) pairs."""
    names = [n for n, _ in variables]
    for combo in itertools.product(*(range(c) for _, c in variables)):
        yield dict(zip(names, combo))
