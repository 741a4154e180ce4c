"""Deciding whether stratified conditionals admit a chain-compatible mixer.

The setting: three binary variables are recorded only within the two
strata of a fourth, whose own marginal was destroyed by selection.  The
recorded family q(a, b, c | w) came from the chain a -> b -> c (with w a
sink) exactly when some stratum weight r makes the remixed joint
independent in a and c given b.  That existence question reduces to two
quadratics in r sharing a root inside [0, 1], which a resultant and
closed-form roots settle without any iteration.

This constraint is invisible to conditional-independence tests inside
either stratum and to hierarchical-model fits, which is what
`classify_conditional` documents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graphs import Dag
from .models import HierarchicalSpec, fit_gap, joint_of, random_bn
from .tables import CondTable, JointTable, conditional_from_joint, is_ci

ZERO_TOL = 1e-12
ROOT_MATCH_TOL = 1e-7


@dataclass(frozen=True)
class ConstraintSystem:
    """Two quadratics in the first stratum weight that must share a root."""

    conditional: np.ndarray      # axes (a, b, c, stratum), each stratum sums to 1
    quadratics: tuple            # two arrays [c2, c1, c0], unnormalized

    def residual(self, r: float) -> float:
        return max(abs(float(np.polyval(q, r))) for q in self.quadratics)


def _as_array(q) -> np.ndarray:
    if isinstance(q, CondTable):
        if len(q.given_variables) != 1 or len(q.over_variables) != 3:
            raise ValueError("need three variables given one stratifier")
        if any(c != 2 for _, c in q.given_variables + q.over_variables):
            raise ValueError("every variable must be binary")
        return np.moveaxis(q.values, 0, -1)
    arr = np.asarray(q, dtype=float)
    if arr.shape != (2, 2, 2, 2):
        raise ValueError(f"expected shape (2, 2, 2, 2), got {arr.shape}")
    sums = arr.sum(axis=(0, 1, 2))
    if np.abs(sums - 1.0).max() > 1e-6:
        raise ValueError("stratum slices do not sum to 1")
    return arr / sums


def build_system(q) -> ConstraintSystem:
    """Expand both rank-one determinant constraints in the stratum weight.

    With A[a, b, c, w] the conditional and r the weight of stratum 0, the
    remixed joint is L(a, b, c) = A[a, b, c, 0] r + A[a, b, c, 1] (1 - r),
    and each b-slice must satisfy L(0,b,0) L(1,b,1) = L(0,b,1) L(1,b,0).
    """
    arr = _as_array(q)

    def linear(a, b, c):
        lo, hi = arr[a, b, c, 0], arr[a, b, c, 1]
        return lo - hi, hi

    quads = []
    for b in range(2):
        a1, b1 = linear(0, b, 0)
        a2, b2 = linear(1, b, 1)
        a3, b3 = linear(0, b, 1)
        a4, b4 = linear(1, b, 0)
        quads.append(np.array([
            a1 * a2 - a3 * a4,
            a1 * b2 + a2 * b1 - a3 * b4 - a4 * b3,
            b1 * b2 - b3 * b4,
        ]))
    frozen = arr.copy()
    frozen.setflags(write=False)
    return ConstraintSystem(frozen, tuple(quads))


def _normalize(coeffs: np.ndarray):
    peak = float(np.abs(coeffs).max())
    if peak <= ZERO_TOL:
        return None
    return coeffs / peak


def _real_roots(c: np.ndarray):
    # c is [c2, c1, c0] with max-abs 1; tiny leading terms degrade gracefully
    c2, c1, c0 = (float(v) for v in c)
    if abs(c2) <= ZERO_TOL:
        if abs(c1) <= ZERO_TOL:
            return []
        return [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < -ZERO_TOL:
        return []
    disc = max(disc, 0.0)
    sd = disc ** 0.5
    t = -(c1 + sd) / 2.0 if c1 >= 0 else -(c1 - sd) / 2.0
    if t == 0.0:
        return [0.0]
    roots = {t / c2, c0 / t}
    return sorted(roots)


def _sylvester(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    f2, f1, f0 = f
    g2, g1, g0 = g
    return np.array([
        [f2, f1, f0, 0.0],
        [0.0, f2, f1, f0],
        [g2, g1, g0, 0.0],
        [0.0, g2, g1, g0],
    ])


@dataclass(frozen=True)
class MembershipVerdict:
    consistent: bool
    roots: tuple
    resultant: float
    tolerance: float
    note: str

    @property
    def recovered_marginal(self):
        """The first admissible stratum-0 weight, if any."""
        return self.roots[0] if self.roots else None


def _in_unit(roots, slack):
    return sorted({min(max(r, 0.0), 1.0)
                   for r in roots if -slack <= r <= 1.0 + slack})


def solve_membership(system: ConstraintSystem,
                     root_tol=ROOT_MATCH_TOL) -> MembershipVerdict:
    """Decide whether the two quadratics share a root in [0, 1].

    The roots decide; the resultant value is reported for diagnostics but
    a near-zero resultant with no admissible shared root still fails.
    """
    norms = [_normalize(q) for q in system.quadratics]
    if norms[0] is None and norms[1] is None:
        return MembershipVerdict(
            True, (), 0.0, root_tol,
            "both constraints vanish identically; every weight in [0, 1] works")
    if norms[0] is None or norms[1] is None:
        live = norms[0] if norms[0] is not None else norms[1]
        roots = _in_unit(_real_roots(live), root_tol)
        return MembershipVerdict(
            bool(roots), tuple(roots), 0.0, root_tol,
            "one constraint vanishes identically; the other decides")
    resultant = float(np.linalg.det(_sylvester(*norms)))
    roots_f = _real_roots(norms[0])
    roots_g = _real_roots(norms[1])
    shared = [(rf + rg) / 2.0
              for rf in roots_f for rg in roots_g
              if abs(rf - rg) <= root_tol]
    admissible = _in_unit(shared, root_tol)
    note = ("a shared root lies in [0, 1]" if admissible else
            "no shared root in [0, 1]" if shared else
            "the quadratics share no real root")
    return MembershipVerdict(bool(admissible), tuple(admissible), resultant,
                             root_tol, note)


@dataclass(frozen=True)
class ConstraintReport:
    verdict: MembershipVerdict
    ci_by_stratum: dict
    saturated_fit_kls: tuple


def classify_conditional(q) -> ConstraintReport:
    """Contrast the mixture test against the checks that cannot see it.

    Per-stratum conditional-independence tests and a hierarchical fit are
    run alongside `solve_membership`: the interaction sets of this
    problem form the saturated model, so the fit always succeeds, and
    stratum slices of a compatible family are generally dependent in
    every direction.  Only the shared-root test separates.
    """
    names = q.over_names if isinstance(q, CondTable) else ("A", "B", "C")
    arr = _as_array(q)
    variables = tuple((n, 2) for n in names)
    saturated = HierarchicalSpec(variables, (frozenset(names),))
    ci = {}
    kls = []
    for w in range(2):
        stratum = JointTable(variables, arr[..., w])
        for x, y in itertools.combinations(names, 2):
            third = next(n for n in names if n not in (x, y))
            for z in ((), (third,)):
                key = (x, y, z)
                ci.setdefault(key, []).append(is_ci(stratum, (x,), (y,), z))
        kls.append(fit_gap(stratum, saturated))
    ci = {k: tuple(v) for k, v in ci.items()}
    return ConstraintReport(solve_membership(build_system(arr)), ci,
                            tuple(kls))


def chain_graph() -> Dag:
    """The generating structure: a chain of three feeding a sink stratifier."""
    return Dag(["O1", "O2", "O3", "O4"],
               [("O1", "O2"), ("O2", "O3"),
                ("O1", "O4"), ("O2", "O4"), ("O3", "O4")])


def simulate_compatible_conditional(seed, positivity_floor=0.1):
    """A conditional family that genuinely came from the chain model.

    Returns the family plus the stratum-0 weight the solver should
    recover.
    """
    bn = random_bn(chain_graph(), 2, seed=seed,
                   positivity_floor=positivity_floor)
    joint = joint_of(bn)
    q = conditional_from_joint(joint, ["O4"])
    truth = float(joint.marginal(["O4"]).values[0])
    return q, truth


def simulate_generic_conditional(seed) -> CondTable:
    """Two unrelated strata; almost surely no shared root exists."""
    rng = np.random.default_rng(seed)
    slices = rng.dirichlet(np.ones(8), size=2).reshape(2, 2, 2, 2)
    return CondTable((("O4", 2),), (("O1", 2), ("O2", 2), ("O3", 2)), slices)
