import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bnselect.tables import (
    CondTable,
    JointTable,
    ZeroConditioningEvent,
    assignments,
    chain,
    chained_condition_gap,
    condition,
    conditional_from_joint,
    is_ci,
    kl_divergence,
    max_abs_diff,
)
from randgen import random_joint

seeds = st.integers(min_value=0, max_value=10_000)

AB = [("A", 2), ("B", 2)]


def hand_joint():
    return JointTable(AB, [[0.1, 0.2], [0.3, 0.4]])


class TestJointTable:
    def test_accessors(self):
        p = hand_joint()
        assert p.names == ("A", "B")
        assert p.card_of("B") == 2
        assert p.axis_of("B") == 1
        assert p.prob({"A": 1, "B": 0}) == pytest.approx(0.3)
        with pytest.raises(KeyError):
            p.card_of("C")

    def test_marginals(self):
        p = hand_joint()
        assert np.allclose(p.marginal(["A"]).values, [0.3, 0.7])
        assert np.allclose(p.marginal(["B"]).values, [0.4, 0.6])

    def test_marginal_respects_requested_order(self):
        p = hand_joint()
        flipped = p.marginal(["B", "A"])
        assert flipped.names == ("B", "A")
        assert np.allclose(flipped.values, p.values.T)

    def test_reorder_round_trip(self):
        p = hand_joint()
        assert np.allclose(p.reorder(["B", "A"]).reorder(["A", "B"]).values,
                           p.values)
        with pytest.raises(ValueError):
            p.reorder(["A"])

    @pytest.mark.parametrize("variables,values", [
        (AB, [[0.1, 0.2], [0.3, 0.3]]),          # mass 0.9
        (AB, [[-0.5, 0.7], [0.4, 0.4]]),         # negative cell
        (AB, [0.5, 0.5]),                        # wrong size
        ([("A", 2), ("A", 2)], [[0.25] * 2] * 2),  # repeated name
        ([("A", 0)], []),                        # empty variable
    ])
    def test_rejects_bad_input(self, variables, values):
        with pytest.raises(ValueError):
            JointTable(variables, values)

    def test_values_are_read_only(self):
        p = hand_joint()
        with pytest.raises(ValueError):
            p.values[0, 0] = 1.0


class TestCondTable:
    def test_slices_must_each_sum_to_one(self):
        with pytest.raises(ValueError):
            CondTable([("A", 2)], [("B", 2)], [[0.5, 0.5], [0.6, 0.5]])

    def test_no_variable_on_both_sides(self):
        with pytest.raises(ValueError):
            CondTable([("A", 2)], [("A", 2)], np.full((2, 2), 0.5))

    def test_at_pulls_one_slice(self):
        c = CondTable([("A", 2)], [("B", 2)], [[0.5, 0.5], [0.1, 0.9]])
        assert np.allclose(c.at({"A": 1}).values, [0.1, 0.9])
        with pytest.raises(ValueError):
            c.at({})

    def test_restrict_drops_pinned_givens(self):
        c = CondTable([("A", 2), ("B", 2)], [("C", 2)],
                      np.full((2, 2, 2), 0.5))
        r = c.restrict({"A": 0})
        assert r.given_names == ("B",)
        assert r.over_names == ("C",)
        with pytest.raises(ValueError):
            c.restrict({"C": 0})


class TestConditioning:
    def test_hand_conditional(self):
        got = condition(hand_joint(), ["B"], {"A": 1})
        assert np.allclose(got.values, [3 / 7, 4 / 7])

    def test_unmentioned_variables_are_summed_out(self):
        p = JointTable([("A", 2), ("B", 2), ("C", 2)], np.full((2, 2, 2), 1 / 8))
        got = condition(p, ["B"], {"A": 0})
        assert np.allclose(got.values, [0.5, 0.5])

    def test_zero_mass_event_raises(self):
        p = JointTable(AB, [[0.0, 0.0], [0.5, 0.5]])
        with pytest.raises(ZeroConditioningEvent):
            condition(p, ["B"], {"A": 0})

    def test_conditional_from_joint_matches_hand_rows(self):
        c = conditional_from_joint(hand_joint(), ["A"])
        assert c.given_names == ("A",)
        assert np.allclose(c.values, [[1 / 3, 2 / 3], [3 / 7, 4 / 7]])

    def test_conditional_from_joint_needs_positive_margin(self):
        p = JointTable(AB, [[0.0, 0.0], [0.5, 0.5]])
        with pytest.raises(ZeroConditioningEvent):
            conditional_from_joint(p, ["A"])

    @given(seeds)
    def test_chain_inverts_conditional_from_joint(self, seed):
        p = random_joint(seed, [("A", 2), ("B", 3), ("C", 2)])
        rebuilt = chain(p.marginal(["A"]), conditional_from_joint(p, ["A"]))
        assert max_abs_diff(p.reorder(rebuilt.names), rebuilt) < 1e-12

    @given(seeds)
    def test_two_step_conditioning_agrees_with_one_step(self, seed):
        p = random_joint(seed, [("A", 2), ("B", 2), ("C", 2), ("D", 3)])
        gap = chained_condition_gap(p, ["A", "B"], {"C": seed % 2},
                                    {"D": seed % 3})
        assert gap < 1e-12

    def test_chained_condition_rejects_overlap(self):
        p = random_joint(0, [("A", 2), ("B", 2), ("C", 2)])
        with pytest.raises(ValueError):
            chained_condition_gap(p, ["A"], {"B": 0}, {"B": 1})


class TestDivergences:
    def test_kl_of_itself_is_zero(self):
        assert kl_divergence(hand_joint(), hand_joint()) == 0.0

    def test_kl_handles_alignment(self):
        p = hand_joint()
        q = p.reorder(["B", "A"])
        assert kl_divergence(p, q) == pytest.approx(0.0)

    def test_kl_infinite_off_support(self):
        p = JointTable([("A", 2)], [0.5, 0.5])
        q = JointTable([("A", 2)], [1.0, 0.0])
        assert kl_divergence(p, q) == float("inf")
        assert kl_divergence(q, p) == pytest.approx(np.log(2))

    @given(seeds)
    def test_kl_nonnegative(self, seed):
        p = random_joint(seed, [("A", 2), ("B", 3)])
        q = random_joint(seed + 77, [("A", 2), ("B", 3)])
        assert kl_divergence(p, q) >= 0.0

    def test_max_abs_diff_requires_same_variables(self):
        with pytest.raises(ValueError):
            max_abs_diff(hand_joint(), JointTable([("A", 2)], [0.5, 0.5]))


class TestIndependence:
    def product_joint(self):
        a = np.array([0.3, 0.7])
        b = np.array([0.2, 0.8])
        c = np.array([0.6, 0.4])
        return JointTable([("A", 2), ("B", 2), ("C", 2)],
                          np.einsum("i,j,k->ijk", a, b, c))

    def noisy_chain_joint(self):
        # A -> B -> C with 0.9-sticky links; dependent, but CI given B.
        flip = np.array([[0.9, 0.1], [0.1, 0.9]])
        arr = np.einsum("i,ij,jk->ijk", np.array([0.5, 0.5]), flip, flip)
        return JointTable([("A", 2), ("B", 2), ("C", 2)], arr)

    def test_product_is_independent(self):
        p = self.product_joint()
        assert is_ci(p, ["A"], ["B"])
        assert is_ci(p, ["A"], ["C"], ["B"])

    def test_chain_dependence_pattern(self):
        p = self.noisy_chain_joint()
        assert not is_ci(p, ["A"], ["C"])
        assert is_ci(p, ["A"], ["C"], ["B"])

    def test_degenerate_groups(self):
        p = self.product_joint()
        assert is_ci(p, [], ["B"])
        with pytest.raises(ValueError):
            is_ci(p, ["A"], ["A"])


def test_assignments_row_major():
    got = list(assignments([("A", 2), ("B", 3)]))
    assert got[0] == {"A": 0, "B": 0}
    assert got[1] == {"A": 0, "B": 1}
    assert got[-1] == {"A": 1, "B": 2}
    assert len(got) == 6
