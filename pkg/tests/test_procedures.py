from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import atom_free, measures, positive
from cakecut import (
    Allocation,
    IntervalSet,
    NonUniqueMedian,
    NoSolution,
    ValueMeasure,
    cut_and_choose,
    ep_best_order,
    equitability_procedure,
    surplus_procedure,
    value,
)
from cakecut.procedures import AllocationError

U = ValueMeasure.uniform()
OUTER = ValueMeasure.from_pieces(["0", "1/4", "3/4", "1"], [2, 0, 2])
SKEW = ValueMeasure.from_pieces(["0", "1/2", "1"], ["1/2", "3/2"])
SPIKE = ValueMeasure.point_mass("1/2")


def two_player_ep_oracle(m1, m2):
    """Common value of a ``[0, x) | [x, 1]`` split with equal values, or None.

    ``H1(x) + H2(x) = 1`` is scanned exactly: at grid points and on the
    open cells, where the sum is affine.
    """
    grid = sorted(set(m1.grid) | set(m2.grid))
    f = lambda x: m1.mass_before(x) + m2.mass_before(x)
    for x in grid:
        if f(x) == 1:
            return m1.mass_before(x)
    for a, b in zip(grid, grid[1:]):
        lo = f(a) + m1.atom_at(a) + m2.atom_at(a)
        hi = f(b)
        if lo < 1 < hi:
            x = a + (1 - lo) / (hi - lo) * (b - a)
            return m1.mass_before(x)
        if lo == hi == 1:
            return m1.mass_before((a + b) / 2)
    return None


class TestAllocation:
    def test_contiguous_order(self):
        a = Allocation.contiguous([F(1, 4)], [1, 0])
        assert a.portions[1] == IntervalSet.interval(0, "1/4")
        assert a.portions[0] == IntervalSet.interval("1/4", 1)
        a.validate([U, OUTER])

    def test_cut_at_one_leaves_the_last_player_the_point(self):
        end = ValueMeasure.point_mass(1)
        a = Allocation.contiguous([F(1)], [0, 1])
        a.validate([U, end])
        assert a.payoffs([U, end]) == (F(1), F(1))
        assert a.portions[0].describe() == "[0, 1)"
        assert a.portions[1].describe() == "{1}"

    def test_gap_and_overlap(self):
        with pytest.raises(AllocationError, match="gap"):
            Allocation((IntervalSet.interval(0, "1/4"), IntervalSet.interval("1/2", 1))).validate()
        with pytest.raises(AllocationError, match="overlap"):
            Allocation((IntervalSet.interval(0, "3/4"), IntervalSet.interval("1/2", 1))).validate()

    def test_atom_owned_twice(self):
        p1 = IntervalSet((("0", "1/2"),), frozenset({F(1, 2)}))
        p2 = IntervalSet.interval("1/2", 1)
        with pytest.raises(AllocationError, match="atom at 1/2"):
            Allocation((p1, p2)).validate([SPIKE, U])


class TestCutAndChoose:
    def test_uniform_cutter_outer_chooser(self):
        r = cut_and_choose(U, OUTER)
        assert r.cut_point == F(1, 2)
        assert r.payoffs == (F(1, 2), F(1, 2))
        assert r.degeneracy is None
        # tie: the chooser takes the left piece
        assert r.allocation.portions[1] == IntervalSet.interval(0, "1/2")

    def test_chooser_picks_larger(self):
        r = cut_and_choose(U, SKEW)
        assert r.payoffs == (F(1, 2), F(3, 4))
        assert r.allocation.portions[1] == IntervalSet.interval("1/2", 1)

    def test_flat_median_cutter(self):
        r = cut_and_choose(OUTER, U)
        assert r.degeneracy == "flat-median"
        assert r.cut_point == F(1, 2)

    def test_atom_cutter(self):
        r = cut_and_choose(SPIKE, U)
        assert r.degeneracy == "at-jump"
        assert r.cut_point == F(1, 2)
        # the atom sits on the right piece; the chooser takes the left (tie)
        assert r.payoffs == (F(1), F(1, 2))


    def test_cutter_median_at_one(self):
        r = cut_and_choose(ValueMeasure.point_mass(1), U)
        assert r.cut_point == 1
        r.allocation.validate([ValueMeasure.point_mass(1), U])
        assert r.payoffs == (F(1), F(1))


class TestSurplus:
    def test_worked_instance(self):
        r = surplus_procedure(U, SKEW)
        assert (r.median_1, r.median_2) == (F(1, 2), F(2, 3))
        assert r.e == F(7, 12)
        assert r.payoffs == (F(7, 12), F(5, 8))
        assert r.surplus_proportions == (F(1, 2), F(1, 2))
        # independent integration
        assert value(U, IntervalSet.interval(0, "7/12")) == F(7, 12)
        assert value(SKEW, IntervalSet.interval("7/12", 1)) == F(5, 8)

    def test_swapped_players(self):
        r = surplus_procedure(SKEW, U)
        assert r.e == F(7, 12)
        assert r.payoffs == (F(5, 8), F(7, 12))
        assert r.allocation.portions[1] == IntervalSet.interval(0, "7/12")

    @pytest.mark.parametrize("pair", [(U, OUTER), (OUTER, U), (OUTER, SKEW)])
    def test_flat_median_is_degenerate(self, pair):
        with pytest.raises(NonUniqueMedian) as info:
            surplus_procedure(*pair)
        assert (info.value.interval.lo, info.value.interval.hi) == (F(1, 4), F(3, 4))
        assert info.value.player == pair.index(OUTER)

    def test_equal_medians(self):
        r = surplus_procedure(U, U)
        assert r.degeneracy == "equal-medians"
        assert r.e == F(1, 2)
        assert r.payoffs == (F(1, 2), F(1, 2))


class TestEquitability:
    def test_three_uniform(self):
        r = equitability_procedure([U, U, U])
        assert r.cuts == (F(1, 3), F(2, 3))
        assert r.common_value == F(1, 3)
        assert r.payoffs == (F(1, 3),) * 3

    def test_outer_pair(self):
        r = equitability_procedure([U, OUTER])
        assert r.common_value == F(1, 2)
        assert r.cuts == (F(1, 2),)

    def test_atom_has_no_solution(self):
        with pytest.raises(NoSolution) as info:
            equitability_procedure([SPIKE, U])
        assert info.value.at == F(1, 2)
        assert "skipping the common value" in str(info.value)

    def test_last_piece_is_the_atom_at_one(self):
        r = equitability_procedure([U, ValueMeasure.point_mass(1)])
        assert r.cuts == (F(1),)
        assert r.payoffs == (F(1), F(1))

    def test_best_order(self):
        front = ValueMeasure.from_pieces(["0", "1/4", "1"], [4, 0])
        assert equitability_procedure([U, front]).common_value == F(1, 5)
        r = ep_best_order([U, front])
        assert r.order == (1, 0)
        assert r.cuts == (F(1, 5),)
        assert r.common_value == F(4, 5)
        assert r.payoffs == (F(4, 5), F(4, 5))

    def test_best_order_tie_keeps_first(self):
        assert ep_best_order([U, OUTER]).order == (0, 1)

    def test_plateau_needs_off_sweep_cuts(self):
        # the leftmost sweep stalls on the zero-density middle of player 2
        ms = [U, OUTER, U]
        r = equitability_procedure(ms)
        assert len(set(r.payoffs)) == 1
        r.allocation.validate(ms)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            equitability_procedure([U, U], order=(0, 0))


@settings(max_examples=150, deadline=None)
@given(measures(), measures())
def test_cut_and_choose_invariants(cutter, chooser):
    r = cut_and_choose(cutter, chooser)
    r.allocation.validate([cutter, chooser])
    assert r.payoffs[1] >= F(1, 2)
    assert r.payoffs[0] + value(cutter, r.allocation.portions[1]) == 1


@settings(max_examples=150, deadline=None)
@given(positive, positive)
def test_sp_equalizes_surplus_proportions(f1, f2):
    r = surplus_procedure(f1, f2)
    r.allocation.validate([f1, f2])
    if r.degeneracy is None:
        lo, hi = sorted((r.median_1, r.median_2))
        left, right = (f1, f2) if r.median_1 < r.median_2 else (f2, f1)
        pl = value(left, IntervalSet.interval(lo, r.e)) / value(left, IntervalSet.interval(lo, hi))
        pr = value(right, IntervalSet.interval(r.e, hi)) / value(right, IntervalSet.interval(lo, hi))
        assert pl == pr
    assert min(r.payoffs) >= F(1, 2)


@settings(max_examples=100, deadline=None)
@given(st.lists(atom_free, min_size=2, max_size=3))
def test_ep_equal_payoffs_atom_free(ms):
    r = equitability_procedure(ms)
    r.allocation.validate(ms)
    assert set(r.payoffs) == {r.common_value}


@settings(max_examples=200, deadline=None)
@given(measures(), measures())
def test_ep_two_players_matches_oracle(m1, m2):
    expected = two_player_ep_oracle(m1, m2)
    if expected is None:
        with pytest.raises(NoSolution):
            equitability_procedure([m1, m2])
    else:
        r = equitability_procedure([m1, m2])
        assert r.common_value == expected
        assert r.payoffs == (expected, expected)
