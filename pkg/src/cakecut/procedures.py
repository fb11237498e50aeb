"""Cut-and-choose, the Surplus Procedure and the Equitability Procedure.

Players are indexed from 0.  Every procedure returns exact cut points and
payoffs; degenerate inputs raise a :class:`ProcedureError` subclass that
carries the data needed to reproduce the degeneracy.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from ._cuts import CutLayout, add_affine
from ._rational import HALF, ONE, ZERO, as_rational, format_rational as fmt
from .lp import LinearProgram
from .measure import (
    AtJump,
    FlatInterval,
    IntervalSet,
    ValueMeasure,
    quantile,
    value,
)

__all__ = [
    "Allocation",
    "AllocationError",
    "CCResult",
    "SPResult",
    "EPResult",
    "ProcedureError",
    "NonUniqueMedian",
    "NoSolution",
    "cut_and_choose",
    "surplus_procedure",
    "equitability_procedure",
    "ep_best_order",
    "PROCEDURES",
]

PROCEDURES = ("cut-and-choose", "sp", "ep", "ep-best-order")
MAX_EP_PLAYERS = 8


class AllocationError(ValueError):
    pass


@dataclass(frozen=True)
class Allocation:
    """One portion per player, indexed like the measures."""

    portions: tuple[IntervalSet, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "portions", tuple(self.portions))

    @classmethod
    def contiguous(cls, cuts: Sequence[Fraction], order: Sequence[int]) -> "Allocation":
        """Pieces ``[0, x_1), [x_1, x_2), ..., [x_{n-1}, 1]`` handed out left to right.

        Only the last piece owns the point 1; with ``x_{n-1} = 1`` it is just that point.
        """
        bounds = [ZERO, *(as_rational(c) for c in cuts), ONE]
        last = len(order) - 1
        portions: list[IntervalSet | None] = [None] * len(order)
        for k, player in enumerate(order):
            a, b = bounds[k], bounds[k + 1]
            if k == last and a == ONE:
                portions[player] = IntervalSet((), frozenset({ONE}))
            else:
                portions[player] = IntervalSet(((a, b),), closed_at_one=k == last)
        return cls(tuple(portions))

    def __len__(self) -> int:
        return len(self.portions)

    def validate(self, measures: Sequence[ValueMeasure] = ()) -> None:
        """Raise :class:`AllocationError` unless the portions partition the cake."""
        pieces = sorted(p for s in self.portions for p in s.pieces)
        pos = ZERO
        for a, b in pieces:
            if a != pos:
                kind = "overlap" if a < pos else "gap"
                raise AllocationError(f"{kind} at {fmt(min(a, pos))}")
            pos = b
        if pos != ONE:
            raise AllocationError(f"portions end at {fmt(pos)}, not 1")
        locations = sorted(set().union(*(m.atoms.locations for m in measures))) if measures else []
        for x in locations:
            owners = [i for i, s in enumerate(self.portions) if s.owns_point(x)]
            if len(owners) != 1:
                raise AllocationError(f"atom at {fmt(x)} owned by players {owners}")

    def payoffs(self, measures: Sequence[ValueMeasure]) -> tuple[Fraction, ...]:
        if len(measures) != len(self.portions):
            raise AllocationError(
                f"{len(self.portions)} portions but {len(measures)} measures"
            )
        return tuple(value(m, s) for m, s in zip(measures, self.portions))


class ProcedureError(Exception):
    """A procedure is undefined on its input."""


class NonUniqueMedian(ProcedureError):
    def __init__(self, player: int, interval: FlatInterval):
        self.player = player
        self.interval = interval
        super().__init__(
            f"player {player} has no unique median: CDF is flat at 1/2 on "
            f"[{fmt(interval.lo)}, {fmt(interval.hi)}]"
        )


class NoSolution(ProcedureError):
    def __init__(self, diagnostic: str, *, at: Fraction | None = None, t: Fraction | None = None):
        self.diagnostic = diagnostic
        self.at = at
        self.t = t
        super().__init__(diagnostic)


@dataclass(frozen=True)
class CCResult:
    cut_point: Fraction
    cutter_index: int
    chooser_index: int
    allocation: Allocation
    payoffs: tuple[Fraction, ...]
    degeneracy: str | None = None


@dataclass(frozen=True)
class SPResult:
    median_1: Fraction
    median_2: Fraction
    surplus: tuple[Fraction, Fraction]
    e: Fraction
    allocation: Allocation
    payoffs: tuple[Fraction, ...]
    surplus_proportions: tuple[Fraction | None, Fraction | None]
    degeneracy: str | None = None


@dataclass(frozen=True)
class EPResult:
    order: tuple[int, ...]
    cuts: tuple[Fraction, ...]
    common_value: Fraction
    allocation: Allocation
    payoffs: tuple[Fraction, ...]
    notes: tuple[str, ...] = field(default=(), compare=False)


def _median_point(m: ValueMeasure) -> tuple[Fraction, str | None]:
    med = quantile(m, HALF)
    if isinstance(med, FlatInterval):
        return med.midpoint, "flat-median"
    if isinstance(med, AtJump):
        return med.x, "at-jump"
    return med.x, None


def cut_and_choose(cutter: ValueMeasure, chooser: ValueMeasure) -> CCResult:
    """Risk-averse cut-and-choose with the cutter as player 0.

    The cutter cuts at its median (midpoint of a flat median interval, the
    atom location for a median at a jump).  The chooser takes the piece it
    values more, the left one on ties.
    """
    cut, degeneracy = _median_point(cutter)
    left, right = Allocation.contiguous((cut,), (0, 1)).portions
    if value(chooser, left) >= value(chooser, right):
        alloc = Allocation((right, left))
    else:
        alloc = Allocation((left, right))
    return CCResult(cut, 0, 1, alloc, alloc.payoffs((cutter, chooser)), degeneracy)


def _strict_median(m: ValueMeasure, player: int) -> Fraction:
    med = quantile(m, HALF)
    if isinstance(med, FlatInterval):
        raise NonUniqueMedian(player, med)
    return med.x


def _first_zero(measures, a: Fraction, b: Fraction, phi) -> Fraction | None:
    """Leftmost ``e`` in ``[a, b]`` with ``phi(e) == 0``.

    ``phi(e, plus)`` must be nondecreasing and affine on every open cell of
    the measures' joint grid; ``plus`` asks for the right limit.
    """
    grid = sorted(set().union(*(m.grid for m in measures)) | {a, b})
    pts = [g for g in grid if a <= g <= b]
    for g, nxt in zip(pts, pts[1:]):
        at = phi(g, False)
        if at == 0:
            return g
        after = phi(g, True)
        end = phi(nxt, False)
        if after <= 0 <= end and after < end:
            if after == 0:
                return None
            return g + (nxt - g) * (-after) / (end - after)
        if at < 0 < after:
            return None
    return pts[-1] if phi(pts[-1], False) == 0 else None


def surplus_procedure(f1: ValueMeasure, f2: ValueMeasure) -> SPResult:
    """Split the cake between the medians, then share the surplus.

    The player with the smaller median gets ``[0, a)``, the other ``[b, 1]``.
    The surplus ``[a, b)`` is cut at ``e`` so that each player receives the
    same proportion of its own value of the surplus.
    """
    m1 = _strict_median(f1, 0)
    m2 = _strict_median(f2, 1)
    if m1 == m2:
        alloc = Allocation.contiguous((m1,), (0, 1))
        return SPResult(m1, m2, (m1, m1), m1, alloc, alloc.payoffs((f1, f2)), (None, None), "equal-medians")

    left = 0 if m1 < m2 else 1
    right = 1 - left
    fl, fr = (f1, f2) if left == 0 else (f2, f1)
    a, b = min(m1, m2), max(m1, m2)
    sl = fl.mass_before(b) - fl.mass_before(a)
    sr = fr.mass_before(b) - fr.mass_before(a)
    degeneracy = None
    if sl == 0 and sr == 0:
        e, degeneracy = (a + b) / 2, "empty-surplus"
    elif sr == 0:
        e, degeneracy = b, "surplus-to-left"
    elif sl == 0:
        e, degeneracy = a, "surplus-to-right"
    else:
        def phi(x: Fraction, plus: bool) -> Fraction:
            hl = fl.mass_before(x) + (fl.atom_at(x) if plus else ZERO)
            hr = fr.mass_before(x) + (fr.atom_at(x) if plus else ZERO)
            return sr * (hl - fl.mass_before(a)) - sl * (fr.mass_before(b) - hr)

        e = _first_zero((fl, fr), a, b, phi)
        if e is None:
            raise NoSolution(
                "an atom in the surplus makes the equal-proportion condition unreachable",
                at=None,
            )

    order = (left, right)
    alloc = Allocation.contiguous((e,), order)
    props: list[Fraction | None] = [None, None]
    if sl:
        props[left] = (fl.mass_before(e) - fl.mass_before(a)) / sl
    if sr:
        props[right] = (fr.mass_before(b) - fr.mass_before(e)) / sr
    return SPResult(m1, m2, (a, b), e, alloc, alloc.payoffs((f1, f2)), tuple(props), degeneracy)


# -- Equitability Procedure -------------------------------------------------

def _cuts_at(seq: Sequence[ValueMeasure], t: Fraction):
    """Leftmost cuts for common value ``t``; returns (cuts, residual, first inexact piece)."""
    cuts = []
    x = ZERO
    bad = None
    for k, m in enumerate(seq[:-1]):
        target = m.mass_before(x) + t
        y = m.leftmost(target, x)
        if y is None:
            y = ONE
        if bad is None and m.mass_before(y) != target:
            bad = k
        cuts.append(y)
        x = y
    residual = ONE - seq[-1].mass_before(x) - t
    return cuts, residual, bad


def _germ(seq: Sequence[ValueMeasure], grid: Sequence[Fraction], t0: Fraction):
    """Affine behaviour of the leftmost cuts just to the right of ``t0``.

    Returns ``(R0, rho, horizon)``: on ``(t0, t0 + horizon)`` the residual
    equals ``R0 - rho * (t - t0)``.
    """
    X, s = ZERO, ZERO
    horizon = ONE - t0
    for m in seq[:-1]:
        if s > 0:
            C = m.mass_before(X) + m.atom_at(X) + t0
            sigma = 1 + m.density_at(X) * s
        else:
            C = m.mass_before(X) + t0
            sigma = ONE
        Y = m.leftmost(C, X, strict=True)
        if Y is None:
            X, s = ONE, ZERO
            continue
        release = m.mass_before(Y) + m.atom_at(Y)
        if m.atom_at(Y) > 0 and release > C:
            # target sits inside the atom's jump: cut pinned at Y
            horizon = min(horizon, (release - C) / sigma)
            X, s = Y, ZERO
            continue
        d = m.density_at(Y)
        nxt = grid[bisect.bisect_right(grid, Y)]
        horizon = min(horizon, (nxt - Y) * d / sigma)
        X, s = Y, sigma / d
    last = seq[-1]
    if s > 0:
        R0 = ONE - last.mass_before(X) - last.atom_at(X) - t0
        rho = 1 + last.density_at(X) * s
    else:
        R0 = ONE - last.mass_before(X) - t0
        rho = ONE
    return R0, rho, horizon


def _crossing(seq: Sequence[ValueMeasure]):
    """Locate where the leftmost-cut residual reaches or skips zero.

    Returns ``(t, cuts_or_None, residual_before, residual_after)``.
    """
    grid = tuple(sorted(set().union(*(m.grid for m in seq))))
    t0 = ZERO
    for _ in range(100000):
        cuts, R, bad = _cuts_at(seq, t0)
        if R == 0:
            return t0, (cuts if bad is None else None), R, R
        if R < 0 or t0 >= ONE:
            return t0, None, R, R
        R0, rho, horizon = _germ(seq, grid, t0)
        if R0 <= 0:
            return t0, None, R, R0
        tau = R0 / rho
        if tau < horizon:
            t = t0 + tau
            cuts, R, bad = _cuts_at(seq, t)
            return t, (cuts if R == 0 and bad is None else None), R0, R
        t0 = t0 + horizon
    raise RuntimeError("equitability sweep did not terminate")  # pragma: no cover


def _fixed_value_cuts(seq: Sequence[ValueMeasure], t: Fraction) -> tuple[Fraction, ...] | None:
    """Lexicographically leftmost cuts giving every piece value exactly ``t``.

    Used when the leftmost sweep is pinned by an atom or skips a plateau.
    When the leftmost point of a region is unattainable (an atom on a cell
    end) an interior point of that region is returned instead.
    """
    n = len(seq)
    layout = CutLayout(seq)
    best = None
    for combo in layout.combos(n - 1):
        pieces = layout.piece_values(seq, combo)

        def base_lp(extra: int = 0) -> LinearProgram:
            lp = LinearProgram(n - 1 + extra)
            layout.add_bounds(lp, combo)
            for expr in pieces:
                coeffs: dict[int, Fraction] = {}
                const = add_affine(coeffs, expr)
                lp.eq(coeffs, t - const)
            return lp

        fixed: list[Fraction] = []
        for j in range(n - 1):
            lp = base_lp()
            for i, v in enumerate(fixed):
                lp.eq({i: ONE}, v)
            res = lp.minimize({j: ONE})
            if not res.ok:
                break
            fixed.append(res.x[j])
        else:
            cand = tuple(fixed)
            if not _verify_equal(seq, cand, t):
                lp = base_lp(1)
                layout.add_interior_margin(lp, combo, n - 1)
                lp.le({n - 1: ONE}, ONE)
                res = lp.maximize({n - 1: ONE})
                if not (res.ok and res.objective > 0):
                    continue
                cand = res.x[: n - 1]
                if not _verify_equal(seq, cand, t):
                    continue
            if best is None or cand < best:
                best = cand
    return best


def _verify_equal(seq: Sequence[ValueMeasure], cuts: Sequence[Fraction], t: Fraction) -> bool:
    alloc = Allocation.contiguous(cuts, range(len(seq)))
    return all(v == t for v in alloc.payoffs(seq))


def equitability_procedure(ms: Sequence[ValueMeasure], order: Sequence[int] | None = None) -> EPResult:
    """Contiguous pieces, left to right in ``order``, all worth the same ``t``.

    The common value is found by an exact sweep: for each candidate ``t`` the
    cuts are placed as far left as possible, and the last player's residual
    ``value - t`` is followed across the breakpoints where it changes slope.
    Raises :class:`NoSolution` when atoms make the residual skip zero.
    """
    n = len(ms)
    if n < 2:
        raise ValueError("the equitability procedure needs at least two players")
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    seq = [ms[p] for p in order]
    t, cuts, before, after = _crossing(seq)
    notes: tuple[str, ...] = ()
    if cuts is None:
        cuts = _fixed_value_cuts(seq, t)
        if cuts is None:
            raise NoSolution(_skip_diagnostic(seq, t, before, after), at=_pinned_cut(seq, t), t=t)
        notes = ("cuts moved off the leftmost sweep position",)
    alloc = Allocation.contiguous(cuts, order)
    payoffs = alloc.payoffs(ms)
    return EPResult(order, tuple(cuts), t, alloc, payoffs, notes)


def _pinned_cut(seq: Sequence[ValueMeasure], t: Fraction) -> Fraction:
    cuts, _, bad = _cuts_at(seq, t)
    return cuts[bad] if bad is not None else cuts[-1]


def _skip_diagnostic(seq, t: Fraction, before: Fraction, after: Fraction) -> str:
    cuts, _, bad = _cuts_at(seq, t)
    if bad is not None:
        x = cuts[bad]
        m = seq[bad]
        lo = cuts[bad - 1] if bad else ZERO
        start = m.mass_before(lo)
        jump_from = m.mass_before(x) - start
        jump_to = jump_from + m.atom_at(x)
        if jump_to < t:
            return (
                f"piece {bad + 1} is worth at most {fmt(jump_to)} on [{fmt(lo)}, 1], "
                f"short of the common value {fmt(t)}"
            )
        return (
            f"piece {bad + 1} value jumps from {fmt(jump_from)} to {fmt(jump_to)} "
            f"at x = {fmt(x)}, skipping the common value {fmt(t)}"
        )
    x = cuts[-1] if cuts else ZERO
    sign = lambda v: "positive" if v > 0 else ("negative" if v < 0 else "zero")
    return (
        f"residual jumps from {sign(before)} to {sign(after)} at t = {fmt(t)} "
        f"(last cut x = {fmt(x)})"
    )


def ep_best_order(ms: Sequence[ValueMeasure]) -> EPResult:
    """Equitability over every player order; keep the largest common value.

    Ties go to the lexicographically smallest order.
    """
    n = len(ms)
    if n > MAX_EP_PLAYERS:
        raise ValueError(f"at most {MAX_EP_PLAYERS} players for order enumeration")
    best = None
    for order in permutations(range(n)):
        try:
            res = equitability_procedure(ms, order)
        except NoSolution:
            continue
        if best is None or res.common_value > best.common_value:
            best = res
    if best is None:
        raise NoSolution("no player order admits an equitable contiguous allocation")
    return best
