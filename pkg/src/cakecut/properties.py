"""Fairness checks, misreport analysis and the rightward mark-shift probe."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ._cuts import CutLayout, add_affine
from ._rational import ONE, ZERO
from .lp import LinearProgram
from .measure import ValueMeasure, value
from .procedures import (
    Allocation,
    cut_and_choose,
    equitability_procedure,
    ep_best_order,
    surplus_procedure,
)

__all__ = [
    "Witness",
    "FairnessReport",
    "StrategyOutcome",
    "FloorResult",
    "ShiftProbeResult",
    "check_fairness",
    "run_procedure",
    "payoffs_under_reports",
    "identical_reports_floor",
    "rightward_shift_probe",
]


@dataclass(frozen=True)
class Witness:
    """First violation found: which check, which players, which values."""

    check: str
    players: tuple[int, ...]
    values: tuple[Fraction, ...]


@dataclass(frozen=True)
class FairnessReport:
    proportional: bool
    envy_free: bool
    equitable: bool
    own_values: tuple[Fraction, ...]
    cross_values: tuple[tuple[Fraction, ...], ...]
    witness: Witness | None = None


def check_fairness(a: Allocation, ms: Sequence[ValueMeasure]) -> FairnessReport:
    """Proportionality, envy-freeness and equitability of a complete allocation.

    ``cross_values[i][j]`` is player ``i``'s value of player ``j``'s portion.
    """
    n = len(ms)
    cross = tuple(tuple(value(m, s) for s in a.portions) for m in ms)
    own = tuple(cross[i][i] for i in range(n))
    witnesses: list[Witness] = []

    share = Fraction(1, n)
    low = next((i for i in range(n) if own[i] < share), None)
    if low is not None:
        witnesses.append(Witness("proportional", (low,), (own[low], share)))

    envy = next(
        ((i, j) for i in range(n) for j in range(n) if i != j and cross[i][j] > own[i]),
        None,
    )
    if envy is not None:
        i, j = envy
        witnesses.append(Witness("envy-free", (i, j), (own[i], cross[i][j])))

    uneq = next(((0, i) for i in range(1, n) if own[i] != own[0]), None)
    if uneq is not None:
        witnesses.append(Witness("equitable", uneq, (own[uneq[0]], own[uneq[1]])))

    return FairnessReport(
        proportional=low is None,
        envy_free=envy is None,
        equitable=uneq is None,
        own_values=own,
        cross_values=cross,
        witness=witnesses[0] if witnesses else None,
    )


def run_procedure(procedure: str, ms: Sequence[ValueMeasure], order: Sequence[int] | None = None):
    """Dispatch on a procedure tag; returns the procedure's result object."""
    if procedure == "cut-and-choose":
        _two_players(procedure, ms)
        return cut_and_choose(ms[0], ms[1])
    if procedure == "sp":
        _two_players(procedure, ms)
        return surplus_procedure(ms[0], ms[1])
    if procedure == "ep":
        return equitability_procedure(ms, order)
    if procedure == "ep-best-order":
        return ep_best_order(ms)
    raise ValueError(f"unknown procedure {procedure!r}")


def _two_players(procedure: str, ms: Sequence[ValueMeasure]) -> None:
    if len(ms) != 2:
        raise ValueError(f"{procedure} is a two-player procedure, got {len(ms)} players")


@dataclass(frozen=True)
class StrategyOutcome:
    procedure: str
    true_measures: tuple[ValueMeasure, ...]
    reported_measures: tuple[ValueMeasure, ...]
    allocation: Allocation
    true_payoffs: tuple[Fraction, ...]
    reported_payoffs: tuple[Fraction, ...]


def payoffs_under_reports(
    procedure: str,
    true_ms: Sequence[ValueMeasure],
    reported_ms: Sequence[ValueMeasure],
) -> StrategyOutcome:
    """Run ``procedure`` on the reports, then score the result under the truths."""
    if len(true_ms) != len(reported_ms):
        raise ValueError("need one report per player")
    result = run_procedure(procedure, reported_ms)
    alloc = result.allocation
    return StrategyOutcome(
        procedure,
        tuple(true_ms),
        tuple(reported_ms),
        alloc,
        alloc.payoffs(true_ms),
        tuple(result.payoffs),
    )


@dataclass(frozen=True)
class FloorResult:
    procedure: str
    n: int
    payoffs: tuple[Fraction, ...]
    min_payoff: Fraction
    holds: bool


def identical_reports_floor(procedure: str, m: ValueMeasure, n: int) -> FloorResult:
    """Everyone reports ``m``; someone must end up with at most ``1/n``."""
    if procedure in ("cut-and-choose", "sp") and n != 2:
        raise ValueError(f"{procedure} needs exactly two players")
    result = run_procedure(procedure, [m] * n)
    low = min(result.payoffs)
    return FloorResult(procedure, n, tuple(result.payoffs), low, low <= Fraction(1, n))


@dataclass(frozen=True)
class ProbeStep:
    regions: tuple[tuple[Fraction, Fraction], ...]
    best_equal_value: Fraction


@dataclass(frozen=True)
class ShiftProbeResult:
    """Outcome of the mark-shift search.

    ``witness_cuts`` is ``None`` when the search is exhausted.  ``trace``
    lists, for every feasible region combination, the largest common value
    reachable there (an upper bound when cuts touch atoms).
    """

    marks: tuple[Fraction, ...]
    witness_cuts: tuple[Fraction, ...] | None
    witness_values: tuple[Fraction, ...] | None
    best_equal_value: Fraction | None
    trace: tuple[ProbeStep, ...]
    header: str = (
        "pieces assigned left to right by player index; "
        "cuts may only move right of the marks"
    )

    @property
    def exhausted(self) -> bool:
        return self.witness_cuts is None


def rightward_shift_probe(ms: Sequence[ValueMeasure], marks: Sequence[Fraction]) -> ShiftProbeResult:
    """Look for cuts at or right of ``marks`` giving everyone the same value above ``1/n``.

    Scans every region combination of the cut vector exactly.  Among
    witnesses the largest common value wins, the leftmost cuts on ties.
    """
    n = len(ms)
    marks = tuple(Fraction(x) for x in marks)
    if len(marks) != n - 1:
        raise ValueError(f"need {n - 1} marks for {n} players")
    if any(not ZERO <= x <= ONE for x in marks) or list(marks) != sorted(marks):
        raise ValueError("marks must be a nondecreasing vector in [0, 1]")
    share = Fraction(1, n)
    layout = CutLayout(ms)
    ncut = n - 1
    t_var = ncut
    best = None
    best_t = None
    trace = []

    for combo in layout.combos(ncut, marks):
        pieces = layout.piece_values(ms, combo)

        def build(extra: int) -> LinearProgram:
            lp = LinearProgram(ncut + 1 + extra)
            layout.add_bounds(lp, combo, marks)
            for expr in pieces:
                coeffs = {t_var: -ONE}
                const = add_affine(coeffs, expr)
                lp.eq(coeffs, -const)
            return lp

        res = build(0).maximize({t_var: ONE})
        if not res.ok:
            continue
        top = res.objective
        trace.append(ProbeStep(tuple((layout.regions[r].lo, layout.regions[r].hi) for r in combo), top))
        if top <= share:
            continue
        candidates = [res.x[:ncut]]
        lp = build(1)
        delta = ncut + 1
        layout.add_interior_margin(lp, combo, delta)
        lp.ge({t_var: ONE, delta: -ONE}, share)
        lp.le({delta: ONE}, ONE)
        res2 = lp.maximize({delta: ONE})
        if res2.ok and res2.objective > 0:
            candidates.append(res2.x[:ncut])
        for cuts in candidates:
            if any(c < mk for c, mk in zip(cuts, marks)):
                continue
            vals = Allocation.contiguous(cuts, range(n)).payoffs(ms)
            if len(set(vals)) == 1 and vals[0] > share:
                key = (-vals[0], tuple(cuts))
                if best is None or key < best[0]:
                    best = (key, tuple(cuts), vals)
                break

    for step in trace:
        if best_t is None or step.best_equal_value > best_t:
            best_t = step.best_equal_value
    if best is None:
        return ShiftProbeResult(marks, None, None, best_t, tuple(trace))
    _, cuts, vals = best
    return ShiftProbeResult(marks, cuts, vals, best_t, tuple(trace))
