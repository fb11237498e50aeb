"""Small exact-rational linear programming.

Two-phase tableau simplex over :class:`fractions.Fraction` with Bland's
rule, so it cannot cycle.  Problems here have tens of variables; dense
tableaus are fine.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ._rational import ZERO

__all__ = ["LPResult", "linprog", "LinearProgram"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] = ()
    objective: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], basis: list[int], r: int, j: int) -> None:
    prow = rows[r]
    piv = prow[j]
    if piv != 1:
        prow[:] = [v / piv for v in prow]
    for k, row in enumerate(rows):
        if k != r:
            f = row[j]
            if f:
                row[:] = [a - f * b for a, b in zip(row, prow)]
    f = obj[j]
    if f:
        obj[:] = [a - f * b for a, b in zip(obj, prow)]
    basis[r] = j


def _run(rows, obj, basis, allowed: Sequence[int]) -> str:
    while True:
        enter = next((j for j in allowed if obj[j] > 0), None)
        if enter is None:
            return OPTIMAL
        best = None
        for r, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                key = (row[-1] / a, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            return UNBOUNDED
        _pivot(rows, obj, basis, best[1], enter)


def _objective_row(c: Sequence[Fraction], rows, basis, width: int) -> list[Fraction]:
    obj = list(c) + [ZERO] * (width - len(c))
    for r, j in enumerate(basis):
        cj = obj[j]
        if cj:
            obj = [a - cj * b for a, b in zip(obj, rows[r])]
    return obj


def linprog(
    c: Sequence[Fraction],
    A_ub: Sequence[Sequence[Fraction]] = (),
    b_ub: Sequence[Fraction] = (),
    A_eq: Sequence[Sequence[Fraction]] = (),
    b_eq: Sequence[Fraction] = (),
) -> LPResult:
    """Maximize ``c @ x`` s.t. ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``, ``x >= 0``."""
    n = len(c)
    constraints = [(list(a), Fraction(b), True) for a, b in zip(A_ub, b_ub)]
    constraints += [(list(a), Fraction(b), False) for a, b in zip(A_eq, b_eq)]
    n_slack = len(A_ub)
    needs_art = [(not is_ub) or b < 0 for _, b, is_ub in constraints]
    n_art = sum(needs_art)
    width = n + n_slack + n_art + 1

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    slack = n
    art = n + n_slack
    for (a, b, is_ub), use_art in zip(constraints, needs_art):
        row = [Fraction(v) for v in a] + [ZERO] * (width - n)
        row[-1] = b
        if is_ub:
            row[slack] = Fraction(1)
            slack_col = slack
            slack += 1
        if b < 0:
            row = [-v for v in row]
        if use_art:
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(slack_col)
        rows.append(row)

    art_cols = range(n + n_slack, n + n_slack + n_art)
    if n_art:
        phase1 = [ZERO] * (n + n_slack) + [Fraction(-1)] * n_art
        obj = _objective_row(phase1, rows, basis, width)
        _run(rows, obj, basis, range(width - 1))
        if -obj[-1] < 0:
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for r in range(len(rows)):
            if basis[r] in art_cols:
                j = next((j for j in range(n + n_slack) if rows[r][j] != 0), None)
                if j is None:
                    continue
                _pivot(rows, obj, basis, r, j)
            keep.append(r)
        rows = [rows[r] for r in keep]
        basis = [basis[r] for r in keep]

    real = range(n + n_slack)
    obj = _objective_row([Fraction(v) for v in c], rows, basis, width)
    status = _run(rows, obj, basis, real)
    if status != OPTIMAL:
        return LPResult(status)
    x = [ZERO] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = rows[r][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult(OPTIMAL, tuple(x), value)


class LinearProgram:
    """Sparse front end for :func:`linprog` with free-form constraints.

    All variables are nonnegative. Coefficients are given as
    ``{var_index: coefficient}`` mappings.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self._ub: list[tuple[dict[int, Fraction], Fraction]] = []
        self._eq: list[tuple[dict[int, Fraction], Fraction]] = []

    def le(self, coeffs: Mapping[int, Fraction], rhs: Fraction) -> None:
        self._ub.append((dict(coeffs), Fraction(rhs)))

    def ge(self, coeffs: Mapping[int, Fraction], rhs: Fraction) -> None:
        self._ub.append(({k: -v for k, v in coeffs.items()}, -Fraction(rhs)))

    def eq(self, coeffs: Mapping[int, Fraction], rhs: Fraction) -> None:
        self._eq.append((dict(coeffs), Fraction(rhs)))

    def _dense(self, coeffs: Mapping[int, Fraction]) -> list[Fraction]:
        row = [ZERO] * self.nvars
        for k, v in coeffs.items():
            row[k] += v
        return row

    def maximize(self, objective: Mapping[int, Fraction]) -> LPResult:
        return linprog(
            self._dense(objective),
            [self._dense(a) for a, _ in self._ub],
            [b for _, b in self._ub],
            [self._dense(a) for a, _ in self._eq],
            [b for _, b in self._eq],
        )

    def minimize(self, objective: Mapping[int, Fraction]) -> LPResult:
        res = self.maximize({k: -v for k, v in objective.items()})
        if res.ok:
            return LPResult(res.status, res.x, -res.objective)
        return res
