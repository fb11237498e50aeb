"""Exact search space for contiguous allocations.

A cut vector ``x_1 <= ... <= x_{n-1}`` is classified by where each cut
sits: exactly on a grid point (density breakpoint or atom) or inside an
open grid cell.  Within one such *region combination* every piece value
is affine in the cuts, so questions about contiguous allocations become
small exact linear programs, one per combination.

LPs are solved over the closure of each region.  Inside open cells the
affine formulas extend continuously to the cell ends, but a cut exactly on
an atom hands the atom to the right piece, so callers re-check every LP
point by direct integration before trusting it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterator, Sequence

from ._rational import ONE, ZERO
from .lp import LinearProgram
from .measure import ValueMeasure

Affine = tuple[Fraction, dict[int, Fraction]]


@dataclass(frozen=True)
class Region:
    lo: Fraction
    hi: Fraction

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi


class CutLayout:
    def __init__(self, measures: Sequence[ValueMeasure]):
        self.grid = tuple(sorted(set().union(*(m.grid for m in measures))))
        regions = []
        for g, nxt in zip(self.grid, self.grid[1:]):
            regions.append(Region(g, g))
            regions.append(Region(g, nxt))
        regions.append(Region(ONE, ONE))
        self.regions = tuple(regions)

    def combos(self, ncuts: int, lower: Sequence[Fraction] | None = None) -> Iterator[tuple[int, ...]]:
        for combo in combinations_with_replacement(range(len(self.regions)), ncuts):
            if lower is not None and any(self.regions[r].hi < lo for r, lo in zip(combo, lower)):
                continue
            yield combo

    def mass_before(self, m: ValueMeasure, combo: Sequence[int], j: int) -> Affine:
        """``m([0, x_j))`` as an affine function of cut variable ``j``."""
        reg = self.regions[combo[j]]
        if reg.is_point:
            return m.mass_before(reg.lo), {}
        start = m.mass_before(reg.lo) + m.atom_at(reg.lo)
        d = m.density_at(reg.lo)
        return start - d * reg.lo, ({j: d} if d else {})

    def piece_values(self, seq: Sequence[ValueMeasure], combo: Sequence[int]) -> list[Affine]:
        """Value of piece ``k`` under ``seq[k]``, pieces laid out left to right."""
        n = len(seq)
        out = []
        for k, m in enumerate(seq):
            if k == n - 1:
                hi_c, hi_v = ONE, {}
            else:
                hi_c, hi_v = self.mass_before(m, combo, k)
            if k == 0:
                lo_c, lo_v = ZERO, {}
            else:
                lo_c, lo_v = self.mass_before(m, combo, k - 1)
            coeffs = dict(hi_v)
            for var, v in lo_v.items():
                coeffs[var] = coeffs.get(var, ZERO) - v
            out.append((hi_c - lo_c, coeffs))
        return out

    def add_bounds(self, lp: LinearProgram, combo: Sequence[int], lower: Sequence[Fraction] | None = None) -> None:
        for j, r in enumerate(combo):
            reg = self.regions[r]
            lo = reg.lo if lower is None else max(reg.lo, lower[j])
            if reg.is_point:
                lp.eq({j: ONE}, reg.lo)
                continue
            lp.le({j: ONE}, reg.hi)
            if lo > 0:
                lp.ge({j: ONE}, lo)
            if j + 1 < len(combo) and combo[j + 1] == r:
                lp.le({j: ONE, j + 1: -ONE}, ZERO)

    def add_interior_margin(self, lp: LinearProgram, combo: Sequence[int], delta: int) -> None:
        """Require every cut in an open cell to stay ``delta`` away from its ends."""
        for j, r in enumerate(combo):
            reg = self.regions[r]
            if not reg.is_point:
                lp.ge({j: ONE, delta: -ONE}, reg.lo)
                lp.le({j: ONE, delta: ONE}, reg.hi)


def add_affine(lp_coeffs: dict[int, Fraction], expr: Affine, scale: Fraction = ONE) -> Fraction:
    """Accumulate ``scale * expr`` into ``lp_coeffs``; returns the scaled constant."""
    const, coeffs = expr
    for var, v in coeffs.items():
        lp_coeffs[var] = lp_coeffs.get(var, ZERO) + scale * v
    return scale * const
