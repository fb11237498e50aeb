"""Exact Pareto-dominance search.

Unrestricted dominance works on the common refinement of the measures:
since densities are constant on each cell, a player's utility depends only
on the fraction of every cell it receives and on which atoms it owns.
Atoms are indivisible, so their owners are enumerated and one exact LP is
solved per assignment.

Contiguous dominance (C-efficiency) searches allocations made of ``n - 1``
cuts and a player order.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

from ._cuts import CutLayout, add_affine
from ._rational import HALF, ONE, ZERO
from .lp import LinearProgram
from .measure import Cells, IntervalSet, ValueMeasure, common_refinement
from .procedures import Allocation

__all__ = [
    "FractionAllocation",
    "DominanceCertificate",
    "DominanceGuardError",
    "utilities",
    "find_dominating",
    "find_dominating_utilities",
    "find_dominating_contiguous",
    "find_dominating_contiguous_utilities",
    "weighted_optimal",
    "realize",
]

MAX_ATOM_ASSIGNMENTS = 2 ** 12
MAX_CONTIGUOUS_PLAYERS = 5


class DominanceGuardError(ValueError):
    """The exact search would be too large."""


@dataclass(frozen=True)
class FractionAllocation:
    """Share of each refinement cell per player, plus indivisible atom owners.

    ``cell_fractions[c][i]`` is player ``i``'s share of ``cells.bounds[c]``.
    """

    cells: Cells
    cell_fractions: tuple[tuple[Fraction, ...], ...]
    atom_owner: tuple[tuple[Fraction, int], ...]

    def utilities(self) -> tuple[Fraction, ...]:
        n = len(self.cells.densities)
        out = []
        owner = dict(self.atom_owner)
        for i in range(n):
            u = sum((f[i] * w for f, w in zip(self.cell_fractions, self.cells.weights(i))), ZERO)
            u += sum(
                (mass for x, mass in zip(self.cells.atoms, self.cells.atom_masses[i]) if owner[x] == i),
                ZERO,
            )
            out.append(u)
        return tuple(out)


@dataclass(frozen=True)
class DominanceCertificate:
    """A concrete allocation that Pareto-dominates a baseline.

    ``fractions`` is set for unrestricted certificates, ``cuts``/``order``
    for contiguous ones.
    """

    allocation: Allocation
    utilities_before: tuple[Fraction, ...]
    utilities_after: tuple[Fraction, ...]
    improvements: tuple[Fraction, ...]
    fractions: FractionAllocation | None = None
    cuts: tuple[Fraction, ...] | None = None
    order: tuple[int, ...] | None = None

    def verify(self, ms: Sequence[ValueMeasure]) -> bool:
        """Re-integrate the allocation and re-check domination from scratch."""
        self.allocation.validate(ms)
        after = self.allocation.payoffs(ms)
        return (
            after == self.utilities_after
            and all(a >= b for a, b in zip(after, self.utilities_before))
            and any(a > b for a, b in zip(after, self.utilities_before))
        )


def utilities(a: Allocation, ms: Sequence[ValueMeasure]) -> tuple[Fraction, ...]:
    return a.payoffs(ms)


def realize(fa: FractionAllocation) -> Allocation:
    """Turn cell shares into intervals: each cell is split left to right by player index."""
    n = len(fa.cells.densities)
    pieces: list[list[tuple[Fraction, Fraction]]] = [[] for _ in range(n)]
    for (a, b), fracs in zip(fa.cells.bounds, fa.cell_fractions):
        pos = a
        for i, f in enumerate(fracs):
            if f:
                end = pos + f * (b - a)
                pieces[i].append((pos, end))
                pos = end
    owned: list[set[Fraction]] = [set() for _ in range(n)]
    for x, i in fa.atom_owner:
        owned[i].add(x)
    return Allocation(tuple(IntervalSet(tuple(p), frozenset(o)) for p, o in zip(pieces, owned)))


def _solve_assignment(cells: Cells, owners: Sequence[int], base: Sequence[Fraction]):
    n = len(base)
    ncell = len(cells.bounds)
    eps0 = ncell * n

    def var(c: int, i: int) -> int:
        return c * n + i

    lp = LinearProgram(eps0 + n)
    for c in range(ncell):
        lp.eq({var(c, i): ONE for i in range(n)}, ONE)
    for i in range(n):
        weights = cells.weights(i)
        atom_part = sum(
            (m for m, o in zip(cells.atom_masses[i], owners) if o == i), ZERO
        )
        coeffs = {var(c, i): -w for c, w in enumerate(weights) if w}
        coeffs[eps0 + i] = ONE
        lp.le(coeffs, atom_part - base[i])
    res = lp.maximize({eps0 + i: ONE for i in range(n)})
    if not res.ok:
        return None
    fracs = tuple(tuple(res.x[var(c, i)] for i in range(n)) for c in range(ncell))
    return res.objective, fracs


def find_dominating_utilities(
    base: Sequence[Fraction], ms: Sequence[ValueMeasure]
) -> DominanceCertificate | None:
    """Search for any allocation weakly better for all and strictly for one.

    Maximizes the total improvement; the best atom assignment wins, the
    first one in enumeration order on ties.
    """
    base = tuple(base)
    n = len(ms)
    if len(base) != n:
        raise ValueError("one baseline utility per measure is required")
    cells = common_refinement(ms)
    if n ** len(cells.atoms) > MAX_ATOM_ASSIGNMENTS:
        raise DominanceGuardError(
            f"{n}^{len(cells.atoms)} atom assignments exceed {MAX_ATOM_ASSIGNMENTS}"
        )
    best = None
    for owners in product(range(n), repeat=len(cells.atoms)):
        solved = _solve_assignment(cells, owners, base)
        if solved is None:
            continue
        gain, fracs = solved
        if gain > 0 and (best is None or gain > best[0]):
            best = (gain, fracs, owners)
    if best is None:
        return None
    _, fracs, owners = best
    fa = FractionAllocation(cells, fracs, tuple(zip(cells.atoms, owners)))
    alloc = realize(fa)
    after = alloc.payoffs(ms)
    return DominanceCertificate(
        alloc, base, after, tuple(a - b for a, b in zip(after, base)), fractions=fa
    )


def find_dominating(a: Allocation, ms: Sequence[ValueMeasure]) -> DominanceCertificate | None:
    return find_dominating_utilities(a.payoffs(ms), ms)


def _contiguous_candidate(layout, seq, combo, base_seq, n):
    """Best improving cut vector inside one region combination, or None."""
    pieces = layout.piece_values(seq, combo)
    ncut = n - 1

    def build(extra: int) -> LinearProgram:
        lp = LinearProgram(ncut + n + extra)
        layout.add_bounds(lp, combo)
        for k, expr in enumerate(pieces):
            coeffs: dict[int, Fraction] = {}
            const = add_affine(coeffs, expr)
            coeffs[ncut + k] = coeffs.get(ncut + k, ZERO) - ONE
            # u_k(x) - eps_k >= base_k
            lp.ge(coeffs, base_seq[k] - const)
        return lp

    lp = build(0)
    res = lp.maximize({ncut + k: ONE for k in range(n)})
    if not res.ok or res.objective <= 0:
        return None
    yield res.x[:ncut]
    # the LP point may sit on an atom; look for a strictly interior one
    lp = build(1)
    delta = ncut + n
    layout.add_interior_margin(lp, combo, delta)
    lp.ge({**{ncut + k: ONE for k in range(n)}, delta: -ONE}, ZERO)
    lp.le({delta: ONE}, ONE)
    res = lp.maximize({delta: ONE})
    if res.ok and res.objective > 0:
        yield res.x[:ncut]


def find_dominating_contiguous_utilities(
    base: Sequence[Fraction], ms: Sequence[ValueMeasure]
) -> DominanceCertificate | None:
    """Search ``n - 1``-cut allocations (any player order) dominating ``base``.

    Among dominating candidates the largest total improvement wins, then the
    lexicographically smallest cut vector, then the smallest order.
    """
    base = tuple(base)
    n = len(ms)
    if n > MAX_CONTIGUOUS_PLAYERS:
        raise DominanceGuardError(f"contiguous search supports at most {MAX_CONTIGUOUS_PLAYERS} players")
    layout = CutLayout(ms)
    best = None
    for order in permutations(range(n)):
        seq = [ms[p] for p in order]
        base_seq = [base[p] for p in order]
        for combo in layout.combos(n - 1):
            for cuts in _contiguous_candidate(layout, seq, combo, base_seq, n):
                alloc = Allocation.contiguous(cuts, order)
                after = alloc.payoffs(ms)
                if not (all(a >= b for a, b in zip(after, base)) and after != base):
                    continue
                key = (-(sum(after) - sum(base)), tuple(cuts), order)
                if best is None or key < best[0]:
                    best = (key, alloc, after, tuple(cuts), order)
                break
    if best is None:
        return None
    _, alloc, after, cuts, order = best
    return DominanceCertificate(
        alloc, base, after, tuple(a - b for a, b in zip(after, base)), cuts=cuts, order=order
    )


def find_dominating_contiguous(a: Allocation, ms: Sequence[ValueMeasure]) -> DominanceCertificate | None:
    return find_dominating_contiguous_utilities(a.payoffs(ms), ms)


def weighted_optimal(
    ms: Sequence[ValueMeasure], w: Sequence[Fraction]
) -> tuple[FractionAllocation, tuple[Fraction, ...]]:
    """Maximize ``w . u`` for two atom-free players by per-cell argmax.

    Each cell goes wholly to the player with the larger weighted density;
    ties are split evenly.
    """
    if len(ms) != 2 or len(w) != 2:
        raise ValueError("weighted_optimal is defined for exactly two players")
    if any(m.has_atoms for m in ms):
        raise ValueError("weighted_optimal requires atom-free measures")
    w1, w2 = Fraction(w[0]), Fraction(w[1])
    if w1 < 0 or w2 < 0 or (w1 == 0 and w2 == 0):
        raise ValueError("weights must be nonnegative and not both zero")
    cells = common_refinement(ms)
    fracs = []
    for d1, d2 in zip(*cells.densities):
        s1, s2 = w1 * d1, w2 * d2
        if s1 > s2:
            fracs.append((ONE, ZERO))
        elif s2 > s1:
            fracs.append((ZERO, ONE))
        else:
            fracs.append((HALF, HALF))
    fa = FractionAllocation(cells, tuple(fracs), ())
    return fa, fa.utilities()
