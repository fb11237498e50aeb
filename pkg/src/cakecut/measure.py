"""Player value measures on the unit-interval cake.

A measure is a piecewise-constant density plus finitely many atoms, with
total mass exactly one.  Every quantity is a :class:`fractions.Fraction`.

Portions are unions of half-open intervals ``[a, b)``; a piece ending at 1
is closed at 1.  An atom sitting exactly on a cut therefore belongs to the
piece on its right.
"""
from __future__ import annotations

import bisect
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import accumulate
from typing import Iterable, Sequence, Union

from ._rational import ONE, ZERO, RationalLike, as_rational, format_rational

__all__ = [
    "MeasureError",
    "PiecewiseDensity",
    "AtomSet",
    "ValueMeasure",
    "IntervalSet",
    "Rect2DMeasure",
    "UniquePoint",
    "FlatInterval",
    "AtJump",
    "QuantileResult",
    "Cells",
    "value",
    "cdf",
    "quantile",
    "common_refinement",
    "mutually_abs_continuous",
    "project_2d",
]


class MeasureError(ValueError):
    """Raised for malformed densities, atoms, interval sets or masses."""


def _check_breakpoints(bps: Sequence[Fraction], what: str) -> None:
    if len(bps) < 2 or bps[0] != ZERO or bps[-1] != ONE:
        raise MeasureError(f"{what} must start at 0 and end at 1")
    for lo, hi in zip(bps, bps[1:]):
        if not lo < hi:
            raise MeasureError(f"{what} must be strictly increasing")


@dataclass(frozen=True)
class PiecewiseDensity:
    """Density constant on each cell ``[breakpoints[k], breakpoints[k+1])``.

    Adjacent cells with equal values are merged, so equal densities compare
    equal regardless of how they were written down.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        bps = tuple(as_rational(b) for b in self.breakpoints)
        vals = tuple(as_rational(v) for v in self.values)
        _check_breakpoints(bps, "density breakpoints")
        if len(vals) != len(bps) - 1:
            raise MeasureError("need exactly one density value per cell")
        if any(v < 0 for v in vals):
            raise MeasureError("density values must be nonnegative")
        merged_b = [bps[0]]
        merged_v: list[Fraction] = []
        for b, v in zip(bps[1:], vals):
            if merged_v and merged_v[-1] == v:
                merged_b[-1] = b
            else:
                merged_v.append(v)
                merged_b.append(b)
        object.__setattr__(self, "breakpoints", tuple(merged_b))
        object.__setattr__(self, "values", tuple(merged_v))

    @classmethod
    def uniform(cls) -> "PiecewiseDensity":
        return cls((ZERO, ONE), (ONE,))

    @classmethod
    def zero(cls) -> "PiecewiseDensity":
        return cls((ZERO, ONE), (ZERO,))

    @cached_property
    def _prefix(self) -> tuple[Fraction, ...]:
        widths = (
            v * (hi - lo)
            for v, lo, hi in zip(self.values, self.breakpoints, self.breakpoints[1:])
        )
        return (ZERO, *accumulate(widths))

    def _cell(self, x: Fraction) -> int:
        # index k with breakpoints[k] <= x < breakpoints[k+1]; the last cell for x == 1
        return min(bisect.bisect_right(self.breakpoints, x) - 1, len(self.values) - 1)

    def integral_to(self, x: Fraction) -> Fraction:
        """Integral of the density over ``[0, x]``."""
        k = self._cell(x)
        return self._prefix[k] + self.values[k] * (x - self.breakpoints[k])

    def integral(self, a: Fraction, b: Fraction) -> Fraction:
        return self.integral_to(b) - self.integral_to(a)

    def at(self, x: Fraction) -> Fraction:
        """Density just to the right of ``x`` (zero at the right end)."""
        if x >= ONE:
            return ZERO
        return self.values[self._cell(x)]

    @property
    def total(self) -> Fraction:
        return self._prefix[-1]

    def support_cells(self) -> list[tuple[Fraction, Fraction]]:
        return [
            (lo, hi)
            for v, lo, hi in zip(self.values, self.breakpoints, self.breakpoints[1:])
            if v > 0
        ]


AtomInput = Union[Mapping[RationalLike, RationalLike], Iterable[tuple[RationalLike, RationalLike]]]


@dataclass(frozen=True)
class AtomSet:
    """Point masses, stored as sorted ``(location, mass)`` pairs."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self) -> None:
        raw = self.atoms.items() if isinstance(self.atoms, Mapping) else self.atoms
        pairs = sorted((as_rational(x), as_rational(m)) for x, m in raw)
        seen = set()
        for x, m in pairs:
            if not ZERO <= x <= ONE:
                raise MeasureError(f"atom location {format_rational(x)} outside [0, 1]")
            if m <= 0:
                raise MeasureError(f"atom mass at {format_rational(x)} must be positive")
            if x in seen:
                raise MeasureError(f"duplicate atom location {format_rational(x)}")
            seen.add(x)
        object.__setattr__(self, "atoms", tuple(pairs))

    @cached_property
    def _lookup(self) -> dict[Fraction, Fraction]:
        return dict(self.atoms)

    @cached_property
    def locations(self) -> tuple[Fraction, ...]:
        return tuple(x for x, _ in self.atoms)

    @cached_property
    def _prefix(self) -> tuple[Fraction, ...]:
        return (ZERO, *accumulate(m for _, m in self.atoms))

    def mass_at(self, x: Fraction) -> Fraction:
        return self._lookup.get(x, ZERO)

    def mass_below(self, x: Fraction) -> Fraction:
        """Total mass of atoms strictly left of ``x``."""
        return self._prefix[bisect.bisect_left(self.locations, x)]

    def mass_upto(self, x: Fraction) -> Fraction:
        """Total mass of atoms at or left of ``x``."""
        return self._prefix[bisect.bisect_right(self.locations, x)]

    @property
    def total(self) -> Fraction:
        return self._prefix[-1]

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)


@dataclass(frozen=True)
class ValueMeasure:
    """One player's valuation of the cake. Total mass must be exactly 1."""

    density: PiecewiseDensity = field(default_factory=PiecewiseDensity.uniform)
    atoms: AtomSet = field(default_factory=AtomSet)

    def __post_init__(self) -> None:
        if not isinstance(self.atoms, AtomSet):
            object.__setattr__(self, "atoms", AtomSet(self.atoms))
        total = self.density.total + self.atoms.total
        if total != ONE:
            raise MeasureError(f"total mass is {format_rational(total)}, expected 1")

    @classmethod
    def uniform(cls) -> "ValueMeasure":
        return cls(PiecewiseDensity.uniform(), AtomSet())

    @classmethod
    def from_pieces(
        cls,
        breakpoints: Sequence[RationalLike],
        values: Sequence[RationalLike],
        atoms: AtomInput = (),
    ) -> "ValueMeasure":
        return cls(PiecewiseDensity(tuple(breakpoints), tuple(values)), AtomSet(atoms))

    @classmethod
    def point_mass(cls, x: RationalLike) -> "ValueMeasure":
        return cls(PiecewiseDensity.zero(), AtomSet({x: 1}))

    @property
    def has_atoms(self) -> bool:
        return len(self.atoms) > 0

    @cached_property
    def grid(self) -> tuple[Fraction, ...]:
        """Density breakpoints together with atom locations, sorted."""
        return tuple(sorted(set(self.density.breakpoints) | set(self.atoms.locations)))

    def mass_before(self, x: Fraction) -> Fraction:
        """Measure of ``[0, x)``; left-continuous in ``x``."""
        return self.density.integral_to(x) + self.atoms.mass_below(x)

    def cdf(self, x: Fraction) -> Fraction:
        """Measure of ``[0, x]``; right-continuous in ``x``."""
        return self.density.integral_to(x) + self.atoms.mass_upto(x)

    def atom_at(self, x: Fraction) -> Fraction:
        return self.atoms.mass_at(x)

    def density_at(self, x: Fraction) -> Fraction:
        return self.density.at(x)

    def leftmost(self, level: Fraction, lo: Fraction = ZERO, strict: bool = False) -> Fraction | None:
        """Infimum of ``{y in [lo, 1] : mass_before(y) >= level}``.

        With ``strict`` the condition is ``> level``.  Returns ``None`` when
        the set is empty.  The infimum need not be attained when an atom at
        the returned point carries the mass past ``level``.
        """
        if strict:
            def reached(h: Fraction) -> bool:
                return h > level
        else:
            def reached(h: Fraction) -> bool:
                return h >= level

        if reached(self.mass_before(lo)):
            return lo
        if lo >= ONE:
            return None
        grid = self.grid
        i = bisect.bisect_right(grid, lo)
        y = lo
        base = self.mass_before(lo) + self.atom_at(lo)
        while True:
            if reached(base):
                return y
            end = grid[i]
            d = self.density_at(y)
            end_value = base + d * (end - y)
            if reached(end_value):
                return y + (level - base) / d
            if end == ONE:
                return None
            y = end
            base = end_value + self.atom_at(end)
            i += 1


Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class IntervalSet:
    """A portion of the cake.

    ``pieces`` are disjoint half-open intervals ``[a, b)``, stored merged and
    sorted.  A piece ending at 1 also owns the point 1 unless
    ``closed_at_one`` is false, which contiguous allocations use for every
    piece but the last.  ``atoms`` is ``None`` when point ownership follows
    the pieces, or an explicit frozenset of owned point locations, which
    overrides the pieces for atom bookkeeping.
    """

    pieces: tuple[Interval, ...] = ()
    atoms: frozenset[Fraction] | None = None
    closed_at_one: bool = True

    def __post_init__(self) -> None:
        raw = sorted((as_rational(a), as_rational(b)) for a, b in self.pieces)
        merged: list[list[Fraction]] = []
        for a, b in raw:
            if not ZERO <= a <= b <= ONE:
                raise MeasureError(f"bad piece [{format_rational(a)}, {format_rational(b)})")
            if a == b:
                continue
            if merged and a < merged[-1][1]:
                raise MeasureError("pieces overlap")
            if merged and a == merged[-1][1]:
                merged[-1][1] = b
            else:
                merged.append([a, b])
        object.__setattr__(self, "pieces", tuple((a, b) for a, b in merged))
        if not merged or merged[-1][1] != ONE:
            # the flag only matters for a piece ending at 1
            object.__setattr__(self, "closed_at_one", True)
        if self.atoms is not None:
            object.__setattr__(self, "atoms", frozenset(as_rational(x) for x in self.atoms))

    @classmethod
    def interval(cls, a: RationalLike, b: RationalLike) -> "IntervalSet":
        return cls(((as_rational(a), as_rational(b)),))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def covers(self, x: Fraction) -> bool:
        for a, b in self.pieces:
            if a <= x < b or (x == b == ONE and self.closed_at_one):
                return True
        return False

    def owns_point(self, x: Fraction) -> bool:
        if self.atoms is not None:
            return x in self.atoms
        return self.covers(x)

    @property
    def length(self) -> Fraction:
        return sum((b - a for a, b in self.pieces), ZERO)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        if self.atoms is None and other.atoms is None:
            atoms = None
        else:
            atoms = self._explicit_points() | other._explicit_points()
        return IntervalSet(self.pieces + other.pieces, atoms, self.closed_at_one or other.closed_at_one)

    def _explicit_points(self) -> frozenset[Fraction]:
        return self.atoms if self.atoms is not None else frozenset()

    def describe(self) -> str:
        parts = []
        for a, b in self.pieces:
            close = "]" if b == ONE and self.closed_at_one else ")"
            parts.append(f"[{format_rational(a)}, {format_rational(b)}{close}")
        pts = ", ".join(format_rational(x) for x in sorted(self.atoms or ()))
        if not parts:
            return f"{{{pts}}}"
        text = " u ".join(parts)
        if pts:
            text += f" + atoms{{{pts}}}"
        return text


@dataclass(frozen=True)
class Rect2DMeasure:
    """Piecewise-constant density on the unit square.

    ``cell_values[j][i]`` is the density on
    ``[x_breakpoints[i], x_breakpoints[i+1]) x [y_breakpoints[j], y_breakpoints[j+1])``:
    rows run bottom to top, columns left to right.
    """

    x_breakpoints: tuple[Fraction, ...]
    y_breakpoints: tuple[Fraction, ...]
    cell_values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        xs = tuple(as_rational(x) for x in self.x_breakpoints)
        ys = tuple(as_rational(y) for y in self.y_breakpoints)
        _check_breakpoints(xs, "x breakpoints")
        _check_breakpoints(ys, "y breakpoints")
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.cell_values)
        if len(rows) != len(ys) - 1 or any(len(r) != len(xs) - 1 for r in rows):
            raise MeasureError("cell grid does not match the breakpoints")
        if any(v < 0 for r in rows for v in r):
            raise MeasureError("densities must be nonnegative")
        total = sum(
            (
                v * (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
                for j, r in enumerate(rows)
                for i, v in enumerate(r)
            ),
            ZERO,
        )
        if total != ONE:
            raise MeasureError(f"total mass is {format_rational(total)}, expected 1")
        object.__setattr__(self, "x_breakpoints", xs)
        object.__setattr__(self, "y_breakpoints", ys)
        object.__setattr__(self, "cell_values", rows)


@dataclass(frozen=True)
class UniquePoint:
    x: Fraction


@dataclass(frozen=True)
class FlatInterval:
    lo: Fraction
    hi: Fraction

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class AtJump:
    x: Fraction


QuantileResult = Union[UniquePoint, FlatInterval, AtJump]


def value(m: ValueMeasure, s: IntervalSet) -> Fraction:
    """Measure of the portion ``s`` under ``m``."""
    total = sum((m.density.integral(a, b) for a, b in s.pieces), ZERO)
    for x, mass in m.atoms:
        if s.owns_point(x):
            total += mass
    return total


def cdf(m: ValueMeasure, x: RationalLike) -> Fraction:
    x = as_rational(x)
    if not ZERO <= x <= ONE:
        raise MeasureError(f"cdf argument {format_rational(x)} outside [0, 1]")
    return m.cdf(x)


def quantile(m: ValueMeasure, p: RationalLike) -> QuantileResult:
    """Classify the level-``p`` set of the CDF of ``m``.

    >>> quantile(ValueMeasure.uniform(), Fraction(1, 2))
    UniquePoint(x=Fraction(1, 2))
    """
    p = as_rational(p)
    if not ZERO < p < ONE:
        raise MeasureError("quantile level must lie strictly between 0 and 1")
    lo = m.leftmost(p)
    hi = m.leftmost(p, strict=True)
    # None means only the atom at 1 carries the CDF to the level
    lo = ONE if lo is None else lo
    hi = ONE if hi is None else hi
    if lo < hi:
        return FlatInterval(lo, hi)
    if m.atom_at(lo) > 0 and m.mass_before(lo) < p:
        return AtJump(lo)
    return UniquePoint(lo)


@dataclass(frozen=True)
class Cells:
    """Common refinement of several measures.

    ``densities[i][c]`` is measure ``i``'s density on cell ``c`` and
    ``atom_masses[i][a]`` its mass at ``atoms[a]`` (possibly zero).
    """

    bounds: tuple[Interval, ...]
    densities: tuple[tuple[Fraction, ...], ...]
    atoms: tuple[Fraction, ...]
    atom_masses: tuple[tuple[Fraction, ...], ...]

    def weights(self, i: int) -> tuple[Fraction, ...]:
        """Measure ``i``'s value of each whole cell (atoms excluded)."""
        return tuple(d * (b - a) for d, (a, b) in zip(self.densities[i], self.bounds))


def common_refinement(ms: Sequence[ValueMeasure]) -> Cells:
    if not ms:
        raise MeasureError("need at least one measure")
    points = sorted(set().union(*(m.grid for m in ms)))
    bounds = tuple(zip(points, points[1:]))
    densities = tuple(tuple(m.density_at(a) for a, _ in bounds) for m in ms)
    atoms = tuple(sorted(set().union(*(m.atoms.locations for m in ms))))
    masses = tuple(tuple(m.atom_at(x) for x in atoms) for m in ms)
    return Cells(bounds, densities, atoms, masses)


def mutually_abs_continuous(m1: ValueMeasure, m2: ValueMeasure) -> bool:
    cells = common_refinement([m1, m2])
    for d1, d2 in zip(*cells.densities):
        if (d1 > 0) != (d2 > 0):
            return False
    return m1.atoms.locations == m2.atoms.locations


def project_2d(m: Rect2DMeasure, axis: str) -> ValueMeasure:
    """Marginal of a square measure along ``axis`` ("X" or "Y")."""
    axis = axis.upper()
    xs, ys = m.x_breakpoints, m.y_breakpoints
    if axis == "X":
        widths = [ys[j + 1] - ys[j] for j in range(len(ys) - 1)]
        vals = [
            sum((m.cell_values[j][i] * widths[j] for j in range(len(widths))), ZERO)
            for i in range(len(xs) - 1)
        ]
        return ValueMeasure(PiecewiseDensity(xs, tuple(vals)), AtomSet())
    if axis == "Y":
        widths = [xs[i + 1] - xs[i] for i in range(len(xs) - 1)]
        vals = [
            sum((v * w for v, w in zip(row, widths)), ZERO) for row in m.cell_values
        ]
        return ValueMeasure(PiecewiseDensity(ys, tuple(vals)), AtomSet())
    raise MeasureError(f"unknown axis {axis!r}; expected X or Y")
