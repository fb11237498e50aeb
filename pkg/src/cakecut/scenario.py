"""Scenario documents: JSON with every rational written as a ``"p/q"`` string.

Document layout::

    {
      "name": "counterexample-2",
      "description": "...",                      # optional
      "players": [
        {"name": "p1",
         "measure": {"breakpoints": ["0", "1"], "values": ["1"],
                     "atoms": [{"at": "1/2", "mass": "1/4"}]},   # atoms optional
         "report": {...}},                        # optional misreport, same shape
        {"name": "p2",
         "square": {"x_breakpoints": [...], "y_breakpoints": [...],
                    "cells": [[...], ...]}}       # rows bottom to top
      ],
      "axes": ["X", "Y"],                         # required with square players
      "procedure": {"name": "ep", "order": [1, 0]},   # or null
      "checks": ["pareto", "pareto-contiguous", "fairness", "strategy-floor"],
      "floor": [{"procedure": "sp", "n": 2}],     # optional, for strategy-floor
      "baseline": {"axis": "Y",                   # axis only for square scenarios
                   "portions": [{"pieces": [["1/2", "1"]], "atoms": ["1/2"]}, ...]}
    }

Player indices in ``order`` are 0-based.  A portion's ``atoms`` list, when
present, makes its atom ownership explicit instead of following its pieces.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ._rational import as_rational, format_rational
from .measure import (
    AtomSet,
    IntervalSet,
    MeasureError,
    PiecewiseDensity,
    Rect2DMeasure,
    ValueMeasure,
    project_2d,
)
from .procedures import PROCEDURES, Allocation, AllocationError

__all__ = [
    "ScenarioError",
    "PlayerSpec",
    "ProcedureSpec",
    "FloorSpec",
    "BaselineSpec",
    "Scenario",
    "CHECKS",
    "parse_scenario",
    "serialize_scenario",
    "builtin_counterexample",
]

CHECKS = ("pareto", "pareto-contiguous", "fairness", "strategy-floor")
AXES = ("X", "Y")


class ScenarioError(ValueError):
    """Malformed or invalid scenario document."""


@dataclass(frozen=True)
class PlayerSpec:
    name: str
    measure: ValueMeasure | None = None
    square: Rect2DMeasure | None = None
    report: ValueMeasure | None = None


@dataclass(frozen=True)
class ProcedureSpec:
    name: str
    order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class FloorSpec:
    procedure: str
    n: int


@dataclass(frozen=True)
class BaselineSpec:
    portions: tuple[IntervalSet, ...]
    axis: str | None = None

    @property
    def allocation(self) -> Allocation:
        return Allocation(self.portions)


@dataclass(frozen=True)
class Scenario:
    name: str
    players: tuple[PlayerSpec, ...]
    procedure: ProcedureSpec | None
    checks: tuple[str, ...] = ()
    axes: tuple[str, ...] = ()
    floor: tuple[FloorSpec, ...] = ()
    baseline: BaselineSpec | None = None
    description: str = ""

    @property
    def is_2d(self) -> bool:
        return bool(self.axes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.players)

    def measures(self, axis: str | None = None) -> tuple[ValueMeasure, ...]:
        """True measures, projected onto ``axis`` for square scenarios."""
        if self.is_2d:
            return tuple(project_2d(p.square, axis) for p in self.players)
        return tuple(p.measure for p in self.players)

    def reports(self, axis: str | None = None) -> tuple[ValueMeasure, ...]:
        truth = self.measures(axis)
        return tuple(p.report or m for p, m in zip(self.players, truth))

    @property
    def has_reports(self) -> bool:
        return any(p.report is not None for p in self.players)


# -- parsing ----------------------------------------------------------------

def _rat(value: Any, where: str) -> Fraction:
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        try:
            return as_rational(value)
        except (ValueError, TypeError) as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    raise ScenarioError(f"{where}: expected a rational string like \"1/2\", got {value!r}")


def _rats(values: Any, where: str) -> tuple[Fraction, ...]:
    if not isinstance(values, list):
        raise ScenarioError(f"{where}: expected a list")
    return tuple(_rat(v, f"{where}[{i}]") for i, v in enumerate(values))


def _require(obj: Any, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioError(f"{where}: missing field {key!r}")
    return obj[key]


def _parse_measure(doc: Any, where: str) -> ValueMeasure:
    bps = _rats(_require(doc, "breakpoints", where), f"{where}.breakpoints")
    vals = _rats(_require(doc, "values", where), f"{where}.values")
    atoms_doc = doc.get("atoms", [])
    if not isinstance(atoms_doc, list):
        raise ScenarioError(f"{where}.atoms: expected a list")
    atoms = [
        (_rat(_require(a, "at", f"{where}.atoms[{i}]"), f"{where}.atoms[{i}].at"),
         _rat(_require(a, "mass", f"{where}.atoms[{i}]"), f"{where}.atoms[{i}].mass"))
        for i, a in enumerate(atoms_doc)
    ]
    try:
        return ValueMeasure(PiecewiseDensity(bps, vals), AtomSet(atoms))
    except MeasureError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _parse_square(doc: Any, where: str) -> Rect2DMeasure:
    xs = _rats(_require(doc, "x_breakpoints", where), f"{where}.x_breakpoints")
    ys = _rats(_require(doc, "y_breakpoints", where), f"{where}.y_breakpoints")
    cells = _require(doc, "cells", where)
    if not isinstance(cells, list):
        raise ScenarioError(f"{where}.cells: expected a list of rows")
    rows = tuple(_rats(r, f"{where}.cells[{j}]") for j, r in enumerate(cells))
    try:
        return Rect2DMeasure(xs, ys, rows)
    except MeasureError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _parse_portion(doc: Any, where: str) -> IntervalSet:
    pieces_doc = _require(doc, "pieces", where)
    if not isinstance(pieces_doc, list):
        raise ScenarioError(f"{where}.pieces: expected a list")
    pieces = []
    for i, p in enumerate(pieces_doc):
        pair = _rats(p, f"{where}.pieces[{i}]")
        if len(pair) != 2:
            raise ScenarioError(f"{where}.pieces[{i}]: expected [start, end]")
        pieces.append(pair)
    atoms = doc.get("atoms")
    atoms = None if atoms is None else frozenset(_rats(atoms, f"{where}.atoms"))
    try:
        return IntervalSet(tuple(pieces), atoms)
    except MeasureError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _from_doc(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    name = doc.get("name", "scenario")
    players_doc = _require(doc, "players", "scenario")
    if not isinstance(players_doc, list) or len(players_doc) < 2:
        raise ScenarioError("scenario needs at least 2 players")
    players = []
    for i, p in enumerate(players_doc):
        pname = _require(p, "name", f"players[{i}]")
        where = f"player {pname!r}"
        measure = _parse_measure(p["measure"], where) if "measure" in p else None
        square = _parse_square(p["square"], where) if "square" in p else None
        if (measure is None) == (square is None):
            raise ScenarioError(f"{where}: give exactly one of 'measure' or 'square'")
        report = _parse_measure(p["report"], f"{where} report") if "report" in p else None
        players.append(PlayerSpec(pname, measure, square, report))
    if len({p.name for p in players}) != len(players):
        raise ScenarioError("player names must be unique")

    axes = tuple(doc.get("axes", ()))
    squares = [p.square is not None for p in players]
    if any(squares):
        if not all(squares):
            raise ScenarioError("cannot mix square and interval players")
        if not axes or any(a not in AXES for a in axes):
            raise ScenarioError("square scenarios must declare axes from X, Y")
        if any(p.report is not None for p in players):
            raise ScenarioError("reports are only supported for interval players")
    elif axes:
        raise ScenarioError("axes are only meaningful for square players")

    proc_doc = doc.get("procedure")
    procedure = None
    if proc_doc is not None:
        pname = _require(proc_doc, "name", "procedure")
        if pname not in PROCEDURES:
            raise ScenarioError(f"unknown procedure {pname!r}; choose from {', '.join(PROCEDURES)}")
        order = proc_doc.get("order")
        if order is not None:
            if sorted(order) != list(range(len(players))):
                raise ScenarioError(f"procedure.order {order} is not a permutation of player indices")
            order = tuple(order)
        procedure = ProcedureSpec(pname, order)

    checks = tuple(doc.get("checks", ()))
    for c in checks:
        if c not in CHECKS:
            raise ScenarioError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")

    floor = []
    for i, f in enumerate(doc.get("floor", ())):
        proc = _require(f, "procedure", f"floor[{i}]")
        if proc not in PROCEDURES:
            raise ScenarioError(f"floor[{i}]: unknown procedure {proc!r}")
        n = _require(f, "n", f"floor[{i}]")
        if not isinstance(n, int) or n < 2:
            raise ScenarioError(f"floor[{i}]: n must be an integer >= 2")
        floor.append(FloorSpec(proc, n))

    baseline = None
    if doc.get("baseline") is not None:
        bdoc = doc["baseline"]
        portions = tuple(
            _parse_portion(p, f"baseline.portions[{i}]")
            for i, p in enumerate(_require(bdoc, "portions", "baseline"))
        )
        axis = bdoc.get("axis")
        if any(squares) and axis not in AXES:
            raise ScenarioError("baseline.axis must be X or Y for square scenarios")
        if len(portions) != len(players):
            raise ScenarioError("baseline needs one portion per player")
        baseline = BaselineSpec(portions, axis)

    scenario = Scenario(
        name=name,
        players=tuple(players),
        procedure=procedure,
        checks=checks,
        axes=axes,
        floor=tuple(floor),
        baseline=baseline,
        description=doc.get("description", ""),
    )
    if baseline is not None:
        try:
            baseline.allocation.validate(scenario.measures(baseline.axis))
        except AllocationError as exc:
            raise ScenarioError(f"baseline: {exc}") from None
    return scenario


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return _from_doc(doc)


# -- serialization ----------------------------------------------------------

def _fmt_all(values) -> list[str]:
    return [format_rational(v) for v in values]


def measure_doc(m: ValueMeasure) -> dict:
    doc: dict[str, Any] = {
        "breakpoints": _fmt_all(m.density.breakpoints),
        "values": _fmt_all(m.density.values),
    }
    if m.has_atoms:
        doc["atoms"] = [{"at": format_rational(x), "mass": format_rational(w)} for x, w in m.atoms]
    return doc


def portion_doc(s: IntervalSet) -> dict:
    doc: dict[str, Any] = {"pieces": [_fmt_all(p) for p in s.pieces]}
    if s.atoms is not None:
        doc["atoms"] = _fmt_all(sorted(s.atoms))
    return doc


def _to_doc(s: Scenario) -> dict:
    players = []
    for p in s.players:
        entry: dict[str, Any] = {"name": p.name}
        if p.measure is not None:
            entry["measure"] = measure_doc(p.measure)
        else:
            sq = p.square
            entry["square"] = {
                "x_breakpoints": _fmt_all(sq.x_breakpoints),
                "y_breakpoints": _fmt_all(sq.y_breakpoints),
                "cells": [_fmt_all(r) for r in sq.cell_values],
            }
        if p.report is not None:
            entry["report"] = measure_doc(p.report)
        players.append(entry)
    doc: dict[str, Any] = {"name": s.name}
    if s.description:
        doc["description"] = s.description
    doc["players"] = players
    if s.axes:
        doc["axes"] = list(s.axes)
    if s.procedure is None:
        doc["procedure"] = None
    else:
        proc: dict[str, Any] = {"name": s.procedure.name}
        if s.procedure.order is not None:
            proc["order"] = list(s.procedure.order)
        doc["procedure"] = proc
    doc["checks"] = list(s.checks)
    if s.floor:
        doc["floor"] = [{"procedure": f.procedure, "n": f.n} for f in s.floor]
    if s.baseline is not None:
        base: dict[str, Any] = {}
        if s.baseline.axis is not None:
            base["axis"] = s.baseline.axis
        base["portions"] = [portion_doc(p) for p in s.baseline.portions]
        doc["baseline"] = base
    return doc


def serialize_scenario(s: Scenario) -> str:
    return json.dumps(_to_doc(s), indent=2) + "\n"


# -- built-in counterexamples -----------------------------------------------

_UNIFORM = {"breakpoints": ["0", "1"], "values": ["1"]}

_BUILTINS: dict[int, dict] = {
    1: {
        "name": "counterexample-1",
        "description": (
            "Unit-square cake. p1 values only the top half, p2 only the bottom half, "
            "both uniformly there. Cut-and-choose with p1 cutting, for vertical (X) and "
            "horizontal (Y) cuts, audited against the top/bottom split."
        ),
        "players": [
            {"name": "p1", "square": {"x_breakpoints": ["0", "1"],
                                      "y_breakpoints": ["0", "1/2", "1"],
                                      "cells": [["0"], ["2"]]}},
            {"name": "p2", "square": {"x_breakpoints": ["0", "1"],
                                      "y_breakpoints": ["0", "1/2", "1"],
                                      "cells": [["2"], ["0"]]}},
        ],
        "axes": ["X", "Y"],
        "procedure": {"name": "cut-and-choose"},
        "checks": ["pareto", "fairness"],
        "baseline": {"axis": "Y", "portions": [{"pieces": [["1/2", "1"]]},
                                               {"pieces": [["0", "1/2"]]}]},
    },
    2: {
        "name": "counterexample-2",
        "description": (
            "Interval cake. p1 is uniform; p2 has density 2 on the outer quarters and 0 "
            "between. Cut-and-choose with p1 cutting, audited against giving p2 [0, 1/4)."
        ),
        "players": [
            {"name": "p1", "measure": _UNIFORM},
            {"name": "p2", "measure": {"breakpoints": ["0", "1/4", "3/4", "1"],
                                       "values": ["2", "0", "2"]}},
        ],
        "procedure": {"name": "cut-and-choose"},
        "checks": ["pareto", "pareto-contiguous", "fairness"],
        "baseline": {"portions": [{"pieces": [["1/4", "1"]]}, {"pieces": [["0", "1/4"]]}]},
    },
    3: {
        "name": "counterexample-3",
        "description": (
            "Identical uniform reports. Disjoint portions of a unit cake valued the same "
            "way cannot all exceed 1/n, so some player gets at most 1/n."
        ),
        "players": [
            {"name": "p1", "measure": _UNIFORM},
            {"name": "p2", "measure": _UNIFORM},
        ],
        "procedure": {"name": "sp"},
        "checks": ["fairness", "strategy-floor"],
        "floor": [{"procedure": "sp", "n": 2}, {"procedure": "ep", "n": 2},
                  {"procedure": "ep", "n": 3}],
    },
}


def builtin_document(cid: int) -> str:
    if cid not in _BUILTINS:
        raise ScenarioError(f"unknown counterexample {cid}; choose 1, 2 or 3")
    return json.dumps(_BUILTINS[cid], indent=2) + "\n"


def builtin_counterexample(cid: int) -> Scenario:
    return parse_scenario(builtin_document(cid))
