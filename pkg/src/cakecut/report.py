"""Run a scenario and render the findings as text or JSON.

Degeneracies and dominated allocations are results, not failures: a
procedure error becomes an ``error`` section in the report.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from ._rational import format_rational as fmt
from .efficiency import (
    DominanceCertificate,
    find_dominating_contiguous_utilities,
    find_dominating_utilities,
)
from .measure import ValueMeasure
from .procedures import (
    Allocation,
    CCResult,
    EPResult,
    NonUniqueMedian,
    NoSolution,
    ProcedureError,
    SPResult,
)
from .properties import check_fairness, identical_reports_floor, run_procedure
from .scenario import FloorSpec, Scenario

__all__ = ["Report", "run_scenario"]


@dataclass(frozen=True)
class Report:
    data: dict

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2) + "\n"

    def to_text(self) -> str:
        lines: list[str] = []
        _render(self.data, 0, lines)
        return "\n".join(lines) + "\n"

    def render(self, fmt_name: str) -> str:
        return self.to_json() if fmt_name == "json" else self.to_text()


def _render(node: Any, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    for key, val in node.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            _render(val, depth + 1, lines)
        elif isinstance(val, list) and val and all(isinstance(v, dict) for v in val):
            lines.append(f"{pad}{key}:")
            for item in val:
                lines.append(f"{pad}  -")
                _render(item, depth + 2, lines)
        elif isinstance(val, list):
            lines.append(f"{pad}{key}: " + ", ".join(_scalar(v) for v in val))
        else:
            lines.append(f"{pad}{key}: {_scalar(val)}")


def _scalar(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _per_player(names: Sequence[str], values: Sequence[Any]) -> dict:
    return {n: v for n, v in zip(names, values)}


def _rats(values: Sequence[Fraction | None]) -> list:
    return [None if v is None else fmt(v) for v in values]


def _portions(names: Sequence[str], alloc: Allocation) -> dict:
    return _per_player(names, [p.describe() for p in alloc.portions])


def _result_section(names: Sequence[str], res) -> dict:
    out: dict[str, Any] = {}
    if isinstance(res, CCResult):
        out["cut"] = fmt(res.cut_point)
        out["cutter"] = names[res.cutter_index]
        out["chooser"] = names[res.chooser_index]
        out["degeneracy"] = res.degeneracy
    elif isinstance(res, SPResult):
        out["medians"] = _per_player(names, _rats((res.median_1, res.median_2)))
        out["surplus"] = _rats(res.surplus)
        out["cut"] = fmt(res.e)
        out["surplus_proportions"] = _per_player(names, _rats(res.surplus_proportions))
        out["degeneracy"] = res.degeneracy
    elif isinstance(res, EPResult):
        out["order"] = [names[i] for i in res.order]
        out["cuts"] = _rats(res.cuts)
        out["common_value"] = fmt(res.common_value)
    out["portions"] = _portions(names, res.allocation)
    out["payoffs"] = _per_player(names, _rats(res.payoffs))
    return out


def _error_section(names: Sequence[str], err: ProcedureError) -> dict:
    out: dict[str, Any] = {"kind": type(err).__name__}
    if isinstance(err, NonUniqueMedian):
        out["player"] = names[err.player]
        out["flat_interval"] = _rats((err.interval.lo, err.interval.hi))
    if isinstance(err, NoSolution):
        out["at"] = None if err.at is None else fmt(err.at)
        out["t"] = None if err.t is None else fmt(err.t)
    out["message"] = str(err)
    return out


def _certificate(names: Sequence[str], cert: DominanceCertificate | None, axis: str | None) -> dict:
    if cert is None:
        return {"status": "EFFICIENT"}
    out: dict[str, Any] = {"status": "DOMINATED"}
    if axis is not None:
        out["axis"] = axis
    if cert.cuts is not None:
        out["cuts"] = _rats(cert.cuts)
        out["order"] = [names[i] for i in cert.order]
    out["portions"] = _portions(names, cert.allocation)
    out["utilities_before"] = _per_player(names, _rats(cert.utilities_before))
    out["utilities_after"] = _per_player(names, _rats(cert.utilities_after))
    out["improvements"] = _per_player(names, _rats(cert.improvements))
    return out


def _dominance(s: Scenario, base: Sequence[Fraction], search, axis: str | None) -> dict:
    # square cakes: try every declared cut direction, in declared order
    axes = s.axes if s.is_2d else (None,)
    for ax in axes:
        cert = search(base, s.measures(ax))
        if cert is not None:
            return _certificate(s.names, cert, ax)
    return _certificate(s.names, None, None)


def _fairness(names: Sequence[str], alloc: Allocation, ms: Sequence[ValueMeasure]) -> dict:
    rep = check_fairness(alloc, ms)
    out: dict[str, Any] = {
        "proportional": rep.proportional,
        "envy_free": rep.envy_free,
        "equitable": rep.equitable,
        "cross_values": {
            n: _per_player(names, _rats(row)) for n, row in zip(names, rep.cross_values)
        },
    }
    if rep.witness is not None:
        w = rep.witness
        out["witness"] = {
            "check": w.check,
            "players": [names[i] for i in w.players],
            "values": _rats(w.values),
        }
    return out


def _allocation_checks(s: Scenario, alloc: Allocation, axis: str | None) -> dict:
    ms = s.measures(axis)
    base = alloc.payoffs(ms)
    out: dict[str, Any] = {}
    for check in s.checks:
        if check == "pareto":
            out[check] = _dominance(s, base, find_dominating_utilities, axis)
        elif check == "pareto-contiguous":
            out[check] = _dominance(s, base, find_dominating_contiguous_utilities, axis)
        elif check == "fairness":
            out[check] = _fairness(s.names, alloc, ms)
    return out


def _run_section(s: Scenario, axis: str | None) -> dict:
    section: dict[str, Any] = {"axis": axis, "procedure": s.procedure.name}
    reported = s.reports(axis)
    try:
        res = run_procedure(s.procedure.name, reported, s.procedure.order)
    except ProcedureError as err:
        section["error"] = _error_section(s.names, err)
        return section
    section["result"] = _result_section(s.names, res)
    if s.has_reports:
        truth = s.measures(axis)
        section["true_payoffs"] = _per_player(s.names, _rats(res.allocation.payoffs(truth)))
    checks = _allocation_checks(s, res.allocation, axis)
    if checks:
        section["checks"] = checks
    return section


def _floor_section(s: Scenario) -> list:
    out = []
    axis = s.axes[0] if s.is_2d else None
    # one floor run per distinct true measure, labelled by its first holder
    truths: list[tuple[str, ValueMeasure]] = []
    for name, m in zip(s.names, s.measures(axis)):
        if all(m != other for _, other in truths):
            truths.append((name, m))
    floors = list(s.floor)
    if not floors and s.procedure is not None:
        floors = [FloorSpec(s.procedure.name, len(s.players))]
    for fs in floors:
        for name, m in truths:
            entry: dict[str, Any] = {"procedure": fs.procedure, "n": fs.n, "measure_of": name}
            try:
                fl = identical_reports_floor(fs.procedure, m, fs.n)
            except ProcedureError as err:
                entry["error"] = _error_section(s.names, err)
            else:
                entry["payoffs"] = _rats(fl.payoffs)
                entry["min_payoff"] = fmt(fl.min_payoff)
                entry["share"] = fmt(Fraction(1, fs.n))
                entry["holds"] = fl.holds
            out.append(entry)
    return out


def run_scenario(s: Scenario) -> Report:
    data: dict[str, Any] = {"scenario": s.name, "players": list(s.names)}
    if s.procedure is not None:
        axes = s.axes if s.is_2d else (None,)
        data["runs"] = [_run_section(s, ax) for ax in axes]
    if s.baseline is not None:
        alloc = s.baseline.allocation
        ms = s.measures(s.baseline.axis)
        base: dict[str, Any] = {"axis": s.baseline.axis}
        base["portions"] = _portions(s.names, alloc)
        base["utilities"] = _per_player(s.names, _rats(alloc.payoffs(ms)))
        checks = _allocation_checks(s, alloc, s.baseline.axis)
        if checks:
            base["checks"] = checks
        data["baseline"] = base
    if "strategy-floor" in s.checks:
        data["strategy_floor"] = _floor_section(s)
    return Report(data)
