"""Exact-arithmetic cake cutting: procedures, dominance audits, fairness checks."""
from .efficiency import (
    DominanceCertificate,
    FractionAllocation,
    find_dominating,
    find_dominating_contiguous,
    utilities,
    weighted_optimal,
)
from .measure import (
    AtJump,
    AtomSet,
    FlatInterval,
    IntervalSet,
    PiecewiseDensity,
    Rect2DMeasure,
    UniquePoint,
    ValueMeasure,
    cdf,
    common_refinement,
    mutually_abs_continuous,
    project_2d,
    quantile,
    value,
)
from .procedures import (
    Allocation,
    NonUniqueMedian,
    NoSolution,
    ProcedureError,
    cut_and_choose,
    ep_best_order,
    equitability_procedure,
    surplus_procedure,
)
from .properties import (
    check_fairness,
    identical_reports_floor,
    payoffs_under_reports,
    rightward_shift_probe,
)
from .report import run_scenario
from .scenario import builtin_counterexample, parse_scenario, serialize_scenario

__version__ = "0.1.0"

__all__ = [
    "DominanceCertificate",
    "FractionAllocation",
    "find_dominating",
    "find_dominating_contiguous",
    "utilities",
    "weighted_optimal",
    "AtJump",
    "AtomSet",
    "FlatInterval",
    "IntervalSet",
    "PiecewiseDensity",
    "Rect2DMeasure",
    "UniquePoint",
    "ValueMeasure",
    "cdf",
    "common_refinement",
    "mutually_abs_continuous",
    "project_2d",
    "quantile",
    "value",
    "Allocation",
    "NonUniqueMedian",
    "NoSolution",
    "ProcedureError",
    "cut_and_choose",
    "ep_best_order",
    "equitability_procedure",
    "surplus_procedure",
    "check_fairness",
    "identical_reports_floor",
    "payoffs_under_reports",
    "rightward_shift_probe",
    "run_scenario",
    "builtin_counterexample",
    "parse_scenario",
    "serialize_scenario",
]
