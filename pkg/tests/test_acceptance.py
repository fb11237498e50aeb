"""Acceptance gate: one PASS/FAIL line per criterion.

Every equality is exact.  Single criteria must finish in under 1 second,
randomized suites (1000+ seeded cases each) in under 60 seconds.  The
lines are printed in the pytest terminal summary, or directly with
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import io
import random
import time
from contextlib import redirect_stdout
from fractions import Fraction as F
from pathlib import Path

import pytest

from _gen import random_measure, random_positive_measure
from cakecut import (
    Allocation,
    IntervalSet,
    NonUniqueMedian,
    NoSolution,
    ValueMeasure,
    check_fairness,
    cut_and_choose,
    equitability_procedure,
    find_dominating,
    find_dominating_contiguous,
    identical_reports_floor,
    mutually_abs_continuous,
    payoffs_under_reports,
    quantile,
    rightward_shift_probe,
    surplus_procedure,
    value,
)
from cakecut.cli import main
from cakecut.efficiency import find_dominating_utilities
from cakecut.measure import UniquePoint
from cakecut.scenario import builtin_counterexample
from test_efficiency import frontier_max

SINGLE_LIMIT = 1.0
SUITE_LIMIT = 60.0
CASES = 1000

RESULTS: list[str] = []

U = ValueMeasure.uniform()
OUTER = ValueMeasure.from_pieces(["0", "1/4", "3/4", "1"], [2, 0, 2])
SKEW = ValueMeasure.from_pieces(["0", "1/2", "1"], ["1/2", "3/2"])
FRONT = ValueMeasure.from_pieces(["0", "1/4", "1"], [4, 0])
GOLDEN = Path(__file__).parent / "golden"


def gate(label: str, limit: float = SINGLE_LIMIT):
    """Run ``check`` (returns ``(ok, detail)``), record one line, assert."""

    def wrap(check):
        def run():
            start = time.perf_counter()
            ok, detail = check()
            elapsed = time.perf_counter() - start
            fast = elapsed < limit
            verdict = "PASS" if ok and fast else "FAIL"
            line = f"{verdict}  {label}: {detail} [{elapsed:.2f}s < {limit:.0f}s: {'yes' if fast else 'no'}]"
            RESULTS.append(line)
            print(line)
            assert ok, line
            assert fast, line

        run.__name__ = check.__name__
        run.__doc__ = label
        return run

    return wrap


@gate("1  cut-and-choose on the outer-quarters pair is dominated")
def test_c01_counterexample_two_pipeline():
    ms = [U, OUTER]
    cc = cut_and_choose(U, OUTER)
    cert = find_dominating(cc.allocation, ms)
    alt = Allocation((IntervalSet.interval("1/4", 1), IntervalSet.interval(0, "1/4")))
    alt_u = alt.payoffs(ms)
    ok = (
        cc.cut_point == F(1, 2)
        and cc.payoffs == (F(1, 2), F(1, 2))
        and cert is not None
        and cert.verify(ms)
        and alt_u == (F(3, 4), F(1, 2))
        and alt_u[0] > cc.payoffs[0]
        and alt_u[1] >= cc.payoffs[1]
    )
    return ok, f"cut {cc.cut_point}, payoffs {_fmt(cc.payoffs)}, alternative {_fmt(alt_u)}"


@gate("2  one-cut certificate on the outer-quarters pair")
def test_c02_counterexample_two_contiguous():
    ms = [U, OUTER]
    cert = find_dominating_contiguous(cut_and_choose(U, OUTER).allocation, ms)
    ok = cert is not None and len(cert.cuts) == 1 and cert.verify(ms)
    return ok, f"cuts {_fmt(cert.cuts)}, order {cert.order}, utilities {_fmt(cert.utilities_after)}"


@gate("3  square cake, both cut directions dominated by top/bottom split")
def test_c03_counterexample_one_pipeline():
    s = builtin_counterexample(1)
    ys, xs = s.measures("Y"), s.measures("X")
    med = quantile(ys[0], F(1, 2))
    cy = cut_and_choose(*ys)
    cx = cut_and_choose(*xs)
    base = s.baseline.allocation.payoffs(ys)
    cert_y = find_dominating(cy.allocation, ys)
    # vertical strips are audited against the horizontal-cut allocations
    cert_x = find_dominating_utilities(cx.payoffs, ys)
    ok = (
        med == UniquePoint(F(3, 4))
        and cy.payoffs == (F(1, 2), F(1))
        and cx.cut_point == F(1, 2)
        and cx.payoffs == (F(1, 2), F(1, 2))
        and base == (F(1), F(1))
        and cert_y is not None
        and cert_x is not None
    )
    return ok, f"Y median {med.x}, Y payoffs {_fmt(cy.payoffs)}, X payoffs {_fmt(cx.payoffs)}, baseline {_fmt(base)}"


@gate("4  SP with the outer-quarters player has no unique median")
def test_c04_sp_degeneracy():
    seen = []
    for pair in ((U, OUTER), (OUTER, U), (SKEW, OUTER), (OUTER, SKEW), (OUTER, OUTER)):
        try:
            surplus_procedure(*pair)
        except NonUniqueMedian as err:
            seen.append((err.interval.lo, err.interval.hi))
        else:
            seen.append(None)
    ok = all(iv == (F(1, 4), F(3, 4)) for iv in seen)
    return ok, f"flat interval [1/4, 3/4] in {sum(iv is not None for iv in seen)}/{len(seen)} pairs"


@gate("5  SP worked instance")
def test_c05_sp_nondegenerate():
    r = surplus_procedure(U, SKEW)
    p1 = value(U, IntervalSet.interval(0, r.e))
    p2 = value(SKEW, IntervalSet.interval(r.e, 1))
    prop1 = value(U, IntervalSet.interval(r.median_1, r.e)) / value(U, IntervalSet.interval(r.median_1, r.median_2))
    prop2 = value(SKEW, IntervalSet.interval(r.e, r.median_2)) / value(SKEW, IntervalSet.interval(r.median_1, r.median_2))
    ok = (
        (r.median_1, r.median_2) == (F(1, 2), F(2, 3))
        and r.e == F(7, 12)
        and r.payoffs == (p1, p2) == (F(7, 12), F(5, 8))
        and r.surplus_proportions == (prop1, prop2) == (F(1, 2), F(1, 2))
    )
    return ok, f"medians {_fmt((r.median_1, r.median_2))}, e {r.e}, payoffs {_fmt(r.payoffs)}"


@gate("6  EP three uniform players; atom instance has no solution")
def test_c06_ep():
    r = equitability_procedure([U, U, U])
    try:
        equitability_procedure([ValueMeasure.point_mass(F(1, 2)), U])
        raised = False
    except NoSolution:
        raised = True
    ok = r.cuts == (F(1, 3), F(2, 3)) and r.common_value == F(1, 3) and raised
    return ok, f"cuts {_fmt(r.cuts)}, t {r.common_value}, atom instance NoSolution: {raised}"


@gate("7  EP output on the outer-quarters pair is dominated")
def test_c07_ep_not_efficient():
    ms = [U, OUTER]
    r = equitability_procedure(ms)
    a = find_dominating(r.allocation, ms)
    b = find_dominating_contiguous(r.allocation, ms)
    ok = r.common_value == F(1, 2) and a is not None and b is not None and a.verify(ms) and b.verify(ms)
    return ok, f"t {r.common_value}, unrestricted {_status(a)}, contiguous {_status(b)}"


@gate("8  identical reports floor; misreport payoff")
def test_c08_strategy_floor():
    floors = [identical_reports_floor(p, U, n) for p, n in (("sp", 2), ("ep", 2), ("ep", 3))]
    mis = payoffs_under_reports("sp", [U, U], [FRONT, U])
    ok = all(f.min_payoff == F(1, f.n) for f in floors) and mis.true_payoffs[0] == F(7, 32) < F(1, 2)
    mins = ", ".join(f"{f.procedure}/n={f.n}: {f.min_payoff}" for f in floors)
    return ok, f"{mins}; misreport true payoff {mis.true_payoffs[0]}"


@gate("9  rightward-shift probe on two uniform players")
def test_c09_shift_probe():
    res = rightward_shift_probe([U, U], [F(1, 2)])
    return res.exhausted, f"exhausted: {res.exhausted}, best equal value {res.best_equal_value}"


# -- criterion 10: randomized suites ----------------------------------------

def _suite(seed: int, draw, check) -> tuple[bool, str]:
    rng = random.Random(seed)
    bad = 0
    for _ in range(CASES):
        if not check(*draw(rng)):
            bad += 1
    return bad == 0, f"{CASES - bad}/{CASES} cases (seed {seed})"


def _measure_with_atoms(rng):
    return (random_measure(rng, atoms=rng.randint(0, 2)),)


def _pair(rng, atoms=True):
    k = (lambda: rng.randint(0, 1)) if atoms else (lambda: 0)
    return random_measure(rng, atoms=k()), random_measure(rng, atoms=k())


@gate("10a measure additivity and normalization", SUITE_LIMIT)
def test_c10a_measure_additivity():
    def check(m):
        pts = sorted({F(0), F(1), *m.grid, F(1, 3), F(5, 7)})
        parts = [IntervalSet.interval(a, b) for a, b in zip(pts, pts[1:])]
        return sum(value(m, p) for p in parts) == 1 and m.cdf(F(1)) == 1 and m.mass_before(F(0)) == 0

    return _suite(101, _measure_with_atoms, check)


@gate("10b allocations partition the cake", SUITE_LIMIT)
def test_c10b_partition():
    def draw(rng):
        n = rng.randint(2, 4)
        cuts = sorted(F(rng.randint(0, 12), 12) for _ in range(n - 1))
        order = list(range(n))
        rng.shuffle(order)
        return [random_measure(rng, atoms=2) for _ in range(n)], cuts, order

    def check(ms, cuts, order):
        alloc = Allocation.contiguous(cuts, order)
        alloc.validate(ms)
        cc = cut_and_choose(ms[0], ms[1])
        cc.allocation.validate(ms[:2])
        return all(sum(value(m, p) for p in alloc.portions) == 1 for m in ms)

    return _suite(102, draw, check)


@gate("10c SP equalizes surplus proportions", SUITE_LIMIT)
def test_c10c_sp_proportions():
    def draw(rng):
        return random_positive_measure(rng), random_positive_measure(rng)

    def check(f1, f2):
        r = surplus_procedure(f1, f2)
        if r.degeneracy is not None:
            return r.degeneracy == "equal-medians" and r.median_1 == r.median_2
        lo, hi = sorted((r.median_1, r.median_2))
        left, right = (f1, f2) if r.median_1 < r.median_2 else (f2, f1)
        pl = value(left, IntervalSet.interval(lo, r.e)) / value(left, IntervalSet.interval(lo, hi))
        pr = value(right, IntervalSet.interval(r.e, hi)) / value(right, IntervalSet.interval(lo, hi))
        return pl == pr and r.surplus_proportions in ((pl, pr), (pr, pl))

    return _suite(103, draw, check)


@gate("10d EP payoffs are equal", SUITE_LIMIT)
def test_c10d_ep_equal():
    def draw(rng):
        return ([random_measure(rng) for _ in range(rng.randint(2, 3))],)

    def check(ms):
        r = equitability_procedure(ms)
        r.allocation.validate(ms)
        return set(r.allocation.payoffs(ms)) == {r.common_value}

    return _suite(104, draw, check)


@gate("10e chooser payoff at least 1/2", SUITE_LIMIT)
def test_c10e_chooser():
    return _suite(105, _pair, lambda a, b: cut_and_choose(a, b).payoffs[1] >= F(1, 2))


@gate("10f two-player cut-and-choose is envy-free (atom-free)", SUITE_LIMIT)
def test_c10f_envy_free():
    def check(a, b):
        rep = check_fairness(cut_and_choose(a, b).allocation, [a, b])
        return rep.envy_free and rep.proportional

    return _suite(106, lambda rng: _pair(rng, atoms=False), check)


@gate("10g dominance certificates survive re-integration", SUITE_LIMIT)
def test_c10g_certificate_soundness():
    def check(a, b):
        ms = [a, b]
        base = cut_and_choose(a, b).allocation
        for cert in (find_dominating(base, ms), find_dominating_contiguous(base, ms)):
            if cert is not None and not cert.verify(ms):
                return False
        return True

    return _suite(107, _pair, check)


@gate("10h dominance agrees with the weighted frontier (atom-free)", SUITE_LIMIT)
def test_c10h_frontier_agreement():
    def draw(rng):
        a, b = _pair(rng, atoms=False)
        cut = F(rng.randint(0, 8), 8)
        return a, b, cut

    def check(a, b, cut):
        ms = [a, b]
        for base in (cut_and_choose(a, b).payoffs, Allocation.contiguous([cut], [0, 1]).payoffs(ms)):
            if (find_dominating_utilities(base, ms) is None) != frontier_max(ms, base):
                return False
        return True

    return _suite(108, draw, check)


@pytest.mark.xfail(
    strict=True,
    reason="false as stated: cut-and-choose is only efficient among one-cut allocations",
)
@gate("10i cut-and-choose undominated for mutually continuous pairs", SUITE_LIMIT)
def test_c10i_mac_undominated():
    def draw(rng):
        a, b = random_positive_measure(rng), random_positive_measure(rng)
        assert mutually_abs_continuous(a, b)
        return a, b

    def check(a, b):
        return find_dominating(cut_and_choose(a, b).allocation, [a, b]) is None

    return _suite(109, draw, check)


@gate("10j same pairs, contiguous dominance only", SUITE_LIMIT)
def test_c10j_mac_contiguous_companion():
    def draw(rng):
        return random_positive_measure(rng), random_positive_measure(rng)

    def check(a, b):
        return find_dominating_contiguous(cut_and_choose(a, b).allocation, [a, b]) is None

    return _suite(109, draw, check)


@gate("11 golden reports are byte-identical")
def test_c11_goldens():
    mismatched = []
    for cid in (1, 2, 3):
        for fmt, ext in (("text", "txt"), ("json", "json")):
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = main(["counterexample", str(cid), "--format", fmt])
            if code != 0 or buf.getvalue().encode() != (GOLDEN / f"counterexample_{cid}.{ext}").read_bytes():
                mismatched.append(f"{cid}.{ext}")
    return not mismatched, "6/6 identical" if not mismatched else f"mismatch: {', '.join(mismatched)}"


def _fmt(values) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def _status(cert) -> str:
    return "DOMINATED" if cert is not None else "EFFICIENT"


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                pass
