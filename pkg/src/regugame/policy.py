"""Parameter sweeps, regime classification and numerical-case reports."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .game import as_number, restrict
from .models import (
    BUY,
    HONEST,
    MONITOR,
    MarketParams,
    Verdict,
    build_game,
    dishonest_expected_payoff,
    honest_payoff,
    r_feasibility_bound,
    third_party_min_penalty,
    thresholds,
)
from .solvers import TIE_TOL, backward_induction

SWEEPABLE = {"r": "audit_prob", "p": "penalty", "m": "monitor_cost", "t": "reputation_loss"}
SWEEP_SCENARIO = {"r": "third-party", "p": "third-party", "m": "consumer", "t": "reputation"}
TIE = "Tie"


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    grid: tuple
    fixed: MarketParams

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"parameter must be one of {sorted(SWEEPABLE)}")
        grid = tuple(as_number(x) for x in self.grid)
        if not grid:
            raise ValueError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if grid[0] < 0 or (self.parameter == "r" and grid[-1] > 1):
            raise ValueError(f"grid outside the legal range of {self.parameter}")
        object.__setattr__(self, "grid", grid)

    def params_at(self, value) -> MarketParams:
        return self.fixed.replace(**{SWEEPABLE[self.parameter]: value})


@dataclass(frozen=True)
class SweepRow:
    value: Fraction
    threshold: Fraction | float | None
    verdict: Verdict
    honest: Fraction
    dishonest: Fraction


def _row(spec: SweepSpec, value) -> SweepRow:
    params = spec.params_at(value)
    scenario = SWEEP_SCENARIO[spec.parameter]
    report = thresholds(params, scenario)
    if scenario == "third-party":
        threshold = report.p_min
        dishonest = dishonest_expected_payoff(params)
    elif scenario == "consumer":
        threshold = report.m_max
        dishonest = params.price_organic - params.penalty - params.cost_conventional
    else:
        threshold = report.t_min
        dishonest = -params.penalty - params.monitor_cost
    return SweepRow(value, threshold, report.verdict, honest_payoff(params), dishonest)


def sweep(spec: SweepSpec) -> list:
    return [_row(spec, v) for v in spec.grid]


def penalty_sweep(spec: SweepSpec) -> list:
    """Minimum deterring penalty at each audit probability of ``spec.grid``."""
    if spec.parameter != "r":
        raise ValueError("penalty_sweep sweeps the audit probability r")
    if spec.grid[0] <= 0:
        # lets DeterrenceInfeasible surface with its own message
        third_party_min_penalty(spec.params_at(spec.grid[0]))
    return sweep(spec)


# -- classification -------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    solver_honest: bool
    cross_check: str  # "Agree" | "Disagree" | "Tie"
    report: object = field(repr=False, default=None)


def _producer_boundary(params: MarketParams, scenario: str, report) -> bool:
    p = params.penalty
    if scenario == "third-party":
        return report.p_min != float("inf") and abs(p - report.p_min) <= TIE_TOL
    return abs(p - report.p_min) <= TIE_TOL


def classify_equilibrium(params: MarketParams, scenario: str, tie_break: str = "first") -> Classification:
    """Threshold verdict plus a backward-induction cross-check.

    The solver runs on the scenario game with the consumer's strategy fixed to
    the behaviour the threshold analysis presumes: always buy, and (where the
    consumer monitors) always monitor.
    """
    report = thresholds(params, scenario)
    g = build_game(params, scenario)
    keep = (BUY,) if scenario == "third-party" else (MONITOR, BUY)
    g = restrict(g, "Consumer", keep)
    sol = backward_induction(g, tie_break)
    solver_honest = sol.chosen[g.root] == HONEST
    if g.root in sol.tie_log or _producer_boundary(params, scenario, report):
        status = TIE
    elif solver_honest == (report.verdict == Verdict.HONEST_TRADE):
        status = "Agree"
    else:
        status = "Disagree"
    return Classification(report.verdict, solver_honest, status, report)


@dataclass(frozen=True)
class FeasibilityGrid:
    r_grid: tuple
    p_grid: tuple
    cells: tuple  # cells[i][j]: verdict at p_grid[i], r_grid[j]

    def column(self, j: int) -> list:
        return [row[j] for row in self.cells]


def _is_honest(label: str) -> bool:
    return label in (Verdict.HONEST_TRADE.value, TIE)


def feasibility_grid(params: MarketParams, r_grid: Sequence, p_grid: Sequence) -> FeasibilityGrid:
    """Third-party verdicts over (p, r); boundary cells are reported as ``Tie``."""
    r_grid = SweepSpec("r", tuple(r_grid), params).grid
    p_grid = SweepSpec("p", tuple(p_grid), params).grid
    cells = []
    for p in p_grid:
        row = []
        for r in r_grid:
            c = classify_equilibrium(params.replace(audit_prob=r, penalty=p), "third-party")
            row.append(TIE if c.cross_check == TIE else c.verdict.value)
        cells.append(tuple(row))
    cells = tuple(cells)
    for i in range(len(p_grid)):
        for j in range(len(r_grid)):
            if _is_honest(cells[i][j]):
                above = i + 1 < len(p_grid) and not _is_honest(cells[i + 1][j])
                right = j + 1 < len(r_grid) and not _is_honest(cells[i][j + 1])
                assert not (above or right), f"honest region not monotone at p={p_grid[i]}, r={r_grid[j]}"
    return FeasibilityGrid(r_grid, p_grid, cells)


# -- formatting ---------------------------------------------------------------------

def fmt_decimal(x) -> str:
    """Shortest round-trip decimal; integers without a trailing ``.0``."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def fmt_exact(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def fmt_md(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x} ≈ {float(x):.4f}"
    return fmt_decimal(x)


def to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def parse_csv(text: str) -> list:
    """Rows as dicts; ``*_exact`` columns become Fractions."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({k: (Fraction(v) if k.endswith("_exact") else v) for k, v in row.items()})
    return out


def md_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines)


def sweep_table(spec: SweepSpec, rows: Sequence[SweepRow]) -> tuple:
    header = [spec.parameter, f"{spec.parameter}_exact", "threshold", "threshold_exact",
              "verdict", "honest", "dishonest", "dishonest_exact"]
    body = [
        [fmt_decimal(r.value), fmt_exact(r.value),
         "" if r.threshold is None else fmt_decimal(r.threshold),
         "" if r.threshold is None else fmt_exact(r.threshold),
         r.verdict.value, fmt_decimal(r.honest), fmt_decimal(r.dishonest), fmt_exact(r.dishonest)]
        for r in rows
    ]
    return header, body


# -- numerical case report ------------------------------------------------------

DEMO_R_GRID = (Fraction(1, 5), Fraction(2, 5), Fraction(3, 5), Fraction(4, 5), Fraction(1))


@dataclass(frozen=True)
class DemoReport:
    markdown: str
    csv: dict  # name -> CSV text
    data: dict


def _signed(x) -> str:
    return f"- {fmt_decimal(-x)}" if x < 0 else f"+ {fmt_decimal(x)}"


def demo_report(params: MarketParams, r_grid: Sequence = DEMO_R_GRID) -> DemoReport:
    a, d = params.price_organic, params.price_conventional
    ko, kc, gap = params.cost_organic, params.cost_conventional, params.cost_gap
    s, f = params.utility_organic, params.utility_conventional
    honest = honest_payoff(params)
    caught, free = d - kc, a - kc
    spec = SweepSpec("r", tuple(r_grid), params)

    baseline_rows = [
        ["a", "Price of organic food", fmt_decimal(a)],
        ["d", "Price of non-organic food", fmt_decimal(d)],
        ["K_o", "Cost of organic production", fmt_decimal(ko)],
        ["K_c", "Cost of conventional production", fmt_decimal(kc)],
        ["c", "Cost gap K_o - K_c", fmt_decimal(gap)],
        ["s", "Utility from consuming organic food", fmt_decimal(s)],
        ["f", "Utility from consuming non-organic food", fmt_decimal(f)],
    ]

    dishonest_rows, penalty_rows = [], []
    for r in spec.grid:
        intercept = r * caught + (1 - r) * free
        at_p = dishonest_expected_payoff(params.replace(audit_prob=r))
        dishonest_rows.append((r, intercept, -r, at_p))
        penalty_rows.append((r, third_party_min_penalty(params.replace(audit_prob=r))))

    rb = r_feasibility_bound(params)
    buy_ok = s > a

    md = ["# Numerical case", "", "## Baseline", "",
          md_table(["Symbol", "Description", "Value"], baseline_rows), "",
          "## Producer payoffs", "",
          f"honest = {fmt_decimal(honest)}",
          f"dishonest(r, p) = r({fmt_decimal(caught)} - p) + (1 - r)({fmt_decimal(free)})",
          f"incentive constraint: {fmt_decimal(a - d)}r + rp >= {fmt_decimal(gap)}", "",
          md_table(["r", "dishonest payoff", f"at p = {fmt_decimal(params.penalty)}"],
                   [[fmt_decimal(r), f"{fmt_decimal(i)} {_signed(sl)}p", fmt_md(v)]
                    for r, i, sl, v in dishonest_rows]), "",
          "## Minimum penalty", "",
          md_table(["r", "Expression for p", "Minimum p"],
                   [[fmt_decimal(r), f"{fmt_decimal(d - a)} + {fmt_decimal(gap)}/{fmt_decimal(r)}", fmt_md(pm)]
                    for r, pm in penalty_rows]), "",
          "## Consumer purchase condition", "",
          f"s > a: {fmt_decimal(s)} > {fmt_decimal(a)} ({'satisfied' if buy_ok else 'violated'})", "",
          "## Audit probability bound", ""]
    if rb.bound is None:
        md.append("r_bound = undefined (zero denominator), infeasible")
    else:
        verdict = "feasible" if rb.feasible else "infeasible"
        md.append(f"r_bound = {fmt_md(rb.bound)}, {verdict}")
    markdown = "\n".join(md) + "\n"

    csvs = {
        "min_penalty": to_csv(
            ["r", "r_exact", "p_min", "p_min_exact"],
            [[fmt_decimal(r), fmt_exact(r), fmt_decimal(pm), fmt_exact(pm)] for r, pm in penalty_rows],
        ),
        "dishonest": to_csv(
            ["r", "r_exact", "intercept", "intercept_exact", "slope", "slope_exact", "value", "value_exact"],
            [[fmt_decimal(r), fmt_exact(r), fmt_decimal(i), fmt_exact(i),
              fmt_decimal(sl), fmt_exact(sl), fmt_decimal(v), fmt_exact(v)]
             for r, i, sl, v in dishonest_rows],
        ),
    }
    data = {
        "honest": honest,
        "min_penalty": penalty_rows,
        "buy_condition": buy_ok,
        "r_bound": rb.bound,
        "r_feasible": rb.feasible,
    }
    return DemoReport(markdown, csvs, data)
