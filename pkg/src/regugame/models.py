"""Market parameters, the three producer/consumer scenario games, and
closed-form deterrence thresholds.

Costs are stored per technology (``cost_organic``, ``cost_conventional``);
the cost gap between them is derived. With the numerical-case baseline this
means ``cost_organic=7, cost_conventional=3`` and a gap of 4.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .game import ExtensiveGame, as_number, chance, decision, game, terminal
from .solvers import TIE_TOL, strictly_dominates

PLAYERS = ("Producer", "Consumer")
HONEST, FRAUD = "organic", "fraud"
MONITOR, NO_MONITOR = "Monitor", "NotMonitor"
BUY, DONT_BUY = "Buy", "DontBuy"
AUDITED, UNAUDITED = "audited", "unaudited"

SCENARIOS = ("consumer", "reputation", "third-party")

CURRENCY_FIELDS = (
    "price_organic",
    "price_conventional",
    "cost_organic",
    "cost_conventional",
    "utility_organic",
    "utility_conventional",
    "monitor_cost",
    "penalty",
    "reputation_loss",
)


class InvalidParams(ValueError):
    pass


class DeterrenceInfeasible(ArithmeticError):
    """No finite penalty deters fraud (e.g. audits never happen)."""


@dataclass(frozen=True)
class MarketParams:
    price_organic: Fraction
    price_conventional: Fraction
    cost_organic: Fraction
    cost_conventional: Fraction
    utility_organic: Fraction
    utility_conventional: Fraction
    monitor_cost: Fraction = Fraction(0)
    penalty: Fraction = Fraction(0)
    reputation_loss: Fraction = Fraction(0)
    audit_prob: Fraction = Fraction(0)

    def __post_init__(self):
        for f in dataclasses.fields(self):
            try:
                object.__setattr__(self, f.name, as_number(getattr(self, f.name)))
            except (TypeError, ValueError) as exc:
                raise InvalidParams(f"{f.name}: {exc}") from None
        errors = self.violations()
        if errors:
            raise InvalidParams("; ".join(errors))

    def violations(self) -> list:
        v = []
        if self.price_organic < self.price_conventional:
            v.append("organic price must be >= conventional price")
        if not self.cost_organic > self.cost_conventional >= 0:
            v.append("need cost_organic > cost_conventional >= 0")
        if self.utility_organic < self.utility_conventional:
            v.append("utility_organic must be >= utility_conventional")
        for name in ("monitor_cost", "penalty", "reputation_loss"):
            if getattr(self, name) < 0:
                v.append(f"{name} must be >= 0")
        if not 0 <= self.audit_prob <= 1:
            v.append("audit_prob must lie in [0, 1]")
        return v

    @property
    def cost_gap(self) -> Fraction:
        return self.cost_organic - self.cost_conventional

    def replace(self, **changes) -> "MarketParams":
        return dataclasses.replace(self, **changes)

    def scaled(self, lam) -> "MarketParams":
        """Every currency field multiplied by ``lam`` (probabilities untouched)."""
        lam = as_number(lam)
        return self.replace(**{k: getattr(self, k) * lam for k in CURRENCY_FIELDS})

    @classmethod
    def from_dict(cls, doc: Mapping) -> "MarketParams":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise InvalidParams(f"unknown parameter(s): {sorted(unknown)}")
        missing = names - {"reputation_loss", "audit_prob"} - set(doc)
        if missing:
            raise InvalidParams(f"missing parameter(s): {sorted(missing)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return {f.name: _plain(getattr(self, f.name)) for f in dataclasses.fields(self)}

    @classmethod
    def from_json(cls, text: str) -> "MarketParams":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"malformed JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InvalidParams("parameters must be a JSON object")
        return cls.from_dict(doc)


def _plain(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(x)


def baseline(**overrides) -> MarketParams:
    """Numerical-case baseline: a=12, d=8, costs 7/3, s=14, f=8, r=1/2."""
    p = MarketParams(
        price_organic=12,
        price_conventional=8,
        cost_organic=7,
        cost_conventional=3,
        utility_organic=14,
        utility_conventional=8,
        monitor_cost=0,
        penalty=0,
        reputation_loss=0,
        audit_prob=Fraction(1, 2),
    )
    return p.replace(**overrides) if overrides else p


# -- scenario games -------------------------------------------------------------

def _consumer_subtree(buy_monitored, skip_monitored, buy_free, skip_free):
    return decision(
        "Consumer",
        [
            (MONITOR, decision("Consumer", [(BUY, buy_monitored), (DONT_BUY, skip_monitored)])),
            (NO_MONITOR, decision("Consumer", [(BUY, buy_free), (DONT_BUY, skip_free)])),
        ],
    )


def build_consumer_monitoring_game(params: MarketParams) -> ExtensiveGame:
    a, d = params.price_organic, params.price_conventional
    ko, kc = params.cost_organic, params.cost_conventional
    s, f = params.utility_organic, params.utility_conventional
    m, p = params.monitor_cost, params.penalty
    honest = _consumer_subtree(
        terminal(a - ko, s - a - m),
        terminal(-ko, -m),
        terminal(a - ko, s - a),
        terminal(-ko, 0),
    )
    # caught producers keep the organic price but pay the fine
    fraud = _consumer_subtree(
        terminal(a - p - kc, f - d - m),
        terminal(-p - kc, -m),
        terminal(a - kc, f - d),
        terminal(-kc, 0),
    )
    return game(PLAYERS, decision("Producer", [(HONEST, honest), (FRAUD, fraud)]))


def build_reputation_game(params: MarketParams) -> ExtensiveGame:
    a, d = params.price_organic, params.price_conventional
    ko, kc = params.cost_organic, params.cost_conventional
    s, f = params.utility_organic, params.utility_conventional
    m, p, t = params.monitor_cost, params.penalty, params.reputation_loss
    honest = _consumer_subtree(
        terminal(a - ko, s - a - m),
        terminal(-ko, -m),
        terminal(a - ko, s - a),
        terminal(-ko, 0),
    )
    fraud = _consumer_subtree(
        terminal(-p - m, f - d - m),
        terminal(-p - m, -m),
        terminal(a - kc, f - a - t),
        terminal(-kc, 0),
    )
    return game(PLAYERS, decision("Producer", [(HONEST, honest), (FRAUD, fraud)]))


def build_third_party_game(params: MarketParams) -> ExtensiveGame:
    a, d = params.price_organic, params.price_conventional
    ko, kc = params.cost_organic, params.cost_conventional
    s, f = params.utility_organic, params.utility_conventional
    p, r = params.penalty, params.audit_prob
    honest = decision("Consumer", [(BUY, terminal(a - ko, s - a)), (DONT_BUY, terminal(-ko, 0))])
    audited = decision("Consumer", [(BUY, terminal(d - p - kc, f - d)), (DONT_BUY, terminal(-p - kc, 0))])
    unaudited = decision("Consumer", [(BUY, terminal(a - kc, f - a)), (DONT_BUY, terminal(-kc, 0))])
    fraud = chance([(AUDITED, r, audited), (UNAUDITED, 1 - r, unaudited)])
    return game(PLAYERS, decision("Producer", [(HONEST, honest), (FRAUD, fraud)]))


BUILDERS = {
    "consumer": build_consumer_monitoring_game,
    "reputation": build_reputation_game,
    "third-party": build_third_party_game,
}


def build_game(params: MarketParams, scenario: str) -> ExtensiveGame:
    try:
        return BUILDERS[scenario](params)
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}") from None


def buy_dominance(params: MarketParams) -> dict:
    """Whether Buy strictly beats DontBuy at each consumer purchase node."""
    g = build_consumer_monitoring_game(params)
    out = {}
    for producer in (HONEST, FRAUD):
        for watch in (MONITOR, NO_MONITOR):
            nid = f"/{producer}/{watch}"
            out[nid] = strictly_dominates(g, "Consumer", BUY, DONT_BUY, node=nid)
    return out


# -- thresholds -----------------------------------------------------------------

class Verdict(str, enum.Enum):
    HONEST_TRADE = "HonestTrade"
    FRAUD_RISK = "FraudRisk"
    NO_PURE_EQUILIBRIUM = "NoPureEquilibrium"
    INFEASIBLE = "Infeasible"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Condition:
    name: str
    text: str
    satisfied: bool


@dataclass(frozen=True)
class ThresholdReport:
    scenario: str
    p_min: Fraction | float | None
    m_max: Fraction | None
    t_min: Fraction | None
    r_bound: Fraction | None
    conditions: tuple
    verdict: Verdict
    subcase_verdicts: tuple = ()
    notes: tuple = ()

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{float(x):.6g}"
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _cond(name: str, lhs, op: str, rhs) -> Condition:
    ok = {">": lhs > rhs, "<": lhs < rhs, ">=": lhs >= rhs}[op]
    return Condition(name, f"{_fmt(lhs)} {op} {_fmt(rhs)}", bool(ok))


def spne_thresholds_consumer_model(params: MarketParams) -> ThresholdReport:
    a, s, f = params.price_organic, params.utility_organic, params.utility_conventional
    p, m, c = params.penalty, params.monitor_cost, params.cost_gap
    conds = (
        _cond("buy", s, ">", a),
        _cond("deter", p, ">", c),
        _cond("monitor", m, "<", s - f),
    )
    if not conds[0].satisfied:
        verdict = Verdict.INFEASIBLE
    elif all(x.satisfied for x in conds):
        verdict = Verdict.HONEST_TRADE
    else:
        verdict = Verdict.FRAUD_RISK
    return ThresholdReport(
        "consumer", p_min=c, m_max=s - f, t_min=None, r_bound=None,
        conditions=conds, verdict=verdict,
        notes=("p_min and m_max are strict bounds: p > p_min, m < m_max",),
    )


def reputation_conditions(params: MarketParams) -> ThresholdReport:
    a, s, f = params.price_organic, params.utility_organic, params.utility_conventional
    ko, kc = params.cost_organic, params.cost_conventional
    p, m, t = params.penalty, params.monitor_cost, params.reputation_loss
    conds = (
        _cond("C1", p, ">", a - ko + m),
        _cond("C2", s, ">", a),
        _cond("C3", kc, "<", ko),
        _cond("C4", t, ">", f - a),
    )
    if not conds[1].satisfied:
        verdict = Verdict.INFEASIBLE
    elif conds[0].satisfied:
        verdict = Verdict.HONEST_TRADE
    else:
        verdict = Verdict.FRAUD_RISK
    return ThresholdReport(
        "reputation", p_min=a - ko + m, m_max=None, t_min=f - a, r_bound=None,
        conditions=conds, verdict=verdict,
        subcase_verdicts=(("monitored", verdict), ("unmonitored", Verdict.NO_PURE_EQUILIBRIUM)),
        notes=(
            "C1 uses the stated threshold p > a - K_o + m; the monitored payoff "
            "comparison a - K_o > -p - m alone gives p > K_o - a - m",
        ),
    )


def third_party_min_penalty(params: MarketParams):
    """Least penalty making honesty weakly better than fraud under random audits.

    ``(d - a) + gap / r``, floored at zero.
    """
    r = params.audit_prob
    if r == 0:
        raise DeterrenceInfeasible("deterrence infeasible: penalty never applied when r = 0")
    p = (params.price_conventional - params.price_organic) + params.cost_gap / r
    return max(p, Fraction(0)) if isinstance(p, Fraction) else max(p, 0.0)


@dataclass(frozen=True)
class RBound:
    bound: Fraction | None
    feasible: bool
    denominator_sign_ok: bool


def r_feasibility_bound(params: MarketParams) -> RBound:
    a, ko, c = params.price_organic, params.cost_organic, params.cost_gap
    den = a - ko + c
    if den == 0:
        return RBound(None, False, False)
    bound = (2 * a - 2 * ko + c) / den
    # a negative denominator flips the inequality; that region is left undefined
    if den < 0:
        return RBound(bound, False, False)
    return RBound(bound, bound < 1, True)


def honest_payoff(params: MarketParams):
    return params.price_organic - params.cost_organic


def dishonest_expected_payoff(params: MarketParams):
    r, p = params.audit_prob, params.penalty
    kc = params.cost_conventional
    return r * (params.price_conventional - p - kc) + (1 - r) * (params.price_organic - kc)


def third_party_thresholds(params: MarketParams) -> ThresholdReport:
    a, s = params.price_organic, params.utility_organic
    rb = r_feasibility_bound(params)
    notes = []
    try:
        p_min = third_party_min_penalty(params)
    except DeterrenceInfeasible as exc:
        p_min = float("inf")
        notes.append(str(exc))
    conds = [_cond("buy", s, ">", a)]
    if p_min == float("inf"):
        conds.append(Condition("incentive", f"{_fmt(params.penalty)} >= inf", False))
    else:
        conds.append(_cond("incentive", params.penalty, ">=", p_min))
    if rb.bound is None:
        conds.append(Condition("region_E", "bound undefined (zero denominator)", False))
    else:
        conds.append(Condition("region_E", f"{_fmt(params.audit_prob)} > {_fmt(rb.bound)}",
                               bool(rb.denominator_sign_ok and params.audit_prob > rb.bound)))
    if not conds[0].satisfied or p_min == float("inf"):
        verdict = Verdict.INFEASIBLE
    elif params.penalty >= p_min - TIE_TOL:
        verdict = Verdict.HONEST_TRADE
    else:
        verdict = Verdict.FRAUD_RISK
    notes.append("p_min is derived from the incentive constraint as (d - a) + gap / r")
    return ThresholdReport(
        "third-party", p_min=p_min, m_max=None, t_min=None, r_bound=rb.bound,
        conditions=tuple(conds), verdict=verdict, notes=tuple(notes),
    )


THRESHOLDS = {
    "consumer": spne_thresholds_consumer_model,
    "reputation": reputation_conditions,
    "third-party": third_party_thresholds,
}


def thresholds(params: MarketParams, scenario: str) -> ThresholdReport:
    try:
        return THRESHOLDS[scenario](params)
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}") from None
