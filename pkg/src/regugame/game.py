"""Finite extensive-form games with perfect information and chance moves.

A game is stored flat: a mapping from node id to node, with children
referenced by id. Nested JSON documents are flattened on load and node ids
are the action-label path from the root (``"/"``, ``"/organic/Monitor"``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Any, Iterator, Mapping, Sequence, Union

PROB_TOL = 1e-9

Number = Union[int, float, Fraction]


def as_number(x: Any) -> Number:
    """Coerce to an exact Fraction where the input is rational.

    Floats go through their shortest decimal repr, so ``0.2`` becomes ``1/5``.
    Non-finite floats are returned unchanged.
    """
    if isinstance(x, bool):
        raise TypeError(f"expected a number, got {x!r}")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return x
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected a number, got {x!r}")


@dataclass(frozen=True)
class Terminal:
    payoff: tuple


@dataclass(frozen=True)
class Decision:
    player: int
    actions: tuple  # ((label, child_id), ...)

    def child(self, label: str) -> str:
        for lab, cid in self.actions:
            if lab == label:
                return cid
        raise KeyError(f"unknown action {label!r}")

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.actions)


@dataclass(frozen=True)
class Chance:
    branches: tuple  # ((label, prob, child_id), ...)


Node = Union[Terminal, Decision, Chance]


def children(node: Node) -> list:
    if isinstance(node, Decision):
        return [cid for _, cid in node.actions]
    if isinstance(node, Chance):
        return [cid for _, _, cid in node.branches]
    return []


@dataclass(frozen=True)
class Violation:
    rule: str
    node: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"[{v.rule}] {v.node}: {v.message}" for v in self.violations)


class InvalidGame(ValueError):
    """Raised when an operation needs a valid game and gets an invalid one."""

    def __init__(self, report: ValidationReport):
        super().__init__(f"invalid game: {report}")
        self.report = report


@dataclass(frozen=True)
class ExtensiveGame:
    players: tuple
    nodes: Mapping[str, Node]
    root: str = "/"

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))

    def __getitem__(self, node_id: str) -> Node:
        return self.nodes[node_id]

    @property
    def n_players(self) -> int:
        return len(self.players)

    def player_index(self, player: int | str) -> int:
        if isinstance(player, str):
            try:
                return self.players.index(player)
            except ValueError:
                raise KeyError(f"unknown player {player!r}") from None
        return player

    def decision_nodes(self) -> list:
        """Decision node ids in depth-first order."""
        return [nid for nid in self.iter_nodes() if isinstance(self.nodes[nid], Decision)]

    def iter_nodes(self) -> Iterator[str]:
        """Depth-first pre-order over the nodes reachable from the root."""
        stack = [self.root]
        seen = set()
        while stack:
            nid = stack.pop()
            if nid in seen or nid not in self.nodes:
                continue
            seen.add(nid)
            yield nid
            stack.extend(reversed(children(self.nodes[nid])))

    # -- (de)serialization -------------------------------------------------

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExtensiveGame":
        """Flatten a nested ``{"players": [...], "root": <node>}`` document."""
        try:
            players = tuple(str(p) for p in doc["players"])
            root = doc["root"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"game document needs 'players' and 'root': {exc}") from None
        nodes: dict = {}
        stack = [("/", root)]
        while stack:
            nid, raw = stack.pop()
            if not isinstance(raw, Mapping) or "type" not in raw:
                raise ValueError(f"node {nid}: expected an object with a 'type' field")
            kind = raw["type"]
            if kind == "terminal":
                nodes[nid] = Terminal(tuple(as_number(x) for x in raw["payoff"]))
            elif kind == "decision":
                player = raw["player"]
                if isinstance(player, str):
                    if player not in players:
                        raise ValueError(f"node {nid}: unknown player {player!r}")
                    player = players.index(player)
                acts = []
                for item in raw.get("actions", []):
                    cid = _child_id(nid, item["label"])
                    acts.append((str(item["label"]), cid))
                    stack.append((cid, item["child"]))
                nodes[nid] = Decision(int(player), tuple(acts))
            elif kind == "chance":
                brs = []
                for item in raw.get("branches", []):
                    cid = _child_id(nid, item["label"])
                    brs.append((str(item["label"]), as_number(item["prob"]), cid))
                    stack.append((cid, item["child"]))
                nodes[nid] = Chance(tuple(brs))
            else:
                raise ValueError(f"node {nid}: unknown node type {kind!r}")
        return cls(players, nodes, "/")

    def to_dict(self) -> dict:
        def dump(nid: str) -> dict:
            node = self.nodes[nid]
            if isinstance(node, Terminal):
                return {"type": "terminal", "payoff": [_jsonable(x) for x in node.payoff]}
            if isinstance(node, Decision):
                return {
                    "type": "decision",
                    "player": self.players[node.player],
                    "actions": [{"label": lab, "child": dump(cid)} for lab, cid in node.actions],
                }
            return {
                "type": "chance",
                "branches": [
                    {"label": lab, "prob": _jsonable(pr), "child": dump(cid)}
                    for lab, pr, cid in node.branches
                ],
            }

        report = validate_game(self)
        if not report.ok:
            raise InvalidGame(report)
        return {"players": list(self.players), "root": dump(self.root)}

    @classmethod
    def from_json(cls, text: str) -> "ExtensiveGame":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _child_id(parent: str, label: str) -> str:
    return f"{parent.rstrip('/')}/{label}"


def _jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


# Nested-document helpers used by the scenario builders.

def terminal(*payoff) -> dict:
    return {"type": "terminal", "payoff": list(payoff)}


def decision(player: int | str, actions: Sequence[tuple]) -> dict:
    return {
        "type": "decision",
        "player": player,
        "actions": [{"label": lab, "child": child} for lab, child in actions],
    }


def chance(branches: Sequence[tuple]) -> dict:
    return {
        "type": "chance",
        "branches": [{"label": lab, "prob": pr, "child": child} for lab, pr, child in branches],
    }


def game(players: Sequence[str], root: dict) -> ExtensiveGame:
    return ExtensiveGame.from_dict({"players": list(players), "root": root})


# -- validation ---------------------------------------------------------------

def validate_game(g: ExtensiveGame) -> ValidationReport:
    """Collect every structural violation in ``g``.

    Decision and terminal sets are disjoint by construction (a node has exactly
    one type), so that rule needs no explicit check.
    """
    out: list = []

    def bad(rule, node, msg):
        out.append(Violation(rule, node, msg))

    if not g.players:
        bad("no-players", g.root, "game declares no players")
    if g.root not in g.nodes:
        bad("missing-root", g.root, "root id not present in node set")
        return ValidationReport(tuple(out))

    parents: dict = {}
    for nid, node in g.nodes.items():
        for cid in children(node):
            if cid not in g.nodes:
                bad("dangling-child", nid, f"child {cid!r} does not exist")
                continue
            parents.setdefault(cid, []).append(nid)

    if g.root in parents:
        bad("not-a-tree", g.root, f"root has parent(s) {parents[g.root]}")
    for cid, ps in parents.items():
        if len(ps) > 1:
            bad("not-a-tree", cid, f"node has {len(ps)} parents {ps}")

    # cycle detection by DFS from the root (iterative, white/grey/black)
    state: dict = {}
    stack = [(g.root, iter(children(g.nodes[g.root])))]
    state[g.root] = 1
    while stack:
        nid, it = stack[-1]
        for cid in it:
            if cid not in g.nodes:
                continue
            if state.get(cid) == 1:
                bad("not-a-tree", cid, f"cycle through edge {nid!r} -> {cid!r}")
            elif cid not in state:
                state[cid] = 1
                stack.append((cid, iter(children(g.nodes[cid]))))
                break
        else:
            state[nid] = 2
            stack.pop()

    for nid in g.nodes:
        if nid not in state:
            bad("unreachable", nid, "node is not reachable from the root")

    n = len(g.players)
    for nid, node in g.nodes.items():
        if isinstance(node, Terminal):
            if len(node.payoff) != n:
                bad("payoff-length", nid, f"payoff has {len(node.payoff)} entries, expected {n}")
        elif isinstance(node, Decision):
            if not 0 <= node.player < n:
                bad("bad-player", nid, f"player index {node.player} out of range")
            if not node.actions:
                bad("no-actions", nid, "decision node has no actions")
            labels = [lab for lab, _ in node.actions]
            if len(set(labels)) != len(labels):
                bad("duplicate-label", nid, f"duplicate action labels {labels}")
        elif isinstance(node, Chance):
            if not node.branches:
                bad("no-actions", nid, "chance node has no branches")
            labels = [lab for lab, _, _ in node.branches]
            if len(set(labels)) != len(labels):
                bad("duplicate-label", nid, f"duplicate branch labels {labels}")
            if any(not 0 <= pr <= 1 for _, pr, _ in node.branches):
                bad("prob-range", nid, "branch probability outside [0, 1]")
            total = sum(pr for _, pr, _ in node.branches)
            if abs(total - 1) > PROB_TOL:
                bad("prob-sum", nid, f"probabilities sum to {float(total)}, not 1")
        else:
            bad("bad-node", nid, f"unknown node kind {type(node).__name__}")
    return ValidationReport(tuple(out))


def require_valid(g: ExtensiveGame) -> None:
    report = validate_game(g)
    if not report.ok:
        raise InvalidGame(report)


def terminal_outcomes(g: ExtensiveGame) -> list:
    """``(path, payoff)`` for every leaf, depth-first in declared action order."""
    require_valid(g)
    out = []

    def walk(nid, path):
        node = g.nodes[nid]
        if isinstance(node, Terminal):
            out.append((path, node.payoff))
            return
        for cid, lab in zip(children(node), _labels(node)):
            walk(cid, path + (lab,))

    walk(g.root, ())
    return out


def _labels(node: Node) -> list:
    if isinstance(node, Decision):
        return [lab for lab, _ in node.actions]
    if isinstance(node, Chance):
        return [lab for lab, _, _ in node.branches]
    return []


def restrict(g: ExtensiveGame, player: int | str, keep: Sequence[str]) -> ExtensiveGame:
    """Fix ``player``'s behaviour: at each of its nodes keep only actions in ``keep``.

    Nodes where none of ``keep`` is available are left untouched. Pruned
    subtrees are dropped so the result is still a valid tree.
    """
    i = g.player_index(player)
    keep = set(keep)
    nodes = dict(g.nodes)
    for nid, node in g.nodes.items():
        if isinstance(node, Decision) and node.player == i:
            kept = tuple((lab, cid) for lab, cid in node.actions if lab in keep)
            if kept:
                nodes[nid] = Decision(node.player, kept)
    pruned = ExtensiveGame(g.players, nodes, g.root)
    reachable = set(pruned.iter_nodes())
    return ExtensiveGame(g.players, {k: v for k, v in nodes.items() if k in reachable}, g.root)
