"""Backward induction, a brute-force SPNE oracle and 2x2 bimatrix solving."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .game import (
    Chance,
    Decision,
    ExtensiveGame,
    Terminal,
    as_number,
    require_valid,
)

TIE_TOL = 1e-9
MAX_PROFILES = 10**6

TIE_BREAKS = ("first", "lex")


@dataclass(frozen=True)
class Solution:
    node_values: Mapping[str, tuple]
    chosen: Mapping[str, str]
    tie_log: tuple = ()
    root: str = "/"

    @property
    def root_value(self) -> tuple:
        return self.node_values[self.root]

    def path(self, g: ExtensiveGame) -> tuple:
        """Equilibrium path labels from the root until a leaf or chance node."""
        out = []
        nid = g.root
        while isinstance(g[nid], Decision):
            lab = self.chosen[nid]
            out.append(lab)
            nid = g[nid].child(lab)
        return tuple(out)


def _expect(node: Chance, values: Mapping[str, tuple], n: int) -> tuple:
    acc = [0] * n
    for _, pr, cid in node.branches:
        for i, v in enumerate(values[cid]):
            acc[i] += pr * v
    return tuple(acc)


def backward_induction(g: ExtensiveGame, tie_break: str = "first") -> Solution:
    """Solve a perfect-information game leaves-to-root.

    Payoff-equal actions (within 1e-9 for the mover) are resolved by
    declaration order (``"first"``) or by smallest label (``"lex"``); every node
    where that happened is recorded in ``tie_log``.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
    require_valid(g)
    values: dict = {}
    chosen: dict = {}
    ties: list = []
    order = list(g.iter_nodes())
    for nid in reversed(order):
        node = g[nid]
        if isinstance(node, Terminal):
            values[nid] = node.payoff
        elif isinstance(node, Chance):
            values[nid] = _expect(node, values, g.n_players)
        else:
            i = node.player
            best = max(values[cid][i] for _, cid in node.actions)
            tops = [(lab, cid) for lab, cid in node.actions if values[cid][i] >= best - TIE_TOL]
            if len(tops) > 1:
                ties.append(nid)
                if tie_break == "lex":
                    tops.sort(key=lambda t: t[0])
            lab, cid = tops[0]
            chosen[nid] = lab
            values[nid] = values[cid]
    order_index = {nid: k for k, nid in enumerate(order)}
    ties.sort(key=order_index.__getitem__)
    return Solution(values, chosen, tuple(ties), g.root)


def profile_count(g: ExtensiveGame) -> int:
    return math.prod(len(g[nid].actions) for nid in g.decision_nodes())


def _profile_values(g: ExtensiveGame, order: Sequence[str], profile: Mapping[str, str]) -> dict:
    values: dict = {}
    for nid in reversed(order):
        node = g[nid]
        if isinstance(node, Terminal):
            values[nid] = node.payoff
        elif isinstance(node, Chance):
            values[nid] = _expect(node, values, g.n_players)
        else:
            values[nid] = values[node.child(profile[nid])]
    return values


def brute_force_spne(g: ExtensiveGame, max_profiles: int = MAX_PROFILES) -> list:
    """Every pure profile that is subgame perfect, by exhaustive enumeration.

    A profile is kept when no mover gains (beyond 1e-9) from a one-shot
    deviation at any decision node, reached or not; in finite games this is
    equivalent to subgame perfection.
    """
    require_valid(g)
    count = profile_count(g)
    if count > max_profiles:
        raise ValueError(f"{count} pure profiles exceeds the oracle bound {max_profiles}")
    order = list(g.iter_nodes())
    dnodes = [nid for nid in order if isinstance(g[nid], Decision)]
    out = []
    for combo in itertools.product(*(g[nid].labels for nid in dnodes)):
        profile = dict(zip(dnodes, combo))
        values = _profile_values(g, order, profile)
        ok = True
        for nid in dnodes:
            node = g[nid]
            mine = values[nid][node.player]
            if any(values[cid][node.player] > mine + TIE_TOL for _, cid in node.actions):
                ok = False
                break
        if ok:
            out.append(profile)
    return out


# -- dominance ----------------------------------------------------------------

def _security(g: ExtensiveGame, nid: str, i: int, optimistic: bool):
    """Player ``i``'s worst (or best) achievable payoff in the subtree.

    ``i`` plays optimally at its own nodes; other movers are adversarial
    (pessimistic) or cooperative (optimistic); chance is averaged.
    """
    node = g[nid]
    if isinstance(node, Terminal):
        return node.payoff[i]
    if isinstance(node, Chance):
        return sum(pr * _security(g, cid, i, optimistic) for _, pr, cid in node.branches)
    vals = [_security(g, cid, i, optimistic) for _, cid in node.actions]
    if node.player == i or optimistic:
        return max(vals)
    return min(vals)


def strictly_dominates(game, player, action_a, action_b, node: str | None = None) -> bool:
    """Does ``action_a`` strictly beat ``action_b`` for ``player``?

    For a :class:`Bimatrix2x2`, ``player`` is ``"row"``/``"col"`` (or 0/1) and
    actions are labels or indices; the comparison is cell by cell against
    each opponent action. For an :class:`ExtensiveGame`, ``node`` names the
    decision context and ``a`` dominates ``b`` when the worst continuation
    after ``a`` still beats the best continuation after ``b``.
    """
    if isinstance(game, Bimatrix2x2):
        side = game.side(player)
        ia, ib = game.action_index(side, action_a), game.action_index(side, action_b)
        if side == 0:
            return all(game.payoffs[ia][j][0] > game.payoffs[ib][j][0] for j in range(2))
        return all(game.payoffs[j][ia][1] > game.payoffs[j][ib][1] for j in range(2))

    if node is None:
        raise ValueError("extensive-form dominance needs a decision node id")
    require_valid(game)
    ctx = game[node]
    i = game.player_index(player)
    if not isinstance(ctx, Decision) or ctx.player != i:
        raise ValueError(f"node {node!r} is not a decision node of player {player!r}")
    ca, cb = ctx.child(action_a), ctx.child(action_b)
    worst_a = _security(game, ca, i, optimistic=False)
    best_b = _security(game, cb, i, optimistic=True)
    return worst_a > best_b


# -- 2x2 bimatrix games ---------------------------------------------------------

@dataclass(frozen=True)
class Bimatrix2x2:
    row_player: str
    col_player: str
    row_actions: tuple
    col_actions: tuple
    payoffs: tuple  # payoffs[i][j] = (row payoff, col payoff)

    def __post_init__(self):
        if len(self.row_actions) != 2 or len(self.col_actions) != 2:
            raise ValueError("a 2x2 game needs exactly two actions per player")
        grid = tuple(tuple((as_number(c[0]), as_number(c[1])) for c in row) for row in self.payoffs)
        if len(grid) != 2 or any(len(row) != 2 for row in grid):
            raise ValueError("payoffs must be a 2x2 grid of (row, col) pairs")
        object.__setattr__(self, "row_actions", tuple(self.row_actions))
        object.__setattr__(self, "col_actions", tuple(self.col_actions))
        object.__setattr__(self, "payoffs", grid)

    def side(self, player) -> int:
        if player in (0, "row", self.row_player):
            return 0
        if player in (1, "col", self.col_player):
            return 1
        raise KeyError(f"unknown player {player!r}")

    def action_index(self, side: int, action) -> int:
        acts = self.row_actions if side == 0 else self.col_actions
        if isinstance(action, int) and action in (0, 1):
            return action
        if action in acts:
            return acts.index(action)
        raise KeyError(f"unknown action {action!r}")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Bimatrix2x2":
        return cls(
            doc.get("row_player", "Row"),
            doc.get("col_player", "Col"),
            tuple(doc.get("row_actions", ("R1", "R2"))),
            tuple(doc.get("col_actions", ("C1", "C2"))),
            tuple(tuple(tuple(cell) for cell in row) for row in doc["payoffs"]),
        )


@dataclass(frozen=True)
class MixedEquilibrium:
    row_prob: Fraction | float  # P(row plays its first action)
    col_prob: Fraction | float  # P(col plays its first action)
    expected: tuple


@dataclass(frozen=True)
class BimatrixSolution:
    pure_nash: tuple
    mixed: MixedEquilibrium | None
    degenerate: bool = False


def expected_payoffs(game: Bimatrix2x2, row_prob, col_prob) -> tuple:
    q, m = row_prob, col_prob
    w = ((q * m, q * (1 - m)), ((1 - q) * m, (1 - q) * (1 - m)))
    return tuple(
        sum(w[i][j] * game.payoffs[i][j][k] for i in range(2) for j in range(2)) for k in range(2)
    )


def solve_bimatrix_2x2(game: Bimatrix2x2) -> BimatrixSolution:
    A = [[cell[0] for cell in row] for row in game.payoffs]
    B = [[cell[1] for cell in row] for row in game.payoffs]
    pure = tuple(
        (i, j)
        for i in range(2)
        for j in range(2)
        if A[i][j] >= A[1 - i][j] and B[i][j] >= B[i][1 - j]
    )
    # row mix q equalises the column player's two actions, col mix m the row player's
    den_q = B[0][0] - B[1][0] - B[0][1] + B[1][1]
    den_m = A[0][0] - A[0][1] - A[1][0] + A[1][1]
    if den_q == 0 or den_m == 0:
        return BimatrixSolution(pure, None, degenerate=True)
    q = (B[1][1] - B[1][0]) / den_q
    m = (A[1][1] - A[0][1]) / den_m
    if not (0 <= q <= 1 and 0 <= m <= 1):
        return BimatrixSolution(pure, None)
    return BimatrixSolution(pure, MixedEquilibrium(q, m, expected_payoffs(game, q, m)))


def indifference_gaps(game: Bimatrix2x2, mix: MixedEquilibrium) -> tuple:
    """|E[action 1] - E[action 2]| for the row and the column player at ``mix``."""
    q, m = mix.row_prob, mix.col_prob
    A = [[cell[0] for cell in row] for row in game.payoffs]
    B = [[cell[1] for cell in row] for row in game.payoffs]
    row_gap = (m * A[0][0] + (1 - m) * A[0][1]) - (m * A[1][0] + (1 - m) * A[1][1])
    col_gap = (q * B[0][0] + (1 - q) * B[1][0]) - (q * B[0][1] + (1 - q) * B[1][1])
    return abs(row_gap), abs(col_gap)


SUPPLIER_RETAILER = Bimatrix2x2(
    "Supplier",
    "Retailer",
    ("Organic", "Non-organic"),
    ("Monitor", "Not Monitor"),
    (((15, -30), (15, 100)), ((-20, -75), (35, -160))),
)
