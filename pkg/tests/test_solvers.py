import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from regugame.game import ExtensiveGame, Terminal, chance, decision, game, terminal
from regugame.models import baseline, build_consumer_monitoring_game, build_third_party_game
from regugame.solvers import (
    SUPPLIER_RETAILER,
    Bimatrix2x2,
    backward_induction,
    brute_force_spne,
    indifference_gaps,
    solve_bimatrix_2x2,
    strictly_dominates,
)
from treegen import random_tree, random_trees


def test_single_decision_picks_max():
    g = game(["A"], decision(0, [("x", terminal(5)), ("y", terminal(3))]))
    sol = backward_induction(g)
    assert sol.root_value == (5,)
    assert sol.chosen["/"] == "x"
    assert sol.tie_log == ()


def test_chance_node_expectation():
    g = game(["A"], chance([("h", 0.5, terminal(2)), ("t", 0.5, terminal(4))]))
    assert backward_induction(g).root_value == (3,)


def test_third_party_fraud_selected_without_penalty():
    # honest 5; fraud 0.5 * (8 - 0 - 3) + 0.5 * (12 - 3) = 7, consumer always buys
    from regugame.game import restrict

    g = restrict(build_third_party_game(baseline(penalty=0, audit_prob=0.5)), "Consumer", ["Buy"])
    sol = backward_induction(g)
    assert sol.node_values["/fraud"][0] == 7
    assert sol.node_values["/organic"][0] == 5
    assert sol.chosen["/"] == "fraud"


def test_tie_breaks_and_log():
    g = game(["A"], decision(0, [("zeta", terminal(1)), ("alpha", terminal(1)), ("mid", terminal(0))]))
    first = backward_induction(g, "first")
    lex = backward_induction(g, "lex")
    assert first.chosen["/"] == "zeta"
    assert lex.chosen["/"] == "alpha"
    assert first.tie_log == lex.tie_log == ("/",)


def test_unknown_tie_break():
    with pytest.raises(ValueError):
        backward_induction(game(["A"], terminal(0)), "random")


def test_backward_induction_solution_invariant():
    g = build_consumer_monitoring_game(baseline(monitor_cost=1, penalty=5))
    sol = backward_induction(g)
    for nid in g.decision_nodes():
        node = g[nid]
        i = node.player
        best = max(sol.node_values[c][i] for _, c in node.actions)
        assert sol.node_values[nid][i] == best
        assert sol.node_values[node.child(sol.chosen[nid])][i] == best


def test_brute_force_unique_without_ties():
    g = game(["A", "B"], decision(0, [
        ("l", decision(1, [("u", terminal(3, 1)), ("v", terminal(0, 2))])),
        ("r", decision(1, [("u", terminal(2, 5)), ("v", terminal(1, 4))])),
    ]))
    profiles = brute_force_spne(g)
    assert profiles == [dict(backward_induction(g).chosen)]
    assert profiles[0] == {"/": "r", "/l": "v", "/r": "u"}


def test_brute_force_duplicates_on_tie():
    g = game(["A"], decision(0, [("x", terminal(1)), ("y", terminal(1))]))
    assert brute_force_spne(g) == [{"/": "x"}, {"/": "y"}]


def test_brute_force_profile_bound():
    g = game(["A"], decision(0, [(f"a{i}", decision(0, [("x", terminal(0)), ("y", terminal(1))])) for i in range(3)]))
    with pytest.raises(ValueError):
        brute_force_spne(g, max_profiles=10)


def test_backward_induction_in_oracle_set_random_trees():
    for g in random_trees(seed=7, count=60):
        profiles = brute_force_spne(g)
        for tb in ("first", "lex"):
            assert dict(backward_induction(g, tb).chosen) in profiles


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_root_value_tie_break_invariant_without_ties(seed):
    g = random_tree(random.Random(seed))
    first = backward_induction(g, "first")
    if not first.tie_log:
        assert backward_induction(g, "lex").root_value == first.root_value


def _affine(g: ExtensiveGame, lam, shift) -> ExtensiveGame:
    nodes = {
        nid: Terminal(tuple(lam * v + shift[i] for i, v in enumerate(n.payoff))) if isinstance(n, Terminal) else n
        for nid, n in g.nodes.items()
    }
    return ExtensiveGame(g.players, nodes, g.root)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.fractions(min_value=Fraction(1, 10), max_value=10),
    st.tuples(st.integers(-20, 20), st.integers(-20, 20)),
)
def test_affine_payoff_transform(seed, lam, shift):
    g = random_tree(random.Random(seed))
    base = backward_induction(g)
    moved = backward_induction(_affine(g, lam, shift))
    assert moved.chosen == base.chosen
    for nid, vals in base.node_values.items():
        assert moved.node_values[nid] == tuple(lam * v + shift[i] for i, v in enumerate(vals))


@settings(max_examples=40, deadline=None)
@given(st.fractions(0, 1), st.fractions(0, 1), st.integers(-5, 5), st.integers(-5, 5))
def test_chance_root_value_linear_in_probability(p1, p2, x, y):
    def root(q):
        g = game(["A"], chance([("h", q, terminal(x)), ("t", 1 - q, terminal(y))]))
        return backward_induction(g).root_value[0]

    mid = (p1 + p2) / 2
    assert root(mid) == (root(p1) + root(p2)) / 2


# -- bimatrix --------------------------------------------------------------------

def test_supplier_retailer_table():
    # by hand: supplier organic q with -30q - 75(1-q) = 100q - 160(1-q) -> q = 17/43
    #          retailer monitor m with 15 = -20m + 35(1-m) -> m = 4/11
    sol = solve_bimatrix_2x2(SUPPLIER_RETAILER)
    assert sol.pure_nash == ()
    assert sol.mixed.row_prob == Fraction(17, 43)
    assert sol.mixed.col_prob == Fraction(4, 11)
    assert round(float(sol.mixed.row_prob), 3) == 0.395
    assert round(float(sol.mixed.col_prob), 3) == 0.364
    assert indifference_gaps(SUPPLIER_RETAILER, sol.mixed) == (0, 0)


def test_matching_pennies():
    g = Bimatrix2x2("A", "B", ("H", "T"), ("H", "T"), (((1, -1), (-1, 1)), ((-1, 1), (1, -1))))
    sol = solve_bimatrix_2x2(g)
    assert sol.pure_nash == ()
    assert (sol.mixed.row_prob, sol.mixed.col_prob) == (Fraction(1, 2), Fraction(1, 2))
    assert sol.mixed.expected == (0, 0)


def test_dominant_strategy_game():
    g = Bimatrix2x2("A", "B", ("C", "D"), ("C", "D"), (((2, 2), (0, 3)), ((3, 0), (1, 1))))
    sol = solve_bimatrix_2x2(g)
    assert sol.pure_nash == ((1, 1),)
    assert sol.mixed is None
    assert strictly_dominates(g, "row", "D", "C")
    assert strictly_dominates(g, "col", 1, 0)


def test_degenerate_bimatrix():
    g = Bimatrix2x2("A", "B", ("x", "y"), ("u", "v"), (((1, 1), (1, 1)), ((1, 1), (1, 1))))
    sol = solve_bimatrix_2x2(g)
    assert sol.degenerate and sol.mixed is None
    assert len(sol.pure_nash) == 4


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=8, max_size=8))
def test_mixed_equilibrium_indifference(vals):
    cells = (((vals[0], vals[1]), (vals[2], vals[3])), ((vals[4], vals[5]), (vals[6], vals[7])))
    g = Bimatrix2x2("A", "B", ("x", "y"), ("u", "v"), cells)
    sol = solve_bimatrix_2x2(g)
    if sol.mixed is not None:
        assert 0 <= sol.mixed.row_prob <= 1 and 0 <= sol.mixed.col_prob <= 1
        assert all(gap <= 1e-9 for gap in indifference_gaps(g, sol.mixed))
    # pure equilibria by definition: no profitable unilateral deviation
    for i in range(2):
        for j in range(2):
            is_ne = cells[i][j][0] >= cells[1 - i][j][0] and cells[i][j][1] >= cells[i][1 - j][1]
            assert is_ne == ((i, j) in sol.pure_nash)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(-50, 50), min_size=8, max_size=8),
    st.fractions(min_value=Fraction(1, 10), max_value=10),
    st.integers(-30, 30),
    st.integers(-30, 30),
)
def test_mixed_probabilities_affine_invariant(vals, lam, sr, sc):
    cells = (((vals[0], vals[1]), (vals[2], vals[3])), ((vals[4], vals[5]), (vals[6], vals[7])))
    moved = tuple(tuple((lam * a + sr, lam * b + sc) for a, b in row) for row in cells)
    a = solve_bimatrix_2x2(Bimatrix2x2("A", "B", ("x", "y"), ("u", "v"), cells))
    b = solve_bimatrix_2x2(Bimatrix2x2("A", "B", ("x", "y"), ("u", "v"), moved))
    assert a.pure_nash == b.pure_nash
    if a.mixed is not None:
        assert (a.mixed.row_prob, a.mixed.col_prob) == (b.mixed.row_prob, b.mixed.col_prob)


# -- extensive-form dominance ----------------------------------------------------

def test_identical_payoffs_never_dominate():
    g = game(["A"], decision(0, [("x", terminal(2)), ("y", terminal(2))]))
    assert not strictly_dominates(g, 0, "x", "y", node="/")


def test_dominance_requires_worst_case_beating_best_case():
    g = game(["A", "B"], decision(0, [
        ("safe", terminal(3, 0)),
        ("risky", decision(1, [("u", terminal(5, 0)), ("v", terminal(1, 0))])),
    ]))
    assert not strictly_dominates(g, "A", "safe", "risky", node="/")
    assert not strictly_dominates(g, "A", "risky", "safe", node="/")


def test_dominance_unknown_action():
    g = game(["A"], decision(0, [("x", terminal(2)), ("y", terminal(1))]))
    with pytest.raises(KeyError):
        strictly_dominates(g, 0, "x", "nope", node="/")
