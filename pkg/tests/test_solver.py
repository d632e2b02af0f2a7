import pytest

from app.exceptions import BoundExceeded, DomainError, IllegalStrategyError
from app.services.solver import RELATIONS, check_chain, implication_chain, solve, solve_all, verify_strategy
from app.services.spaces import discrete_space, named_game
from app.services.strategies import FullStrategyI, FullStrategyII, MarkovStrategyII, PredeterminedStrategyI


class TestSolveFixA:
    def test_markov_witness(self, fix_a):
        report = solve(fix_a, "II_markov")
        assert report.holds
        assert isinstance(report.witness, MarkovStrategyII)
        assert report.witness.table == {(0, 0): "1", (1, 0): "1"}

    def test_all_relations(self, fix_a):
        verdicts = {r: rep.holds for r, rep in solve_all(fix_a).items()}
        assert verdicts == {"I_full": False, "I_pre": False, "II_full": True, "II_markov": True}

    def test_full_witness_is_legal_and_wins(self, fix_a):
        report = solve(fix_a, "II_full")
        assert isinstance(report.witness, FullStrategyII)
        assert verify_strategy(fix_a, report.witness).ok


class TestSolveFixB:
    def test_one_round_i_wins_predetermined(self, fix_b):
        report = solve(fix_b(1), "I_pre")
        assert report.holds
        assert report.witness == PredeterminedStrategyI((0,))

    def test_one_round_verdicts(self, fix_b):
        verdicts = {r: rep.holds for r, rep in solve_all(fix_b(1)).items()}
        assert verdicts == {"I_full": True, "I_pre": True, "II_full": False, "II_markov": False}

    def test_two_rounds_ii_wins(self, fix_b):
        g = fix_b(2)
        assert solve(g, "II_full").holds
        assert not solve(g, "I_full").holds

    def test_i_full_witness(self, fix_b):
        report = solve(fix_b(1), "I_full")
        assert isinstance(report.witness, FullStrategyI)
        assert report.witness.table == {(): 0}


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("horizon", [1, 2, 3])
def test_discrete_rothberger_needs_k_rounds(k, horizon):
    g = named_game(discrete_space(k), "rothberger", horizon)
    assert solve(g, "II_full").holds == (horizon >= k)
    assert solve(g, "I_full").holds == (horizon < k)


def test_sierpinski_dense_game_markov(sierpinski):
    g = named_game(sierpinski, "selective_separability", 1)
    assert solve(g, "II_markov").holds


def test_sierpinski_point_picking_i_wins(sierpinski):
    ctx = named_game(sierpinski, "point_picking", 1)
    assert solve(ctx.dual, "I_full").holds


def test_cache_toggle_agrees(fix_b):
    g = fix_b(2)
    for relation in ("I_full", "II_full"):
        assert solve(g, relation, use_cache=False).holds == solve(g, relation).holds


def test_exhaustive_markov_agrees(fix_a, fix_b):
    for g in (fix_a, fix_b(1), fix_b(2)):
        assert solve(g, "II_markov", markov_search="exhaustive").holds == solve(g, "II_markov").holds


def test_exhaustive_markov_least_table(fix_a):
    report = solve(fix_a, "II_markov", markov_search="exhaustive")
    assert report.witness.table == {(0, 0): "1", (1, 0): "1"}


def test_predetermined_witness_is_least_sequence(make_game):
    g = make_game(["1", "2"], [["1", "2"], ["1"]], [], 1)
    report = solve(g, "I_pre")
    assert report.witness == PredeterminedStrategyI((0,))


@pytest.mark.parametrize("search", ["transversal", "exhaustive"])
def test_markov_witness_is_least_table(make_game, search):
    g = make_game(["1", "2"], [["1", "2"], ["2"]], [["1"], ["2"]], 1)
    report = solve(g, "II_markov", markov_search=search)
    assert report.witness.table == {(0, 0): "1", (1, 0): "2"}


def test_witness_skipped(fix_a):
    report = solve(fix_a, "II_full", witness=False)
    assert report.holds
    assert report.witness is None
    assert report.witness_skipped


def test_unknown_relation(fix_a):
    with pytest.raises(DomainError):
        solve(fix_a, "II_sometimes")


def test_budget_exceeded(fix_b):
    with pytest.raises(BoundExceeded) as exc:
        solve(fix_b(2), "II_full", budget=1)
    assert exc.value.budget == 1


def test_invalid_instance_rejected(make_game):
    g = make_game(["1"], [["1"], ["2"]], [], 1)
    with pytest.raises(DomainError):
        solve(g, "I_full")


class TestVerifyStrategy:
    def test_markov_winner(self, fix_a):
        assert verify_strategy(fix_a, MarkovStrategyII({(0, 0): "1", (1, 0): "1"}, 1)).ok

    def test_markov_counterexample(self, fix_a):
        result = verify_strategy(fix_a, MarkovStrategyII({(0, 0): "1", (1, 0): "2"}, 1))
        assert not result.ok
        assert result.counterexample.attack == (1,)
        assert result.counterexample.outcome == frozenset({"2"})

    def test_full_ii_first_atom_loses(self, fix_b):
        g = fix_b(2)
        result = verify_strategy(g, FullStrategyII({(0,): "{0}", (0, 0): "{0}"}, 2))
        assert not result.ok
        assert result.counterexample.outcome == frozenset({"{0}"})

    def test_i_strategy(self, fix_b):
        assert verify_strategy(fix_b(1), PredeterminedStrategyI((0,))).ok
        assert not verify_strategy(fix_b(2), PredeterminedStrategyI((0, 0))).ok

    def test_bad_index(self, fix_a):
        with pytest.raises(IllegalStrategyError):
            verify_strategy(fix_a, PredeterminedStrategyI((5,)))


class TestChain:
    def test_fix_a_consistent(self, fix_a):
        report = implication_chain(fix_a)
        assert report.consistent
        assert report.verdicts == {"I_full": False, "I_pre": False, "II_full": True, "II_markov": True}

    def test_fix_b_consistent(self, fix_b):
        report = implication_chain(fix_b(1))
        assert report.verdicts == {"I_full": True, "I_pre": True, "II_full": False, "II_markov": False}
        assert report.consistent

    def test_detects_violations(self):
        verdicts = dict.fromkeys(RELATIONS, True)
        assert "II_full and I_full both hold" in check_chain(verdicts)
        assert check_chain({"I_full": False, "I_pre": False, "II_full": False, "II_markov": True}) == [
            "II_markov holds but II_full fails",
            "neither I_full nor II_full holds",
        ]
