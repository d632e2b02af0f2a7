import itertools

import pytest

from app.exceptions import DomainError, IllegalStrategyError, ReflectionViolation
from app.services.core import Family, Universe
from app.services.solver import solve, verify_strategy
from app.services.strategies import FullStrategyI, FullStrategyII, MarkovStrategyII, PredeterminedStrategyI
from app.services.translate import make_context, never_consulted, t1, t2, t3, t4, translate


@pytest.fixture
def ctx_a(fix_a, reflection_one):
    return make_context(fix_a, reflection_one)


class TestT1:
    def test_backward_fix_a(self, ctx_a):
        result = t1(ctx_a, "backward", MarkovStrategyII({(0, 0): "1"}, 1))
        assert result.strategy == PredeterminedStrategyI((0,))
        assert result.target == "primal"

    def test_forward_fix_b(self, point_open):
        ctx = point_open(1)
        winner = solve(ctx.primal, "I_pre").witness
        result = t1(ctx, "forward", winner)
        assert result.strategy.table == {(0, 0): "{0}", (1, 0): "{1}"}
        assert verify_strategy(ctx.dual, result.strategy).ok

    def test_backward_subset_failure(self, fix_a, reflection_pair):
        ctx = make_context(fix_a, reflection_pair)
        with pytest.raises(ReflectionViolation) as exc:
            t1(ctx, "backward", MarkovStrategyII({(0, 0): "2"}, 1), allow_unchecked=True)
        assert exc.value.condition == "subset"
        assert exc.value.witness["range"] == ["2"]

    def test_forward_coinitial_failure(self, make_game):
        g = make_game(["1", "2"], [["1"], ["2"]], [["1"]], 1)
        ctx = make_context(g, Family.build(g.universe, [["1"]]))
        assert ctx.reflection.failed_condition == "coinitial"
        with pytest.raises(ReflectionViolation) as exc:
            t1(ctx, "forward", PredeterminedStrategyI((1,)), allow_unchecked=True)
        assert exc.value.condition == "coinitial"


class TestT2:
    def test_forward_fix_a(self, ctx_a):
        result = t2(ctx_a, "forward", MarkovStrategyII({(0, 0): "1", (1, 0): "1"}, 1))
        assert result.strategy == PredeterminedStrategyI((0,))
        assert result.provenance[0]["member"] == 0

    def test_backward_fix_a(self, ctx_a):
        result = t2(ctx_a, "backward", PredeterminedStrategyI((0,)))
        assert result.strategy.table == {(0, 0): "1", (1, 0): "1"}
        assert verify_strategy(ctx_a.primal, result.strategy).ok

    def test_forward_without_reflection(self, fix_a, reflection_pair):
        ctx = make_context(fix_a, reflection_pair)
        with pytest.raises(ReflectionViolation) as exc:
            t2(ctx, "forward", MarkovStrategyII({(0, 0): "1", (1, 0): "1"}, 1), allow_unchecked=True)
        assert exc.value.condition == "subset"
        assert exc.value.witness["hit"] == ["1"]


class TestT3:
    def test_forward_fix_a_values(self, ctx_a):
        result = t3(ctx_a, "forward", FullStrategyI({(): 1}, 1))
        assert result.strategy.table == {(0,): "1"}

    def test_forward_fix_b(self, point_open):
        ctx = point_open(1)
        result = t3(ctx, "forward", FullStrategyI({(): 0}, 1))
        assert verify_strategy(ctx.dual, result.strategy).ok

    def test_backward_fillers_never_consulted(self, make_game):
        g = make_game(["1", "2"], [["1"], ["1", "2"]], [], 2)
        ctx = make_context(g, Family.build(g.universe, [["1"]]))
        winner = solve(ctx.dual, "II_full").witness
        result = t3(ctx, "backward", winner)
        assert result.fillers == (("2",),)
        assert result.strategy.table[("2",)] == 0
        assert never_consulted(ctx.primal, result.strategy, result.fillers)
        assert verify_strategy(ctx.primal, result.strategy).ok

    def test_backward_point_open(self, point_open):
        ctx = point_open(1)
        winner = solve(ctx.dual, "II_full").witness
        result = t3(ctx, "backward", winner)
        assert result.strategy.table == {(): 0}
        assert verify_strategy(ctx.primal, result.strategy).ok


class TestT4:
    def test_forward_fix_a(self, ctx_a):
        result = t4(ctx_a, "forward", FullStrategyII({(0,): "1", (1,): "1"}, 1))
        assert result.strategy.table == {(): 0}
        assert verify_strategy(ctx_a.dual, result.strategy).ok

    def test_backward_fix_b(self, point_open):
        ctx = point_open(2)
        winner = solve(ctx.dual, "I_full").witness
        result = t4(ctx, "backward", winner)
        assert verify_strategy(ctx.primal, result.strategy).ok


def test_wrong_strategy_class(ctx_a):
    with pytest.raises(DomainError):
        translate(ctx_a, "t1", "forward", MarkovStrategyII({(0, 0): "1", (1, 0): "1"}, 1))


def test_unknown_translation(ctx_a):
    with pytest.raises(DomainError):
        translate(ctx_a, "t9", "forward", PredeterminedStrategyI((0,)))


def test_unchecked_context_refused(fix_a, reflection_pair):
    ctx = make_context(fix_a, reflection_pair)
    with pytest.raises(ReflectionViolation):
        t1(ctx, "forward", PredeterminedStrategyI((0,)))


def test_illegal_source_strategy(ctx_a):
    with pytest.raises(IllegalStrategyError):
        t2(ctx_a, "forward", MarkovStrategyII({(0, 0): "2", (1, 0): "1"}, 1))


def test_universe_must_match(fix_a):
    with pytest.raises(DomainError):
        make_context(fix_a, Family.build(Universe.of(["1", "3"]), [["1"]]))


@pytest.fixture
def point_open_one(point_open):
    return point_open(1)


@pytest.mark.parametrize("context", ["ctx_a", "point_open_one"])
def test_single_round_full_translations_match_restricted_ones(request, context):
    ctx = request.getfixturevalue(context)
    A = ctx.primal.family
    for j in range(len(A)):
        markov = t1(ctx, "forward", PredeterminedStrategyI((j,))).strategy
        full = t3(ctx, "forward", FullStrategyI({(): j}, 1)).strategy
        assert full.table == {(i,): markov.table[(i, 0)] for i in range(len(ctx.reflection_family))}
    for answers in itertools.product(*(A.ordered_member(j) for j in range(len(A)))):
        markov_ii = MarkovStrategyII({(j, 0): x for j, x in enumerate(answers)}, 1)
        full_ii = FullStrategyII({(j,): x for j, x in enumerate(answers)}, 1)
        assert t4(ctx, "forward", full_ii).strategy.table == {(): t2(ctx, "forward", markov_ii).strategy.moves[0]}
