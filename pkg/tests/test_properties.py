import itertools

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from app.exceptions import IllegalStrategyError
from app.services.core import Family, outcome_of
from app.services.reflection import choice_ranges, coinitial_by_enumeration, is_reflection, is_selection_basis
from app.services.solver import RELATIONS, check_chain, solve, solve_all, verify_strategy
from app.services.strategies import MarkovStrategyII, PredeterminedStrategyI, all_attacks, induce_full, play

from .conftest import build_game

ATOMS = ["1", "2", "3"]

fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def subsets(draw, universe, min_size=0):
    return sorted(draw(st.sets(st.sampled_from(universe), min_size=min_size)))


@st.composite
def games(draw, max_horizon=2):
    n = draw(st.integers(1, len(ATOMS)))
    universe = ATOMS[:n]
    family = draw(st.lists(subsets(universe, min_size=1), min_size=1, max_size=3, unique_by=tuple))
    winning = draw(st.lists(subsets(universe), max_size=4, unique_by=tuple))
    horizon = draw(st.integers(1, max_horizon))
    return build_game(universe, family, winning, horizon, negated=draw(st.booleans()))


@st.composite
def family_pairs(draw):
    universe = ATOMS[: draw(st.integers(1, len(ATOMS)))]
    R = draw(st.lists(subsets(universe, min_size=1), min_size=1, max_size=3, unique_by=tuple))
    A = draw(st.lists(subsets(universe, min_size=1), min_size=1, max_size=3, unique_by=tuple))
    g = build_game(universe, A, [], 1)
    return g.family, build_game(universe, R, [], 1).family


@given(games(), st.data())
@fast
def test_negation_is_an_involution(g, data):
    selected = data.draw(subsets(list(g.universe.ids)))
    p = g.payoff
    assert p.negate().negate() == p
    assert p.negate().evaluate(selected) != p.evaluate(selected)


@given(st.lists(st.sampled_from(ATOMS), max_size=4))
def test_outcome_forgets_order_and_repeats(selections):
    for perm in itertools.permutations(selections):
        assert outcome_of(perm) == outcome_of(selections)
    assert outcome_of(selections + selections) == outcome_of(selections)


@given(family_pairs())
@fast
def test_coinitial_check_matches_range_enumeration(pair):
    A, R = pair
    assert is_reflection(R, A, strict=False).is_reflection == coinitial_by_enumeration(R, A)


@given(games())
@fast
def test_markov_search_modes_agree(g):
    transversal = solve(g, "II_markov", markov_search="transversal")
    exhaustive = solve(g, "II_markov", markov_search="exhaustive")
    assert transversal.holds == exhaustive.holds
    if transversal.holds:
        assert verify_strategy(g, transversal.witness).ok
        assert verify_strategy(g, exhaustive.witness).ok
        assert transversal.witness == exhaustive.witness


@given(games())
@fast
def test_memo_table_does_not_change_verdicts(g):
    for relation in ("I_full", "II_full"):
        assert solve(g, relation, use_cache=True).holds == solve(g, relation, use_cache=False).holds


@given(games())
@fast
def test_verdicts_respect_the_chain_and_witnesses_win(g):
    reports = solve_all(g)
    assert check_chain({r: reports[r].holds for r in RELATIONS}) == []
    for report in reports.values():
        if report.holds:
            assert verify_strategy(g, report.witness).ok


@given(games())
@fast
def test_predetermined_witness_is_least_winning_sequence(g):
    report = solve(g, "I_pre")
    if report.holds:
        earlier = itertools.takewhile(lambda m: m != report.witness.moves, all_attacks(g))
        assert not any(verify_strategy(g, PredeterminedStrategyI(m)).ok for m in earlier)


@given(family_pairs())
@fast
def test_choice_ranges_form_a_selection_basis_exactly_for_reflections(pair):
    A, R = pair
    ranges = Family.build(R.universe, list(choice_ranges(R)))
    assert is_selection_basis(ranges, A) == is_reflection(R, A).is_reflection


@given(family_pairs())
@fast
def test_selection_basis_is_reflexive(pair):
    A, _ = pair
    assert is_selection_basis(A, A)


@given(family_pairs(), st.data())
@fast
def test_selection_basis_is_transitive(pair, data):
    Z, _ = pair
    Y = Family.build(Z.universe, data.draw(st.lists(st.sampled_from(Z.members), min_size=1, unique=True)))
    X = Family.build(Z.universe, data.draw(st.lists(st.sampled_from(Y.members), min_size=1, unique=True)))
    if is_selection_basis(X, Y) and is_selection_basis(Y, Z):
        assert is_selection_basis(X, Z)


class ScriptedII:
    """Answers round n with replies[n] whatever I plays."""

    def __init__(self, replies):
        self.replies = replies

    def respond(self, attack):
        return self.replies[len(attack) - 1]


def play_or_illegal(g, s_i, s_ii):
    try:
        return play(g, s_i, s_ii)
    except IllegalStrategyError:
        return "illegal"


@given(games(), st.data())
@fast
def test_induced_markov_strategy_plays_like_its_source(g, data):
    atoms = list(g.universe.ids)
    cells = [(i, n) for n in range(g.horizon) for i in range(len(g.family))]
    s = MarkovStrategyII({c: data.draw(st.sampled_from(atoms)) for c in cells}, g.horizon)
    full = induce_full(g, s)
    for attack in all_attacks(g):
        opponent = PredeterminedStrategyI(attack)
        assert play_or_illegal(g, opponent, full) == play_or_illegal(g, opponent, s)


@given(games(), st.data())
@fast
def test_induced_predetermined_strategy_plays_like_its_source(g, data):
    s = PredeterminedStrategyI(tuple(data.draw(st.integers(0, len(g.family) - 1)) for _ in range(g.horizon)))
    full = induce_full(g, s)
    for replies in itertools.product(g.universe.ids, repeat=g.horizon):
        opponent = ScriptedII(replies)
        assert play_or_illegal(g, full, opponent) == play_or_illegal(g, s, opponent)
