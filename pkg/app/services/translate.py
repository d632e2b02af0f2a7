"""
Strategy translations between a game G(A, B) and its dual G(R, not-B).

Each theorem pairs two strategy classes and comes with a forward direction
(primal strategy -> dual strategy) and a backward one (dual -> primal):

====  ==========================  ==========================
      forward                     backward
====  ==========================  ==========================
t1    predetermined I -> Markov   Markov II (dual) ->
      II (dual)                   predetermined I
t2    Markov II -> predetermined  predetermined I (dual) ->
      I (dual)                    Markov II
t3    full I -> full II (dual)    full II (dual) -> full I
t4    full II -> full I (dual)    full I (dual) -> full II
====  ==========================  ==========================

Every "choose" is resolved by the least qualifying object in family/atom
order. Translations never look at whether the input wins; they only fail
when a step needs a reflection property the families lack.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Optional

from app.exceptions import DomainError, IllegalStrategyError, ReflectionViolation
from app.services.core import AtomSet, Family, GameInstance
from app.services.reflection import ChoiceFunction, ReflectionReport, dualize, is_reflection, least_choice_within
from app.services.solver import NodeCounter, resolve_budget
from app.services.strategies import (
    FullStrategyI,
    FullStrategyII,
    MarkovStrategyII,
    PredeterminedStrategyI,
    Strategy,
    check_legal,
    reachable_histories,
)

logger = logging.getLogger(__name__)

THEOREMS = ("t1", "t2", "t3", "t4")
DIRECTIONS = ("forward", "backward")

# (theorem, direction) -> (source class, source side, target side)
SIGNATURES: dict[tuple[str, str], tuple[type, str, str]] = {
    ("t1", "forward"): (PredeterminedStrategyI, "primal", "dual"),
    ("t1", "backward"): (MarkovStrategyII, "dual", "primal"),
    ("t2", "forward"): (MarkovStrategyII, "primal", "dual"),
    ("t2", "backward"): (PredeterminedStrategyI, "dual", "primal"),
    ("t3", "forward"): (FullStrategyI, "primal", "dual"),
    ("t3", "backward"): (FullStrategyII, "dual", "primal"),
    ("t4", "forward"): (FullStrategyII, "primal", "dual"),
    ("t4", "backward"): (FullStrategyI, "dual", "primal"),
}

# Which translation carries a winning witness of one relation to the other game.
WITNESS_ROUTES: dict[tuple[str, str], tuple[str, str, str]] = {
    ("primal", "I_pre"): ("t1", "forward", "II_markov"),
    ("primal", "II_markov"): ("t2", "forward", "I_pre"),
    ("primal", "I_full"): ("t3", "forward", "II_full"),
    ("primal", "II_full"): ("t4", "forward", "I_full"),
    ("dual", "II_markov"): ("t1", "backward", "I_pre"),
    ("dual", "I_pre"): ("t2", "backward", "II_markov"),
    ("dual", "II_full"): ("t3", "backward", "I_full"),
    ("dual", "I_full"): ("t4", "backward", "II_full"),
}


@dataclass(frozen=True)
class DualityContext:
    primal: GameInstance
    dual: GameInstance
    reflection_checked: bool
    reflection: Optional[ReflectionReport] = None

    @property
    def reflection_family(self) -> Family:
        return self.dual.family

    def side(self, name: str) -> GameInstance:
        return self.primal if name == "primal" else self.dual


def make_context(primal: GameInstance, R: Family, budget: Optional[int] = None) -> DualityContext:
    report = is_reflection(R, primal.family, budget=budget)
    return DualityContext(primal, dualize(primal, R), report.is_reflection, report)


@dataclass(frozen=True)
class TranslationResult:
    theorem: str
    direction: str
    strategy: Strategy
    target: str
    provenance: tuple[dict[str, Any], ...] = ()
    fillers: tuple[tuple, ...] = ()


def _hit_member(R: Family, hit: AtomSet) -> Optional[int]:
    return next((i for i, r in enumerate(R.members) if r <= hit), None)


def _avoiding_choice(R: Family, hit: AtomSet) -> ChoiceFunction:
    """The choice function dodging ``hit``; exists whenever no member of R lies inside it."""
    return ChoiceFunction(tuple(next(x for x in R.ordered_member(i) if x not in hit) for i in range(len(R))))


def _hit_violation(ctx: DualityContext, hit: AtomSet, where: dict[str, Any]) -> ReflectionViolation:
    g = _avoiding_choice(ctx.reflection_family, hit)
    universe = ctx.primal.universe
    witness = {
        **where,
        "hit": list(universe.ordered(hit)),
        "choice_function": g.to_dict(universe),
        "range_in_family": ctx.primal.family.index_of(g.range) is not None,
    }
    return ReflectionViolation("subset", f"no reflection member lies inside the hit set at {where}", witness)


def _least_inside(ctx: DualityContext, member: int, where: dict[str, Any]) -> ChoiceFunction:
    A = ctx.primal.family
    f = least_choice_within(ctx.reflection_family, A[member])
    if f is None:
        witness = {**where, "member": list(A.ordered_member(member)), "member_index": member}
        raise ReflectionViolation("coinitial", f"no choice function has range inside member {member}", witness)
    return f


def _member_of_range(ctx: DualityContext, f: ChoiceFunction, where: dict[str, Any]) -> int:
    idx = ctx.primal.family.index_of(f.range)
    if idx is None:
        universe = ctx.primal.universe
        witness = {**where, "choice_function": f.to_dict(universe), "range": list(universe.ordered(f.range))}
        raise ReflectionViolation("subset", f"range {list(universe.ordered(f.range))} is not a primal member", witness)
    return idx


class _Translator:
    def __init__(self, ctx: DualityContext, counter: NodeCounter):
        self.ctx = ctx
        self.counter = counter
        self.R = ctx.reflection_family
        self.A = ctx.primal.family
        self.N = ctx.primal.horizon
        self.universe = ctx.primal.universe
        self.provenance: list[dict[str, Any]] = []
        self.fillers: list[tuple] = []

    def record(self, **entry: Any) -> None:
        self.provenance.append(entry)

    # -- t1 -----------------------------------------------------------------
    def t1_forward(self, s: PredeterminedStrategyI) -> MarkovStrategyII:
        table: dict[tuple[int, int], str] = {}
        for n, a in enumerate(s.moves):
            self.counter.tick()
            f = _least_inside(self.ctx, a, {"round": n})
            self.record(round=n, inside_member=a, choice_function=f.to_dict(self.universe))
            for i in range(len(self.R)):
                table[(i, n)] = f(i)
        return MarkovStrategyII(table, self.N)

    def t1_backward(self, s: MarkovStrategyII) -> PredeterminedStrategyI:
        moves = []
        for n in range(self.N):
            self.counter.tick()
            f = ChoiceFunction(tuple(s.table[(i, n)] for i in range(len(self.R))))
            idx = _member_of_range(self.ctx, f, {"round": n})
            self.record(round=n, choice_function=f.to_dict(self.universe), member=idx)
            moves.append(idx)
        return PredeterminedStrategyI(tuple(moves))

    # -- t2 -----------------------------------------------------------------
    def t2_forward(self, s: MarkovStrategyII) -> PredeterminedStrategyI:
        moves = []
        for n in range(self.N):
            self.counter.tick()
            answers = [s.table[(j, n)] for j in range(len(self.A))]
            hit = frozenset(answers)
            i = _hit_member(self.R, hit)
            if i is None:
                raise _hit_violation(self.ctx, hit, {"round": n})
            preimages = {x: answers.index(x) for x in self.R.ordered_member(i)}
            self.record(round=n, hit=list(self.universe.ordered(hit)), member=i, preimages=preimages)
            moves.append(i)
        return PredeterminedStrategyI(tuple(moves))

    def t2_backward(self, s: PredeterminedStrategyI) -> MarkovStrategyII:
        choices = [_least_inside(self.ctx, j, {"member": j}) for j in range(len(self.A))]
        for j, f in enumerate(choices):
            self.record(member=j, choice_function=f.to_dict(self.universe))
        table: dict[tuple[int, int], str] = {}
        for n, i in enumerate(s.moves):
            self.counter.tick()
            for j, f in enumerate(choices):
                table[(j, n)] = f(i)
        return MarkovStrategyII(table, self.N)

    # -- t3 -----------------------------------------------------------------
    def t3_forward(self, s: FullStrategyI) -> FullStrategyII:
        table: dict[tuple[int, ...], str] = {}
        # (dual history of reflection members, translated primal replies c(s))
        queue: deque[tuple[tuple[int, ...], tuple[str, ...]]] = deque([((), ())])
        while queue:
            history, replies = queue.popleft()
            self.counter.tick()
            a = s.respond(replies)
            f = _least_inside(self.ctx, a, {"history": list(history)})
            self.record(history=list(history), translated=list(replies), member=a, choice_function=f.to_dict(self.universe))
            for i in range(len(self.R)):
                table[history + (i,)] = f(i)
                if len(history) + 1 < self.N:
                    queue.append((history + (i,), replies + (f(i),)))
        return FullStrategyII(table, self.N)

    def t3_backward(self, s: FullStrategyII) -> FullStrategyI:
        table: dict[tuple[str, ...], int] = {}
        # (primal history of II's atoms, dual history of reflection members behind it)
        queue: deque[tuple[tuple[str, ...], tuple[int, ...]]] = deque([((), ())])
        while queue:
            history, members = queue.popleft()
            self.counter.tick()
            f = ChoiceFunction(tuple(s.respond(members + (i,)) for i in range(len(self.R))))
            table[history] = _member_of_range(self.ctx, f, {"history": list(history)})
            self.record(history=list(history), dual_history=list(members), choice_function=f.to_dict(self.universe))
            if len(history) + 1 >= self.N:
                continue
            for x in self.universe.ids:
                if x in f.range:
                    queue.append((history + (x,), members + (f.assignment.index(x),)))
                else:
                    # II cannot legally answer x here; the entry is never consulted.
                    table[history + (x,)] = 0
                    self.fillers.append(history + (x,))
        return FullStrategyI(table, self.N)

    # -- t4 -----------------------------------------------------------------
    def t4_forward(self, s: FullStrategyII) -> FullStrategyI:
        table: dict[tuple[str, ...], int] = {}
        # (dual history of II's atoms, primal attack a(s) realising them)
        queue: deque[tuple[tuple[str, ...], tuple[int, ...]]] = deque([((), ())])
        while queue:
            history, attack = queue.popleft()
            self.counter.tick()
            answers = [s.respond(attack + (j,)) for j in range(len(self.A))]
            hit = frozenset(answers)
            i = _hit_member(self.R, hit)
            if i is None:
                raise _hit_violation(self.ctx, hit, {"history": list(history)})
            table[history] = i
            self.record(history=list(history), attack=list(attack), hit=list(self.universe.ordered(hit)), member=i)
            if len(history) + 1 < self.N:
                for x in self.R.ordered_member(i):
                    queue.append((history + (x,), attack + (answers.index(x),)))
        return FullStrategyI(table, self.N)

    def t4_backward(self, s: FullStrategyI) -> FullStrategyII:
        choices = [_least_inside(self.ctx, j, {"member": j}) for j in range(len(self.A))]
        for j, f in enumerate(choices):
            self.record(member=j, choice_function=f.to_dict(self.universe))
        table: dict[tuple[int, ...], str] = {}
        # (primal attack, dual replies r(s))
        queue: deque[tuple[tuple[int, ...], tuple[str, ...]]] = deque([((), ())])
        while queue:
            attack, replies = queue.popleft()
            self.counter.tick()
            i = s.respond(replies)
            for j, f in enumerate(choices):
                x = f(i)
                table[attack + (j,)] = x
                if len(attack) + 1 < self.N:
                    queue.append((attack + (j,), replies + (x,)))
        return FullStrategyII(table, self.N)


def translate(
    ctx: DualityContext,
    theorem: str,
    direction: str,
    s: Strategy,
    budget: Optional[int] = None,
    allow_unchecked: bool = False,
) -> TranslationResult:
    """Apply one of the eight translations to ``s``.

    ``allow_unchecked`` runs the construction even when the families were not
    confirmed to be a reflection (used to exhibit the hypothesis failing).
    """
    key = (theorem, direction)
    if key not in SIGNATURES:
        raise DomainError(f"unknown translation {theorem} {direction}")
    expected, source, target = SIGNATURES[key]
    if not isinstance(s, expected):
        raise DomainError(f"{theorem} {direction} expects a {expected.__name__} for the {source} game")
    if not ctx.reflection_checked and not allow_unchecked:
        condition = ctx.reflection.failed_condition if ctx.reflection else "unchecked"
        raise ReflectionViolation(condition or "unchecked", "the reflection family was not confirmed for this context")

    counter = NodeCounter(resolve_budget(budget), f"translate {theorem} {direction}")
    legality = check_legal(ctx.side(source), s, counter.budget)
    if not legality.ok:
        raise IllegalStrategyError(legality.issues[0], 0)

    translator = _Translator(ctx, counter)
    strategy: Strategy = getattr(translator, f"{theorem}_{direction}")(s)
    logger.debug("%s %s produced %s with %d provenance records", theorem, direction, type(strategy).__name__, len(translator.provenance))
    return TranslationResult(theorem, direction, strategy, target, tuple(translator.provenance), tuple(translator.fillers))


def t1(ctx: DualityContext, direction: str, s: Strategy, **kwargs: Any) -> TranslationResult:
    return translate(ctx, "t1", direction, s, **kwargs)


def t2(ctx: DualityContext, direction: str, s: Strategy, **kwargs: Any) -> TranslationResult:
    return translate(ctx, "t2", direction, s, **kwargs)


def t3(ctx: DualityContext, direction: str, s: Strategy, **kwargs: Any) -> TranslationResult:
    return translate(ctx, "t3", direction, s, **kwargs)


def t4(ctx: DualityContext, direction: str, s: Strategy, **kwargs: Any) -> TranslationResult:
    return translate(ctx, "t4", direction, s, **kwargs)


def never_consulted(g: GameInstance, s: Strategy, fillers: tuple[tuple, ...]) -> bool:
    """True when no legal play of ``s`` in ``g`` reaches a filler entry."""
    return not set(fillers) & set(reachable_histories(g, s))
