"""
Finite-table strategies for the four strategy classes, play-out and legality.

Player I moves are family-member indices, player II moves are atoms.

- ``FullStrategyI``: II's previous atoms -> member index
- ``FullStrategyII``: I's moves so far (nonempty) -> atom
- ``PredeterminedStrategyI``: round -> member index
- ``MarkovStrategyII``: (I's latest member index, round) -> atom
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import ClassVar, Iterator, Mapping, Optional, Sequence, Union

from app.exceptions import BoundExceeded, IllegalStrategyError
from app.services.core import AtomSet, GameInstance, outcome_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredeterminedStrategyI:
    player: ClassVar[str] = "I"
    kind: ClassVar[str] = "predetermined"

    moves: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return len(self.moves)

    def respond(self, replies: Sequence[str]) -> int:
        n = len(replies)
        if n >= len(self.moves):
            raise IllegalStrategyError("no predetermined move for this round", n, replies)
        return self.moves[n]


@dataclass(frozen=True)
class FullStrategyI:
    player: ClassVar[str] = "I"
    kind: ClassVar[str] = "full"

    table: Mapping[tuple[str, ...], int]
    horizon: int

    def respond(self, replies: Sequence[str]) -> int:
        try:
            return self.table[tuple(replies)]
        except KeyError:
            raise IllegalStrategyError("no entry for this history of replies", len(replies), replies) from None


@dataclass(frozen=True)
class FullStrategyII:
    player: ClassVar[str] = "II"
    kind: ClassVar[str] = "full"

    table: Mapping[tuple[int, ...], str]
    horizon: int

    def respond(self, attack: Sequence[int]) -> str:
        try:
            return self.table[tuple(attack)]
        except KeyError:
            raise IllegalStrategyError("no entry for this attack history", len(attack) - 1, attack) from None


@dataclass(frozen=True)
class MarkovStrategyII:
    player: ClassVar[str] = "II"
    kind: ClassVar[str] = "markov"

    table: Mapping[tuple[int, int], str]
    horizon: int

    def respond(self, attack: Sequence[int]) -> str:
        key = (attack[-1], len(attack) - 1)
        try:
            return self.table[key]
        except KeyError:
            raise IllegalStrategyError(f"no entry for member {key[0]}", key[1], attack) from None


StrategyI = Union[FullStrategyI, PredeterminedStrategyI]
StrategyII = Union[FullStrategyII, MarkovStrategyII]
Strategy = Union[StrategyI, StrategyII]


@dataclass(frozen=True)
class Transcript:
    rounds: tuple[tuple[int, str], ...]
    outcome: AtomSet
    winner: str

    @property
    def attack(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.rounds)

    @property
    def replies(self) -> tuple[str, ...]:
        return tuple(b for _, b in self.rounds)


def play(g: GameInstance, s_i: StrategyI, s_ii: StrategyII) -> Transcript:
    replies: list[str] = []
    attack: list[int] = []
    for n in range(g.horizon):
        a = s_i.respond(replies)
        if not 0 <= a < len(g.family):
            raise IllegalStrategyError(f"player I played unknown member {a}", n, replies)
        attack.append(a)
        b = s_ii.respond(attack)
        if b not in g.family[a]:
            raise IllegalStrategyError(f"player II answered {b!r}, not in member {a}", n, attack)
        replies.append(b)
    outcome = outcome_of(replies)
    winner = "II" if g.payoff.evaluate(outcome) else "I"
    return Transcript(tuple(zip(attack, replies)), outcome, winner)


def all_attacks(g: GameInstance) -> Iterator[tuple[int, ...]]:
    """Every sequence of I-moves of full length."""
    return itertools.product(range(len(g.family)), repeat=g.horizon)


def _i_histories(g: GameInstance, budget: Optional[int]) -> Iterator[tuple[int, ...]]:
    count = 0
    for n in range(1, g.horizon + 1):
        for h in itertools.product(range(len(g.family)), repeat=n):
            count += 1
            if budget is not None and count > budget:
                raise BoundExceeded("attack histories", budget, count)
            yield h


@dataclass(frozen=True)
class LegalityReport:
    issues: tuple[str, ...] = ()
    missing: tuple[tuple, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok


def check_legal(g: GameInstance, s: Strategy, budget: Optional[int] = None) -> LegalityReport:
    issues: list[str] = []
    missing: list[tuple] = []
    m = len(g.family)
    if s.horizon != g.horizon:
        issues.append(f"strategy horizon {s.horizon} differs from game horizon {g.horizon}")

    if isinstance(s, PredeterminedStrategyI):
        for n, a in enumerate(s.moves):
            if not 0 <= a < m:
                issues.append(f"round {n}: member index {a} out of range")
    elif isinstance(s, MarkovStrategyII):
        for (j, n), b in sorted(s.table.items()):
            if not (0 <= j < m and 0 <= n < g.horizon):
                issues.append(f"entry ({j},{n}) is outside the game")
            elif b not in g.family[j]:
                issues.append(f"entry ({j},{n}) = {b!r} is not in member {j}")
        for j in range(m):
            for n in range(g.horizon):
                if (j, n) not in s.table:
                    missing.append((j, n))
                    issues.append(f"missing entry ({j},{n})")
    elif isinstance(s, FullStrategyII):
        for h in _i_histories(g, budget):
            if h not in s.table:
                missing.append(h)
                issues.append(f"missing history {list(h)}")
            elif s.table[h] not in g.family[h[-1]]:
                issues.append(f"history {list(h)}: {s.table[h]!r} is not in member {h[-1]}")
    else:
        stack: list[tuple[str, ...]] = [()]
        while stack:
            h = stack.pop()
            if h not in s.table:
                missing.append(h)
                issues.append(f"missing history {list(h)}")
                continue
            a = s.table[h]
            if not 0 <= a < m:
                issues.append(f"history {list(h)}: member index {a} out of range")
                continue
            if len(h) + 1 < g.horizon:
                stack.extend(h + (x,) for x in g.universe.ordered(g.family[a]))
    return LegalityReport(tuple(issues), tuple(missing))


def reachable_histories(g: GameInstance, s: Strategy, budget: Optional[int] = None) -> list[tuple]:
    """History keys the strategy can be asked about in legal play."""
    if isinstance(s, PredeterminedStrategyI):
        return [(n,) for n in range(g.horizon)]
    if isinstance(s, MarkovStrategyII):
        return [(j, n) for n in range(g.horizon) for j in range(len(g.family))]
    if isinstance(s, FullStrategyII):
        return list(_i_histories(g, budget))
    return list(_reply_histories(g, s, budget))


def _reply_histories(g: GameInstance, s: StrategyI, budget: Optional[int]) -> list[tuple[str, ...]]:
    found: list[tuple[str, ...]] = []
    frontier: deque[tuple[str, ...]] = deque([()])
    while frontier:
        h = frontier.popleft()
        found.append(h)
        if budget is not None and len(found) > budget:
            raise BoundExceeded("reachable histories", budget, len(found))
        if len(h) + 1 < g.horizon:
            a = s.respond(h)
            frontier.extend(h + (x,) for x in g.universe.ordered(g.family[a]))
    return found


def induce_full(g: GameInstance, s: Strategy, budget: Optional[int] = None) -> Union[FullStrategyI, FullStrategyII]:
    """The full-information strategy that plays exactly like ``s``."""
    if isinstance(s, (FullStrategyI, FullStrategyII)):
        return s
    if isinstance(s, MarkovStrategyII):
        return FullStrategyII({h: s.respond(h) for h in _i_histories(g, budget)}, g.horizon)
    table = {h: s.respond(h) for h in _reply_histories(g, s, budget)}
    return FullStrategyI(table, g.horizon)
