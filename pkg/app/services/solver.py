"""
Exhaustive solver for the four win relations of a finite selection game.

Full-information play is decided by backward induction over
(round, selected set) states. This is exact because both the payoff and all
future legality depend on nothing else.

The limited-information relations use two monotonicity facts. Shrinking a
predetermined move of I, or the image of one round of a Markov table of II,
can only remove outcomes. So I only needs subset-minimal members of the
family, and each round of a Markov table only needs a subset-minimal
transversal as its image. The outcome is a set, so round order is irrelevant
and multisets suffice for the verdicts. A holding verdict then gets the least
winning move sequence or table, searched in lexicographic order.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

from app.config import get_settings
from app.exceptions import BoundExceeded, DomainError, IllegalStrategyError
from app.services.core import GameInstance, require_valid
from app.services.reflection import minimal_transversals
from app.services.strategies import (
    FullStrategyI,
    FullStrategyII,
    MarkovStrategyII,
    PredeterminedStrategyI,
    Strategy,
    StrategyI,
    Transcript,
    all_attacks,
    play,
)

logger = logging.getLogger(__name__)

RELATIONS = ("I_full", "I_pre", "II_full", "II_markov")


class NodeCounter:
    def __init__(self, budget: int, what: str):
        self.budget = budget
        self.what = what
        self.count = 0

    def tick(self, n: int = 1) -> None:
        self.count += n
        if self.count > self.budget:
            raise BoundExceeded(self.what, self.budget, self.count)


class Arena:
    """A game compiled to bitmasks, with payoff results cached per selected set."""

    def __init__(self, g: GameInstance):
        self.g = g
        self.universe = g.universe
        self.horizon = g.horizon
        self.member_bits: list[list[int]] = [
            [1 << self.universe.position(x) for x in g.family.ordered_member(j)] for j in range(len(g.family))
        ]
        self._payoff: dict[int, bool] = {}

    @property
    def size(self) -> int:
        return len(self.member_bits)

    def atom(self, bit: int) -> str:
        return self.universe.ids[bit.bit_length() - 1]

    def ii_wins(self, mask: int) -> bool:
        result = self._payoff.get(mask)
        if result is None:
            result = self.g.payoff.evaluate(self.universe.unmask(mask))
            self._payoff[mask] = result
        return result

    def outcomes(self, columns: list[list[int]], counter: NodeCounter, start: int = 0) -> set[int]:
        """Every selected set reachable when round n may select any bit of columns[n]."""
        states = {start}
        for bits in columns:
            states = {s | b for s in states for b in bits}
            counter.tick(len(states))
        return states


@dataclass(frozen=True)
class SolveReport:
    relation: str
    holds: bool
    witness: Optional[Strategy] = None
    nodes_explored: int = 0
    bound_hit: bool = False
    witness_skipped: bool = False


def resolve_budget(budget: Optional[int]) -> int:
    return budget if budget is not None else get_settings().node_budget


class _FullSolver:
    def __init__(self, arena: Arena, counter: NodeCounter, use_cache: bool):
        self.arena = arena
        self.counter = counter
        self.memo: Optional[dict[tuple[int, int], bool]] = {} if use_cache else None

    def ii_value(self, n: int, mask: int) -> bool:
        """True iff II wins from round n with ``mask`` already selected."""
        if self.memo is not None:
            cached = self.memo.get((n, mask))
            if cached is not None:
                return cached
        self.counter.tick()
        arena = self.arena
        if n == arena.horizon:
            value = arena.ii_wins(mask)
        else:
            value = all(any(self.ii_value(n + 1, mask | b) for b in bits) for bits in arena.member_bits)
        if self.memo is not None:
            self.memo[(n, mask)] = value
        return value

    def ii_witness(self) -> FullStrategyII:
        arena = self.arena
        table: dict[tuple[int, ...], str] = {}
        frontier: list[tuple[tuple[int, ...], int]] = [((), 0)]
        while frontier:
            history, mask = frontier.pop()
            n = len(history)
            for j, bits in enumerate(arena.member_bits):
                self.counter.tick()
                b = next(b for b in bits if self.ii_value(n + 1, mask | b))
                table[history + (j,)] = arena.atom(b)
                if n + 1 < arena.horizon:
                    frontier.append((history + (j,), mask | b))
        return FullStrategyII(dict(sorted(table.items())), arena.horizon)

    def i_witness(self) -> FullStrategyI:
        arena = self.arena
        table: dict[tuple[str, ...], int] = {}
        frontier: list[tuple[tuple[str, ...], int]] = [((), 0)]
        while frontier:
            history, mask = frontier.pop()
            n = len(history)
            self.counter.tick()
            j = next(
                j
                for j, bits in enumerate(arena.member_bits)
                if not any(self.ii_value(n + 1, mask | b) for b in bits)
            )
            table[history] = j
            if n + 1 < arena.horizon:
                frontier.extend((history + (arena.atom(b),), mask | b) for b in arena.member_bits[j])
        return FullStrategyI(dict(sorted(table.items())), arena.horizon)


def _solve_pre(arena: Arena, counter: NodeCounter, want_witness: bool) -> tuple[bool, Optional[Strategy]]:
    holds = False
    for combo in itertools.combinations_with_replacement(arena.g.family.minimal_indices(), arena.horizon):
        counter.tick()
        states = arena.outcomes([arena.member_bits[j] for j in combo], counter)
        if not any(arena.ii_wins(s) for s in states):
            holds = True
            break
    if not holds or not want_witness:
        return holds, None
    for moves in itertools.product(range(arena.size), repeat=arena.horizon):
        counter.tick()
        states = arena.outcomes([arena.member_bits[j] for j in moves], counter)
        if not any(arena.ii_wins(s) for s in states):
            return True, PredeterminedStrategyI(moves)
    raise AssertionError("a winning multiset of minimal members is itself a winning sequence")


def _transversal_columns(arena: Arena, counter: NodeCounter) -> list[list[int]]:
    transversals = [arena.universe.mask(t) for t in minimal_transversals(arena.g.family, counter.budget)]
    counter.tick(len(transversals))
    return [[1 << i for i in range(len(arena.universe)) if t >> i & 1] for t in transversals]


def _completes(arena: Arena, counter: NodeCounter, columns: list[list[int]], states: set[int], rounds: int) -> bool:
    """Some choice of ``rounds`` minimal-transversal images takes every state to a win for II."""
    for combo in itertools.combinations_with_replacement(range(len(columns)), rounds):
        counter.tick()
        current = states
        for k in combo:
            current = {s | b for s in current for b in columns[k]}
            counter.tick(len(current))
        if all(arena.ii_wins(s) for s in current):
            return True
    return False


def _solve_markov_transversal(
    arena: Arena, counter: NodeCounter, want_witness: bool
) -> tuple[bool, Optional[Strategy]]:
    columns = _transversal_columns(arena, counter)
    if not _completes(arena, counter, columns, {0}, arena.horizon):
        return False, None
    if not want_witness:
        return True, None

    def extendable(states: set[int], rounds: int) -> bool:
        return _completes(arena, counter, columns, states, rounds)

    return _least_markov_table(arena, counter, extendable)


def _least_markov_table(
    arena: Arena, counter: NodeCounter, extendable: Optional[Callable[[set[int], int], bool]] = None
) -> tuple[bool, Optional[Strategy]]:
    """Cell-by-cell backtracking in (round, member) order; finds the least table.

    ``extendable`` prunes a finished column whose states cannot be won in
    the remaining rounds.
    """
    m, horizon = arena.size, arena.horizon
    cells = [(n, j) for n in range(horizon) for j in range(m)]
    chosen: list[int] = []

    def search(k: int, states: set[int]) -> bool:
        if k == len(cells):
            return True
        n, j = cells[k]
        last_round = n == horizon - 1
        for b in arena.member_bits[j]:
            counter.tick()
            if last_round and not all(arena.ii_wins(s | b) for s in states):
                continue
            chosen.append(b)
            if j == m - 1 and not last_round:
                column = chosen[n * m : (n + 1) * m]
                following = {s | c for s in states for c in column}
                found = (extendable is None or extendable(following, horizon - n - 1)) and search(k + 1, following)
            else:
                found = search(k + 1, states)
            if found:
                return True
            chosen.pop()
        return False

    if not search(0, {0}):
        return False, None
    table = {(j, n): arena.atom(chosen[n * m + j]) for n in range(horizon) for j in range(m)}
    return True, MarkovStrategyII(dict(sorted(table.items())), horizon)


def solve(
    g: GameInstance,
    relation: str,
    budget: Optional[int] = None,
    *,
    use_cache: bool = True,
    witness: bool = True,
    markov_search: Optional[str] = None,
) -> SolveReport:
    """Decide one of I_full, I_pre, II_full, II_markov for ``g``.

    Raises BoundExceeded when the node budget is spent; a verdict is never
    returned from a truncated search.
    """
    if relation not in RELATIONS:
        raise DomainError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    require_valid(g)
    counter = NodeCounter(resolve_budget(budget), f"solve {relation}")
    arena = Arena(g)
    result: Optional[Strategy] = None

    if relation in ("I_full", "II_full"):
        full = _FullSolver(arena, counter, use_cache)
        ii = full.ii_value(0, 0)
        holds = ii if relation == "II_full" else not ii
        if holds and witness:
            result = full.ii_witness() if relation == "II_full" else full.i_witness()
    elif relation == "I_pre":
        holds, result = _solve_pre(arena, counter, witness)
    else:
        mode = markov_search or get_settings().markov_search
        if mode == "exhaustive":
            holds, result = _least_markov_table(arena, counter)
            result = result if witness else None
        else:
            holds, result = _solve_markov_transversal(arena, counter, witness)

    logger.debug("solved %s: holds=%s after %d nodes", relation, holds, counter.count)
    return SolveReport(relation, holds, result, counter.count, False, holds and not witness)


def solve_all(g: GameInstance, budget: Optional[int] = None, **kwargs: Any) -> dict[str, SolveReport]:
    return {relation: solve(g, relation, budget, **kwargs) for relation in RELATIONS}


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    counterexample: Optional[Transcript] = None
    plays_checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def verify_strategy(g: GameInstance, s: Strategy, budget: Optional[int] = None) -> VerifyResult:
    """Play ``s`` against every attack of the opponent.

    The first lost play (in attack order) is returned as the counterexample.
    """
    counter = NodeCounter(resolve_budget(budget), "verify strategy")
    if s.player == "II":
        counter.tick(len(g.family) ** g.horizon)
        checked = 0
        for attack in all_attacks(g):
            checked += 1
            transcript = play(g, PredeterminedStrategyI(attack), s)  # type: ignore[arg-type]
            if transcript.winner != "II":
                return VerifyResult(False, transcript, checked)
        return VerifyResult(True, None, checked)

    strategy_i: StrategyI = s  # type: ignore[assignment]
    plays = 0

    def explore(replies: tuple[str, ...]) -> Optional[Transcript]:
        nonlocal plays
        if len(replies) == g.horizon:
            plays += 1
            counter.tick()
            transcript = play(g, strategy_i, _ScriptedII(replies))
            return transcript if transcript.winner != "I" else None
        a = strategy_i.respond(replies)
        if not 0 <= a < len(g.family):
            raise IllegalStrategyError(f"player I played unknown member {a}", len(replies), replies)
        for b in g.universe.ordered(g.family[a]):
            counter.tick()
            lost = explore(replies + (b,))
            if lost is not None:
                return lost
        return None

    lost = explore(())
    return VerifyResult(lost is None, lost, plays)


@dataclass(frozen=True)
class _ScriptedII:
    """Player II replaying a fixed reply sequence (an attack on an I strategy)."""

    replies: tuple[str, ...]
    player: str = "II"

    def respond(self, attack: tuple[int, ...]) -> str:
        return self.replies[len(attack) - 1]


def check_chain(verdicts: Mapping[str, bool]) -> list[str]:
    """Violations of II_markov => II_full => not I_full => not I_pre, and of determinacy."""
    violations = []
    if verdicts["II_markov"] and not verdicts["II_full"]:
        violations.append("II_markov holds but II_full fails")
    if verdicts["II_full"] and verdicts["I_full"]:
        violations.append("II_full and I_full both hold")
    if verdicts["I_pre"] and not verdicts["I_full"]:
        violations.append("I_pre holds but I_full fails")
    if not verdicts["II_full"] and not verdicts["I_full"]:
        violations.append("neither I_full nor II_full holds")
    return violations


@dataclass(frozen=True)
class ChainReport:
    verdicts: dict[str, bool]
    violations: list[str] = field(default_factory=list)
    nodes_explored: int = 0

    @property
    def consistent(self) -> bool:
        return not self.violations


def implication_chain(g: GameInstance, budget: Optional[int] = None, **kwargs: Any) -> ChainReport:
    reports = solve_all(g, budget, witness=False, **kwargs)
    verdicts = {r: reports[r].holds for r in RELATIONS}
    violations = check_chain(verdicts)
    for v in violations:
        logger.error("solver inconsistency: %s", v)
    return ChainReport(verdicts, violations, sum(r.nodes_explored for r in reports.values()))

