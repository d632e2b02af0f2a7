"""
Choice-function algebra over set families.

``R`` reflects ``A`` when the ranges of the choice functions on ``R`` form a
selection basis of ``A``:

- subset: every range is itself a member of ``A``;
- coinitial: every member of ``A`` contains some range.

The coinitial part is decided without enumeration: a range inside ``a``
exists iff every member of ``R`` meets ``a``.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from app.exceptions import BoundExceeded, UniverseMismatch
from app.services.core import AtomSet, Family, GameInstance, Universe, require_same_universe

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChoiceFunction:
    """assignment[i] is the atom chosen from member i."""

    assignment: tuple[str, ...]

    def __call__(self, i: int) -> str:
        return self.assignment[i]

    @property
    def range(self) -> AtomSet:
        return frozenset(self.assignment)

    def to_dict(self, universe: Universe) -> dict[str, Any]:
        return {"assignment": list(self.assignment), "range": list(universe.ordered(self.range))}


def _check_budget(what: str, needed: int, budget: Optional[int]) -> None:
    if budget is not None and needed > budget:
        raise BoundExceeded(what, budget, needed)


def enumerate_choice_functions(R: Family, budget: Optional[int] = None) -> list[ChoiceFunction]:
    """All choice functions on R, lexicographic by (member index, atom order)."""
    _check_budget("choice functions", math.prod(len(m) for m in R), budget)
    ordered = [R.ordered_member(i) for i in range(len(R))]
    return [ChoiceFunction(t) for t in itertools.product(*ordered)]


def choice_ranges(R: Family, budget: Optional[int] = None) -> dict[AtomSet, ChoiceFunction]:
    """Distinct ranges of choice functions on R, each with its least choice function.

    Partial ranges are merged member by member; the least tuple reaching a
    range always extends the least tuple reaching its prefix range.
    """
    universe = R.universe
    partial: dict[AtomSet, tuple[str, ...]] = {frozenset(): ()}
    explored = 0
    for i in range(len(R)):
        extended: dict[AtomSet, tuple[str, ...]] = {}
        for rng, choice in partial.items():
            for x in R.ordered_member(i):
                explored += 1
                if budget is not None and explored > budget:
                    raise BoundExceeded("choice ranges", budget, explored)
                key = rng | {x}
                candidate = choice + (x,)
                current = extended.get(key)
                if current is None or _lex(universe, candidate) < _lex(universe, current):
                    extended[key] = candidate
        partial = extended
    ordered = sorted(partial.items(), key=lambda kv: _lex(universe, kv[1]))
    return {rng: ChoiceFunction(choice) for rng, choice in ordered}


def _lex(universe: Universe, choice: tuple[str, ...]) -> tuple[int, ...]:
    return tuple(universe.position(x) for x in choice)


def least_choice_within(R: Family, target: AtomSet) -> Optional[ChoiceFunction]:
    """Least choice function on R whose range lies inside ``target``, if any."""
    picks: list[str] = []
    for i in range(len(R)):
        inside = [x for x in R.ordered_member(i) if x in target]
        if not inside:
            return None
        picks.append(inside[0])
    return ChoiceFunction(tuple(picks))


def minimal_transversals(family: Family, budget: Optional[int] = None) -> list[AtomSet]:
    """Subset-minimal sets meeting every member, by size then atom order."""
    universe = family.universe
    support = universe.ordered(set().union(*family.members)) if family.members else ()
    found: list[AtomSet] = []
    explored = 0
    for size in range(len(support) + 1):
        for combo in itertools.combinations(support, size):
            explored += 1
            if budget is not None and explored > budget:
                raise BoundExceeded("minimal transversals", budget, explored)
            candidate = frozenset(combo)
            if any(t <= candidate for t in found):
                continue
            if all(candidate & m for m in family.members):
                found.append(candidate)
    return found


def is_selection_basis(a_prime: Family, a: Family) -> bool:
    """a_prime ≼ a: a subfamily such that every member of a contains one of it."""
    require_same_universe(a_prime, a)
    members = set(a.members)
    if any(m not in members for m in a_prime.members):
        return False
    return all(any(p <= m for p in a_prime.members) for m in a.members)


@dataclass(frozen=True)
class ReflectionReport:
    is_reflection: bool
    failed_condition: Optional[str] = None
    witness: dict[str, Any] = field(default_factory=dict)
    subset_ok: Optional[bool] = None
    coinitial_ok: Optional[bool] = None
    ranges_checked: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_reflection": self.is_reflection,
            "failed_condition": self.failed_condition,
            "witness": self.witness or None,
            "subset_ok": self.subset_ok,
            "coinitial_ok": self.coinitial_ok,
            "ranges_checked": self.ranges_checked,
        }


def _coinitial_witness(R: Family, A: Family) -> Optional[dict[str, Any]]:
    universe = R.universe
    for j, a in enumerate(A.members):
        for i, r in enumerate(R.members):
            if not r & a:
                return {
                    "member": list(universe.ordered(a)),
                    "member_index": j,
                    "disjoint_reflection_member": list(universe.ordered(r)),
                    "reflection_index": i,
                }
    return None


def is_reflection(R: Family, A: Family, strict: bool = True, budget: Optional[int] = None) -> ReflectionReport:
    """Decide whether R reflects A.

    With ``strict=False`` only the coinitial part is checked, which is the
    weaker prose reading of the definition.
    """
    require_same_universe(R, A)
    coinitial_witness = _coinitial_witness(R, A)
    coinitial_ok = coinitial_witness is None

    subset_ok: Optional[bool] = None
    subset_witness: Optional[dict[str, Any]] = None
    checked = 0
    if strict:
        members = set(A.members)
        ranges = choice_ranges(R, budget)
        checked = len(ranges)
        subset_ok = True
        for rng, f in ranges.items():
            if rng not in members:
                subset_ok = False
                subset_witness = {"choice_function": f.to_dict(R.universe), "range": list(R.universe.ordered(rng))}
                break

    if subset_ok is False:
        report = ReflectionReport(False, "subset", subset_witness or {}, subset_ok, coinitial_ok, checked)
    elif not coinitial_ok:
        report = ReflectionReport(False, "coinitial", coinitial_witness or {}, subset_ok, coinitial_ok, checked)
    else:
        report = ReflectionReport(True, None, {}, subset_ok, coinitial_ok, checked)
    logger.debug("reflection check: %s", report)
    return report


def coinitial_by_enumeration(R: Family, A: Family, budget: Optional[int] = None) -> bool:
    """The coinitial condition decided from the ranges themselves."""
    ranges = list(choice_ranges(R, budget))
    return all(any(rng <= a for rng in ranges) for a in A.members)


def dualize(g: GameInstance, R: Family) -> GameInstance:
    """G(A, B) -> G(R, not-B) over the same universe and horizon."""
    if not R.universe.same_atoms(g.universe):
        raise UniverseMismatch("reflection family is over a different universe than the game")
    return GameInstance(g.universe, Family(R.members, g.universe), g.payoff.negate(), g.horizon)
