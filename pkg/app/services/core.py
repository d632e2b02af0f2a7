"""
Value types for selection games: universes, set families, payoff predicates
and game instances.

A game G(A, B) over a finite universe is played for ``horizon`` rounds. In
each round player I plays a member of the family A and player II answers with
one atom of it. II wins iff the set of its answers satisfies the payoff.
Everything here is an immutable value; validation is report-style so callers
can show every problem at once.
"""

import dataclasses
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar, Iterable, Iterator, Optional, Sequence

from app.exceptions import DomainError, UniverseMismatch

logger = logging.getLogger(__name__)

AtomSet = frozenset[str]


def atom_set(atoms: Iterable[object]) -> AtomSet:
    """Build an AtomSet; atoms are always handled as strings."""
    return frozenset(str(a) for a in atoms)


@dataclass(frozen=True)
class Atom:
    id: str
    meaning: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class Universe:
    """Declared, ordered universe of atoms.

    The order is only used for deterministic tie-breaking ("least atom").
    """

    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if len(set(self.ids)) != len(self.ids):
            raise DomainError("atom ids must be unique within a universe")

    @classmethod
    def of(cls, ids: Iterable[object], meanings: Optional[dict[str, str]] = None) -> "Universe":
        meanings = meanings or {}
        return cls(tuple(Atom(str(i), meanings.get(str(i))) for i in ids))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.atoms)

    @cached_property
    def index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.index

    def same_atoms(self, other: "Universe") -> bool:
        return set(self.ids) == set(other.ids)

    def ordered(self, atoms: Iterable[str]) -> tuple[str, ...]:
        """Atoms in universe order; unknown atoms raise DomainError."""
        return tuple(sorted(atoms, key=self.position))

    def position(self, atom: str) -> int:
        try:
            return self.index[atom]
        except KeyError:
            raise DomainError(f"atom {atom!r} is outside the universe") from None

    def mask(self, atoms: Iterable[str]) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.position(a)
        return m

    def unmask(self, m: int) -> AtomSet:
        return frozenset(a for i, a in enumerate(self.ids) if m >> i & 1)

    def set_key(self, s: Iterable[str]) -> tuple[int, ...]:
        """Sort key for AtomSets: by size, then by atom positions."""
        positions = sorted(self.position(a) for a in s)
        return (len(positions), *positions)


@dataclass(frozen=True, eq=False)
class Family:
    """Finite list of AtomSets over one universe.

    Member order is data for tie-breaking only; equality ignores it.
    Construction does not enforce the invariants, ``problems`` reports them.
    """

    members: tuple[AtomSet, ...]
    universe: Universe

    @classmethod
    def build(cls, universe: Universe, members: Iterable[Iterable[object]]) -> "Family":
        return cls(tuple(atom_set(m) for m in members), universe)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return set(self.members) == set(other.members) and self.universe.same_atoms(other.universe)

    def __hash__(self) -> int:
        return hash((frozenset(self.members), frozenset(self.universe.ids)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[AtomSet]:
        return iter(self.members)

    def __getitem__(self, i: int) -> AtomSet:
        return self.members[i]

    @cached_property
    def _positions(self) -> dict[AtomSet, int]:
        positions: dict[AtomSet, int] = {}
        for i, m in enumerate(self.members):
            positions.setdefault(m, i)
        return positions

    def index_of(self, s: Iterable[str]) -> Optional[int]:
        return self._positions.get(frozenset(s))

    def ordered_member(self, i: int) -> tuple[str, ...]:
        return self.universe.ordered(self.members[i])

    def minimal_indices(self) -> list[int]:
        """Indices of the subset-minimal members (a selection basis of the family)."""
        return [
            i
            for i, m in enumerate(self.members)
            if self._positions[m] == i and not any(o < m for o in self.members)
        ]

    def problems(self) -> list[str]:
        found: list[str] = []
        seen: dict[AtomSet, int] = {}
        for i, m in enumerate(self.members):
            if not m:
                found.append(f"empty family member: index {i}")
            outside = sorted(a for a in m if a not in self.universe)
            if outside:
                found.append(f"atom outside universe: {outside} in member {i}")
            if m in seen:
                found.append(f"duplicate family member: index {i} repeats index {seen[m]}")
            else:
                seen[m] = i
        return found

    def check(self) -> "Family":
        found = self.problems()
        if found:
            raise DomainError("; ".join(found))
        return self

    def to_lists(self) -> list[list[str]]:
        return [list(self.ordered_member(i)) for i in range(len(self.members))]


@dataclass(frozen=True)
class PayoffPredicate(ABC):
    """Total decidable predicate B on AtomSets, optionally negated (not-B)."""

    kind: ClassVar[str] = ""
    negated: bool = field(default=False, kw_only=True)

    @property
    @abstractmethod
    def domain(self) -> frozenset[str]:
        """Atoms the predicate is defined on."""

    @abstractmethod
    def _holds(self, s: AtomSet) -> bool:
        """Membership in B, ignoring the negation flag."""

    def evaluate(self, s: Iterable[str]) -> bool:
        selected = frozenset(s)
        outside = selected - self.domain
        if outside:
            raise DomainError(f"atoms {sorted(outside)} are outside the payoff universe")
        return self._holds(selected) != self.negated

    def negate(self) -> "PayoffPredicate":
        return dataclasses.replace(self, negated=not self.negated)


@dataclass(frozen=True)
class ExtensionalPayoff(PayoffPredicate):
    kind: ClassVar[str] = "extensional"

    sets: frozenset[AtomSet] = frozenset()
    universe: frozenset[str] = frozenset()

    @property
    def domain(self) -> frozenset[str]:
        return self.universe

    def _holds(self, s: AtomSet) -> bool:
        return s in self.sets


def eval_payoff(p: PayoffPredicate, s: Iterable[str]) -> bool:
    return p.evaluate(s)


def negate(p: PayoffPredicate) -> PayoffPredicate:
    return p.negate()


def outcome_of(selections: Sequence[str]) -> AtomSet:
    """The selected set: order and repetitions are forgotten."""
    return frozenset(selections)


@dataclass(frozen=True)
class GameInstance:
    universe: Universe
    family: Family
    payoff: PayoffPredicate
    horizon: int

    def with_family(self, family: Family) -> "GameInstance":
        return dataclasses.replace(self, family=family)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(g: GameInstance) -> ValidationReport:
    violations: list[str] = []
    if not g.family.universe.same_atoms(g.universe):
        violations.append("family universe differs from instance universe")
    if not g.family.members:
        violations.append("empty family")
    violations.extend(g.family.problems())
    uncovered = sorted(set(g.universe.ids) - g.payoff.domain)
    if uncovered:
        violations.append(f"non-total payoff: atoms {uncovered} outside payoff domain")
    if g.horizon < 1:
        violations.append("horizon must be at least 1")
    return ValidationReport(tuple(violations))


def require_valid(g: GameInstance) -> GameInstance:
    report = validate_instance(g)
    if not report.ok:
        raise DomainError("invalid instance: " + "; ".join(report.violations))
    return g


def require_same_universe(a: Family, b: Family) -> None:
    if not a.universe.same_atoms(b.universe):
        raise UniverseMismatch("families are declared over different universes")
