"""
Finite topological spaces and the selection sets built from them.

Atoms come in two flavours. Cover-type sets (O_X, P_X, Omega_X, F_X) select
basic open sets, so their atoms are basis members named ``{p,q}``. Point-type
sets (T_X, T_X_x, T_X_F, D_X, Omega_X_x, Gamma_X_x) select points, so their
atoms are the points themselves.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, ClassVar, Iterable, Optional, Sequence, Union, cast

from app.config import get_settings
from app.exceptions import BoundExceeded, DomainError
from app.services.core import AtomSet, ExtensionalPayoff, Family, GameInstance, PayoffPredicate, Universe, atom_set
from app.services.solver import RELATIONS, resolve_budget, solve
from app.services.translate import DualityContext, make_context

logger = logging.getLogger(__name__)

COVER_KINDS = ("O_X", "P_X", "Omega_X", "F_X")
POINT_KINDS = ("T_X", "T_X_x", "T_X_F", "D_X", "Omega_X_x", "Gamma_X_x")
KINDS = COVER_KINDS + POINT_KINDS


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[AtomSet, ...]
    basis: tuple[AtomSet, ...]
    subbase: tuple[AtomSet, ...] = ()

    @cached_property
    def point_universe(self) -> Universe:
        return Universe.of(self.points, {p: f"point {p}" for p in self.points})

    @cached_property
    def basis_universe(self) -> Universe:
        names = [self.name(b) for b in self.basis]
        return Universe.of(names, {n: f"open set {n}" for n in names})

    def name(self, s: Iterable[str]) -> str:
        return "{" + ",".join(self.point_universe.ordered(s)) + "}"

    @cached_property
    def open_by_name(self) -> dict[str, AtomSet]:
        return {self.name(u): u for u in self.opens if u}

    @property
    def everything(self) -> AtomSet:
        return frozenset(self.points)

    def key(self, s: Iterable[str]) -> tuple[int, ...]:
        return self.point_universe.set_key(s)

    def require_point(self, x: str) -> str:
        if x not in self.point_universe:
            raise DomainError(f"{x!r} is not a point of the space")
        return x

    def neighbourhoods(self, x: str) -> list[AtomSet]:
        """Basic open sets containing x."""
        self.require_point(x)
        return [b for b in self.basis if x in b]

    def problems(self) -> list[str]:
        found = []
        opens = set(self.opens)
        if frozenset() not in opens or self.everything not in opens:
            found.append("opens must contain the empty set and the whole space")
        for u, v in itertools.combinations(self.opens, 2):
            if u | v not in opens or u & v not in opens:
                found.append(f"opens not closed under union/intersection at {self.name(u)}, {self.name(v)}")
                break
        for b in self.basis:
            if not b or b not in opens:
                found.append(f"basis member {self.name(b)} is not a nonempty open set")
        for u in self.opens:
            if frozenset().union(*[b for b in self.basis if b <= u]) != u:
                found.append(f"open set {self.name(u)} is not a union of basis members")
        return found

    def check(self) -> "FiniteSpace":
        found = self.problems()
        if found:
            raise DomainError("invalid space: " + "; ".join(found))
        return self


def _closure(points: Sequence[str], masks: Iterable[int]) -> list[int]:
    full = (1 << len(points)) - 1
    family = set(masks) | {full}
    changed = True
    while changed:
        extra = {a & b for a in family for b in family} - family
        family |= extra
        changed = bool(extra)
    family.add(0)
    changed = True
    while changed:
        extra = {a | b for a in family for b in family} - family
        family |= extra
        changed = bool(extra)
    return sorted(family)


def _from_masks(points: tuple[str, ...], masks: Iterable[int]) -> list[AtomSet]:
    return [frozenset(p for i, p in enumerate(points) if m >> i & 1) for m in masks]


def topology_from_subbase(points: Sequence[object], subbase: Iterable[Iterable[object]]) -> FiniteSpace:
    """Close a subbase under finite intersections and unions; basis = all nonempty opens."""
    pts = tuple(str(p) for p in points)
    if len(set(pts)) != len(pts):
        raise DomainError("points must be distinct")
    universe = Universe.of(pts)
    sub = tuple(atom_set(s) for s in subbase)
    opens = _from_masks(pts, _closure(pts, (universe.mask(s) for s in sub)))
    opens.sort(key=universe.set_key)
    return FiniteSpace(pts, tuple(opens), tuple(u for u in opens if u), sub)


def with_basis(space: FiniteSpace, basis: Iterable[Iterable[object]]) -> FiniteSpace:
    chosen = [atom_set(b) for b in basis]
    deduped = sorted(set(chosen), key=space.key)
    return FiniteSpace(space.points, space.opens, tuple(deduped), space.subbase).check()


def minimal_basis(space: FiniteSpace) -> tuple[AtomSet, ...]:
    """The minimal neighbourhoods U_x, the smallest basis of a finite space."""
    found = {frozenset.intersection(*[u for u in space.opens if x in u]) for x in space.points}
    return tuple(sorted(found, key=space.key))


def discrete_space(k: int, basis: str = "singletons") -> FiniteSpace:
    points = [str(i) for i in range(k)]
    space = topology_from_subbase(points, [[p] for p in points])
    return with_basis(space, [[p] for p in points]) if basis == "singletons" else space


def sierpinski_space() -> FiniteSpace:
    return topology_from_subbase(["0", "1"], [["1"]])


def _preorder_topologies(points: tuple[str, ...]) -> list[FiniteSpace]:
    n = len(points)
    pairs = [(x, y) for x in range(n) for y in range(n) if x != y]
    spaces = []
    for bits in range(1 << len(pairs)):
        above = [1 << x for x in range(n)]
        for k, (x, y) in enumerate(pairs):
            if bits >> k & 1:
                above[x] |= 1 << y
        # transitive: everything above x is above each y above x
        if any(above[y] & ~above[x] for x in range(n) for y in range(n) if above[x] >> y & 1):
            continue
        opens = [m for m in range(1 << n) if all(m & above[x] == above[x] for x in range(n) if m >> x & 1)]
        spaces.append(_space_from_open_masks(points, opens))
    return spaces


def _space_from_open_masks(points: tuple[str, ...], masks: Iterable[int]) -> FiniteSpace:
    universe = Universe.of(points)
    opens = sorted(_from_masks(points, masks), key=universe.set_key)
    return FiniteSpace(points, tuple(opens), tuple(u for u in opens if u))


def enumerate_topologies(n: int, method: str = "preorder", budget: Optional[int] = None) -> list[FiniteSpace]:
    """All labeled topologies on points "0".."n-1", in a fixed order.

    ``preorder`` walks specialisation preorders; ``subbase`` closes every
    family of nonempty subsets and deduplicates (only practical for n <= 3).
    """
    points = tuple(str(i) for i in range(n))
    limit = resolve_budget(budget)
    if method == "preorder":
        if 1 << (n * (n - 1)) > limit:
            raise BoundExceeded("topology enumeration", limit, 1 << (n * (n - 1)))
        spaces = _preorder_topologies(points)
    elif method == "subbase":
        candidates = list(range(1, 1 << n))
        if 1 << len(candidates) > limit:
            raise BoundExceeded("topology enumeration", limit, 1 << len(candidates))
        seen: dict[tuple[int, ...], FiniteSpace] = {}
        for bits in range(1 << len(candidates)):
            masks = [c for k, c in enumerate(candidates) if bits >> k & 1]
            closed = tuple(_closure(points, masks))
            if closed not in seen:
                seen[closed] = _space_from_open_masks(points, closed)
        spaces = list(seen.values())
    else:
        raise DomainError(f"unknown enumeration method {method!r}")
    return sorted(spaces, key=lambda s: [s.key(u) for u in s.opens])


# -- payoffs -----------------------------------------------------------------


@dataclass(frozen=True)
class _SpacePayoff(PayoffPredicate):
    space: FiniteSpace

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.space.points)


@dataclass(frozen=True)
class CoverPayoff(_SpacePayoff):
    """Selected open sets (named atoms) cover the space."""

    kind: ClassVar[str] = "cover"

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.space.basis_universe.ids)

    def _holds(self, s: AtomSet) -> bool:
        return frozenset().union(*[self.space.open_by_name[a] for a in s]) == self.space.everything


@dataclass(frozen=True)
class OmegaCoverPayoff(_SpacePayoff):
    """Every set of at most k points lies inside one selected open set."""

    kind: ClassVar[str] = "omega_cover"
    k: Optional[int] = None

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.space.basis_universe.ids)

    def _holds(self, s: AtomSet) -> bool:
        return is_omega_cover(self.space, [self.space.open_by_name[a] for a in s], self.k)


@dataclass(frozen=True)
class DensePayoff(_SpacePayoff):
    kind: ClassVar[str] = "dense"

    def _holds(self, s: AtomSet) -> bool:
        return all(b & s for b in self.space.basis)


@dataclass(frozen=True)
class FanPayoff(_SpacePayoff):
    """The selected points meet every basic neighbourhood of ``point``."""

    kind: ClassVar[str] = "fan_at_point"
    point: str = ""

    def _holds(self, s: AtomSet) -> bool:
        return all(u & s for u in self.space.neighbourhoods(self.point))


@dataclass(frozen=True)
class ConvergingFanPayoff(_SpacePayoff):
    """Y minus every neighbourhood of ``point`` is finite: always true on a finite space."""

    kind: ClassVar[str] = "converging_fan_at_point"
    point: str = ""

    def _holds(self, s: AtomSet) -> bool:
        return True


SPACE_PAYOFFS: dict[str, type[_SpacePayoff]] = {
    cls.kind: cls for cls in (CoverPayoff, OmegaCoverPayoff, DensePayoff, FanPayoff, ConvergingFanPayoff)
}


def is_omega_cover(space: FiniteSpace, opens: Sequence[AtomSet], k: Optional[int] = None) -> bool:
    limit = len(space.points) if k is None else min(k, len(space.points))
    for size in range(1, limit + 1):
        for f in itertools.combinations(space.points, size):
            if not any(set(f) <= u for u in opens):
                return False
    return True


def as_extensional(payoff: PayoffPredicate, universe: Universe, budget: Optional[int] = None) -> ExtensionalPayoff:
    """Tabulate a payoff over every subset of the universe."""
    limit = resolve_budget(budget)
    if 1 << len(universe) > limit:
        raise BoundExceeded("payoff tabulation", limit, 1 << len(universe))
    winning = frozenset(
        universe.unmask(m) for m in range(1 << len(universe)) if payoff.evaluate(universe.unmask(m)) != payoff.negated
    )
    return ExtensionalPayoff(winning, frozenset(universe.ids), negated=payoff.negated)


# -- selection sets -----------------------------------------------------------


@dataclass(frozen=True)
class SelectionSet:
    kind: str
    family: Family
    atoms: dict[str, str]
    warnings: tuple[str, ...] = ()


def _subsets(items: Sequence[Any], budget: int, what: str) -> Iterable[tuple[Any, ...]]:
    if 1 << len(items) > budget:
        raise BoundExceeded(what, budget, 1 << len(items))
    for size in range(1, len(items) + 1):
        yield from itertools.combinations(items, size)


def _minimal_only(members: list[AtomSet]) -> list[AtomSet]:
    return [m for m in members if not any(o < m for o in members)]


def gen_selection_set(
    space: FiniteSpace,
    kind: str,
    point: Optional[str] = None,
    finite_set: Optional[Iterable[object]] = None,
    k: Optional[int] = None,
    minimal: bool = False,
    include_empty_F: bool = False,
    budget: Optional[int] = None,
) -> SelectionSet:
    """Build one of the selection sets of a finite space as a Family."""
    if kind not in KINDS:
        raise DomainError(f"unknown selection set {kind!r}; expected one of {KINDS}")
    limit = resolve_budget(budget)
    warnings: list[str] = []
    cover_type = kind in COVER_KINDS
    universe = space.basis_universe if cover_type else space.point_universe
    names = {b: space.name(b) for b in space.basis}
    members: list[AtomSet]

    def as_names(opens: Iterable[AtomSet]) -> AtomSet:
        return frozenset(names[u] for u in opens)

    if kind == "T_X":
        members = list(space.basis)
    elif kind == "T_X_x":
        members = space.neighbourhoods(_need_point(space, point))
    elif kind == "T_X_F":
        f = atom_set(finite_set or ())
        if not f and not include_empty_F:
            raise DomainError("T_X_F needs a nonempty finite set (or include_empty_F)")
        for x in f:
            space.require_point(x)
        members = [b for b in space.basis if f <= b]
    elif kind == "O_X":
        members = [frozenset(c) for c in _subsets(space.basis, limit, kind) if frozenset().union(*c) == space.everything]
        members = [as_names(c) for c in (_minimal_only(members) if minimal else members)]
    elif kind == "Omega_X":
        members = [frozenset(c) for c in _subsets(space.basis, limit, kind) if is_omega_cover(space, c, k)]
        members = [as_names(c) for c in (_minimal_only(members) if minimal else members)]
    elif kind == "P_X":
        members = [as_names(space.neighbourhoods(x)) for x in space.points]
    elif kind == "F_X":
        bound = len(space.points) if k is None else min(k, len(space.points))
        sets = [frozenset(c) for size in range(0 if include_empty_F else 1, bound + 1) for c in itertools.combinations(space.points, size)]
        members = []
        for f in sets:
            local = as_names(b for b in space.basis if f <= b)
            if not local:
                warnings.append(f"no basic open contains {space.name(f)}; its local base is dropped")
            else:
                members.append(local)
    elif kind == "D_X":
        members = [frozenset(c) for c in _subsets(space.points, limit, kind) if all(b & set(c) for b in space.basis)]
    elif kind == "Omega_X_x":
        nbhds = space.neighbourhoods(_need_point(space, point))
        members = [frozenset(c) for c in _subsets(space.points, limit, kind) if all(u & set(c) for u in nbhds)]
    else:
        _need_point(space, point)
        members = [frozenset(c) for c in _subsets(space.points, limit, kind)]
        warnings.append("converging fans are every subset on a finite space; the game is degenerate")

    deduped: list[AtomSet] = []
    for m in members:
        if m in deduped:
            warnings.append(f"duplicate member {sorted(m)} dropped")
        else:
            deduped.append(m)
    if not deduped:
        raise DomainError(f"{kind} is empty for this space and basis")
    for w in warnings:
        logger.warning("%s: %s", kind, w)
    atoms = {a.id: a.meaning or a.id for a in universe.atoms}
    return SelectionSet(kind, Family(tuple(deduped), universe), atoms, tuple(warnings))


def _need_point(space: FiniteSpace, point: Optional[str]) -> str:
    if point is None:
        raise DomainError("this selection set needs a point parameter")
    return space.require_point(point)


# -- named games --------------------------------------------------------------

# name -> (family kind, payoff kind, needs point)
PRIMAL_GAMES: dict[str, tuple[str, str, bool]] = {
    "rothberger": ("O_X", "cover", False),
    "omega_rothberger": ("Omega_X", "omega_cover", False),
    "selective_separability": ("D_X", "dense", False),
    "fan_tightness": ("D_X", "fan_at_point", True),
    "strong_fan_tightness": ("Omega_X_x", "fan_at_point", True),
    "converging_fan_game": ("Omega_X_x", "converging_fan_at_point", True),
}

# dual name -> (primal name, reflection kind)
DUAL_GAMES: dict[str, tuple[str, str]] = {
    "point_open": ("rothberger", "P_X"),
    "omega_finite_open": ("omega_rothberger", "F_X"),
    "point_picking": ("selective_separability", "T_X"),
    "closure_game": ("fan_tightness", "T_X"),
    "gruenhage_W": ("converging_fan_game", "T_X_x"),
    "gruenhage_W_cluster": ("strong_fan_tightness", "T_X_x"),
}

GAME_NAMES = tuple(PRIMAL_GAMES) + tuple(DUAL_GAMES)


def _space_payoff(space: FiniteSpace, kind: str, point: Optional[str], k: Optional[int]) -> PayoffPredicate:
    if kind == "omega_cover":
        return OmegaCoverPayoff(space=space, k=k)
    if kind in ("fan_at_point", "converging_fan_at_point"):
        return SPACE_PAYOFFS[kind](space=space, point=_need_point(space, point))  # type: ignore[call-arg]
    return SPACE_PAYOFFS[kind](space=space)


def named_game(
    space: FiniteSpace,
    name: str,
    horizon: int,
    point: Optional[str] = None,
    k: Optional[int] = None,
    minimal: bool = False,
    budget: Optional[int] = None,
) -> Union[GameInstance, DualityContext]:
    """A primal game, or for dual names the context whose ``dual`` is the named game.

    ``minimal`` only applies to primal games; a reflection needs the full
    cover family.
    """
    if k is None:
        k = get_settings().omega_k
    if name in PRIMAL_GAMES:
        family_kind, payoff_kind, _ = PRIMAL_GAMES[name]
        selection = gen_selection_set(space, family_kind, point=point, k=k, minimal=minimal, budget=budget)
        payoff = _space_payoff(space, payoff_kind, point, k)
        return GameInstance(selection.family.universe, selection.family, payoff, horizon)
    if name in DUAL_GAMES:
        primal_name, reflection_kind = DUAL_GAMES[name]
        primal = named_game(space, primal_name, horizon, point=point, k=k, budget=budget)
        primal = cast(GameInstance, primal)
        R = gen_selection_set(space, reflection_kind, point=point, k=k, budget=budget).family
        return make_context(primal, R, budget)
    raise DomainError(f"unknown game {name!r}; expected one of {GAME_NAMES}")


def playable(space: FiniteSpace, name: str, horizon: int, **kwargs: Any) -> GameInstance:
    """The named game itself, whether it is a primal or a dual one."""
    game = named_game(space, name, horizon, **kwargs)
    return game.dual if isinstance(game, DualityContext) else game


@dataclass(frozen=True)
class BasisInvarianceReport:
    game: str
    default_verdicts: dict[str, bool]
    alternative_verdicts: dict[str, bool]

    @property
    def identical(self) -> bool:
        return self.default_verdicts == self.alternative_verdicts


def basis_invariance_check(
    space: FiniteSpace,
    alt_basis: Iterable[Iterable[object]],
    name: str,
    horizon: int,
    point: Optional[str] = None,
    minimal: bool = False,
    budget: Optional[int] = None,
) -> BasisInvarianceReport:
    """Solve the named game over the space's basis and over ``alt_basis``."""
    alternative = with_basis(space, alt_basis)
    verdicts = []
    for s in (space, alternative):
        g = playable(s, name, horizon, point=point, minimal=minimal, budget=budget)
        verdicts.append({r: solve(g, r, budget, witness=False).holds for r in RELATIONS})
    report = BasisInvarianceReport(name, verdicts[0], verdicts[1])
    if not report.identical:
        logger.error("basis changed the verdicts of %s: %s", name, report)
    return report
