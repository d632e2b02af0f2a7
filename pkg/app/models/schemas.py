"""
pydantic models for every JSON document the workbench reads or writes.

Each model converts to and from the frozen domain values in ``app.services``.
"""

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from app.exceptions import DomainError
from app.services.core import ExtensionalPayoff, Family, GameInstance, PayoffPredicate, Universe, atom_set
from app.services.reflection import ReflectionReport
from app.services.solver import SolveReport
from app.services.spaces import (
    SPACE_PAYOFFS,
    FiniteSpace,
    minimal_basis,
    topology_from_subbase,
    with_basis,
)
from app.services.strategies import (
    FullStrategyI,
    FullStrategyII,
    MarkovStrategyII,
    PredeterminedStrategyI,
    Strategy,
)

PayoffKind = Literal["extensional", "cover", "omega_cover", "dense", "fan_at_point", "converging_fan_at_point"]


class SpaceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: list[str]
    subbase: list[list[str]] = Field(default_factory=list)
    basis: Union[Literal["all", "minimal"], list[list[str]]] = "all"

    def to_domain(self) -> FiniteSpace:
        space = topology_from_subbase(self.points, self.subbase)
        if self.basis == "minimal":
            return with_basis(space, minimal_basis(space))
        if isinstance(self.basis, list):
            return with_basis(space, self.basis)
        return space

    @classmethod
    def from_domain(cls, space: FiniteSpace) -> "SpaceModel":
        def listed(s: frozenset[str]) -> list[str]:
            return list(space.point_universe.ordered(s))

        subbase = space.subbase or tuple(u for u in space.opens if u)
        default = tuple(u for u in space.opens if u)
        basis: Union[str, list[list[str]]] = "all" if space.basis == default else [listed(b) for b in space.basis]
        return cls(points=list(space.points), subbase=[listed(s) for s in subbase], basis=basis)


class PayoffModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: PayoffKind
    negated: bool = False
    sets: Optional[list[list[str]]] = None
    space: Optional[SpaceModel] = None
    point: Optional[str] = None
    k: Optional[int] = None

    @model_validator(mode="after")
    def check_parameters(self) -> "PayoffModel":
        if self.kind == "extensional":
            if self.sets is None:
                raise ValueError("extensional payoffs need 'sets'")
        elif self.space is None:
            raise ValueError(f"{self.kind} payoffs need 'space'")
        if self.kind in ("fan_at_point", "converging_fan_at_point") and self.point is None:
            raise ValueError(f"{self.kind} payoffs need 'point'")
        return self

    def to_domain(self, universe: Universe) -> PayoffPredicate:
        if self.kind == "extensional":
            sets = frozenset(atom_set(s) for s in self.sets or [])
            return ExtensionalPayoff(sets, frozenset(universe.ids), negated=self.negated)
        assert self.space is not None
        space = self.space.to_domain()
        params: dict[str, Any] = {"space": space, "negated": self.negated}
        if self.kind == "omega_cover":
            params["k"] = self.k
        if self.point is not None and self.kind in ("fan_at_point", "converging_fan_at_point"):
            params["point"] = space.require_point(self.point)
        return SPACE_PAYOFFS[self.kind](**params)

    @classmethod
    def from_domain(cls, payoff: PayoffPredicate, universe: Universe) -> "PayoffModel":
        if isinstance(payoff, ExtensionalPayoff):
            sets = sorted((list(universe.ordered(s)) for s in payoff.sets), key=lambda s: universe.set_key(s))
            return cls(kind="extensional", negated=payoff.negated, sets=sets)
        space = getattr(payoff, "space")
        return cls(
            kind=payoff.kind,  # type: ignore[arg-type]
            negated=payoff.negated,
            space=SpaceModel.from_domain(space),
            point=getattr(payoff, "point", None),
            k=getattr(payoff, "k", None),
        )


class InstanceModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    universe: list[str]
    family: list[list[str]]
    payoff: PayoffModel
    horizon: int

    def to_domain(self) -> GameInstance:
        universe = Universe.of(self.universe)
        family = Family.build(universe, self.family)
        return GameInstance(universe, family, self.payoff.to_domain(universe), self.horizon)

    @classmethod
    def from_domain(cls, g: GameInstance) -> "InstanceModel":
        return cls(
            universe=list(g.universe.ids),
            family=g.family.to_lists(),
            payoff=PayoffModel.from_domain(g.payoff, g.universe),
            horizon=g.horizon,
        )


class FamilyModel(BaseModel):
    """A reflection family file: {"family": [[...], ...]} (universe optional)."""

    model_config = ConfigDict(extra="forbid")

    family: list[list[str]]
    universe: Optional[list[str]] = None

    def to_domain(self, universe: Universe) -> Family:
        if self.universe is not None and set(self.universe) != set(universe.ids):
            raise DomainError("reflection family declares a different universe")
        return Family.build(universe, self.family)


class StrategyModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    player: Literal["I", "II"]
    strategy_class: Literal["full", "predetermined", "markov"] = Field(alias="class")
    horizon: int
    table: Union[list[int], dict[str, Union[int, str]]]

    @field_validator("table")
    @classmethod
    def check_entries(cls, table: Union[list[int], dict[str, Union[int, str]]], info: ValidationInfo) -> Any:
        if isinstance(table, list):
            return table
        # I answers with member indices, II with atoms
        wanted, label = (int, "a member index") if info.data.get("player") == "I" else (str, "an atom string")
        for key, value in table.items():
            if isinstance(value, bool) or not isinstance(value, wanted):
                raise ValueError(f"entry {key!r} must be {label}, got {value!r}")
        return table

    @model_validator(mode="after")
    def check_shape(self) -> "StrategyModel":
        pairs = {("I", "full"), ("I", "predetermined"), ("II", "full"), ("II", "markov")}
        if (self.player, self.strategy_class) not in pairs:
            raise ValueError(f"no {self.strategy_class} strategy class for player {self.player}")
        if (self.strategy_class == "predetermined") != isinstance(self.table, list):
            raise ValueError("predetermined tables are lists; other tables are objects")
        if isinstance(self.table, list) and len(self.table) != self.horizon:
            raise ValueError(f"predetermined table has {len(self.table)} moves for horizon {self.horizon}")
        return self

    def to_domain(self) -> Strategy:
        table = self.table
        if isinstance(table, list):
            return PredeterminedStrategyI(tuple(int(a) for a in table))
        if self.player == "I":
            return FullStrategyI({_split_atoms(k): int(v) for k, v in table.items()}, self.horizon)
        if self.strategy_class == "full":
            return FullStrategyII({_split_indices(k): str(v) for k, v in table.items()}, self.horizon)
        return MarkovStrategyII({_split_cell(k): str(v) for k, v in table.items()}, self.horizon)

    @classmethod
    def from_domain(cls, s: Strategy) -> "StrategyModel":
        table: Union[list[int], dict[str, Union[int, str]]]
        if isinstance(s, PredeterminedStrategyI):
            table = list(s.moves)
        elif isinstance(s, FullStrategyI):
            table = {_join_atoms(h): a for h, a in s.table.items()}
        elif isinstance(s, FullStrategyII):
            table = {"/".join(str(i) for i in h): b for h, b in s.table.items()}
        else:
            table = {f"{j},{n}": b for (j, n), b in s.table.items()}
        return cls(player=s.player, strategy_class=s.kind, horizon=s.horizon, table=table)  # type: ignore[arg-type]

    def to_json_dict(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True)


def _join_atoms(history: tuple[str, ...]) -> str:
    if any("/" in a for a in history):
        raise DomainError("atoms containing '/' cannot be used as full-I history keys")
    return "/".join(history)


def _split_atoms(key: str) -> tuple[str, ...]:
    return tuple(key.split("/")) if key else ()


def _split_indices(key: str) -> tuple[int, ...]:
    try:
        return tuple(int(i) for i in key.split("/"))
    except ValueError:
        raise DomainError(f"bad full-II history key {key!r}") from None


def _split_cell(key: str) -> tuple[int, int]:
    try:
        j, n = key.split(",")
        return int(j), int(n)
    except ValueError:
        raise DomainError(f"bad Markov key {key!r}; expected 'index,round'") from None


class SolveReportModel(BaseModel):
    relation: str
    holds: bool
    witness: Optional[dict[str, Any]] = None
    nodes: int
    bound_hit: bool = False

    @classmethod
    def from_domain(cls, report: SolveReport) -> "SolveReportModel":
        witness = StrategyModel.from_domain(report.witness).to_json_dict() if report.witness is not None else None
        return cls(
            relation=report.relation,
            holds=report.holds,
            witness=witness,
            nodes=report.nodes_explored,
            bound_hit=report.bound_hit,
        )


class ReflectionReportModel(BaseModel):
    is_reflection: bool
    failed_condition: Optional[Literal["subset", "coinitial"]] = None
    witness: Optional[dict[str, Any]] = None

    @classmethod
    def from_domain(cls, report: ReflectionReport) -> "ReflectionReportModel":
        return cls(
            is_reflection=report.is_reflection,
            failed_condition=report.failed_condition,  # type: ignore[arg-type]
            witness=report.witness or None,
        )


class RunManifest(BaseModel):
    command: str
    input_digests: dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    budget: int
    tool_version: str
