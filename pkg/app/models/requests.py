from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from app.models.schemas import FamilyModel, InstanceModel, SpaceModel, StrategyModel

Relation = Literal["I_full", "I_pre", "II_full", "II_markov"]


class BudgetedRequest(BaseModel):
    budget: Optional[int] = Field(default=None, ge=1, description="Explored-node budget; settings default if omitted")


class SolveRequest(BudgetedRequest):
    instance: InstanceModel
    relation: Relation
    witness: bool = True
    use_cache: bool = True
    markov_search: Optional[Literal["transversal", "exhaustive"]] = None


class InstanceRequest(BudgetedRequest):
    instance: InstanceModel


class ReflectRequest(BudgetedRequest):
    instance: InstanceModel
    reflection: FamilyModel
    strict: bool = True


class DualizeRequest(BaseModel):
    instance: InstanceModel
    reflection: FamilyModel


class TranslateRequest(BudgetedRequest):
    instance: InstanceModel
    reflection: FamilyModel
    strategy: StrategyModel
    theorem: Literal["t1", "t2", "t3", "t4"]
    direction: Literal["forward", "backward"]
    allow_unchecked: bool = False
    check: bool = False


class DualityRequest(BudgetedRequest):
    """Either an instance with its reflection family, or a space with a named game."""

    instance: Optional[InstanceModel] = None
    reflection: Optional[FamilyModel] = None
    space: Optional[SpaceModel] = None
    game: Optional[str] = None
    horizon: int = 1
    point: Optional[str] = None
    k: Optional[int] = None
    soundness: bool = False

    @model_validator(mode="after")
    def check_source(self) -> "DualityRequest":
        files = self.instance is not None and self.reflection is not None
        named = self.space is not None and self.game is not None
        if files == named:
            raise ValueError("give either instance and reflection, or space and game")
        return self


class GenRequest(BudgetedRequest):
    space: SpaceModel
    game: Optional[str] = None
    kind: Optional[str] = None
    horizon: int = 1
    point: Optional[str] = None
    finite_set: Optional[list[str]] = None
    k: Optional[int] = None
    minimal: bool = False
    include_empty_F: bool = False

    @model_validator(mode="after")
    def check_target(self) -> "GenRequest":
        if (self.game is None) == (self.kind is None):
            raise ValueError("give exactly one of game or kind")
        return self


class CorpusRequest(BudgetedRequest):
    seed: Optional[int] = None
    count: int = Field(default=20, ge=0, le=1000)
    max_universe: int = Field(default=5, ge=2)
    max_family: int = Field(default=4, ge=1)
    max_member: int = Field(default=3, ge=1)
    max_horizon: int = Field(default=3, ge=1)
    reflection_filter: bool = True
