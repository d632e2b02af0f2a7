from app.models.schemas import (
    FamilyModel,
    InstanceModel,
    PayoffModel,
    ReflectionReportModel,
    RunManifest,
    SolveReportModel,
    SpaceModel,
    StrategyModel,
)

__all__ = [
    "FamilyModel",
    "InstanceModel",
    "PayoffModel",
    "ReflectionReportModel",
    "RunManifest",
    "SolveReportModel",
    "SpaceModel",
    "StrategyModel",
]
