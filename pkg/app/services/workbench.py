"""
JSON-ready results for every workbench command.

The CLI and the HTTP routes both call these; they take domain values and
return plain dicts built from the wire models.
"""

from pathlib import Path
from typing import Any, Optional, Union

from app.models.schemas import (
    FamilyModel,
    InstanceModel,
    ReflectionReportModel,
    SolveReportModel,
    SpaceModel,
    StrategyModel,
)
from app.services.core import Family, GameInstance
from app.services.corpus import CorpusCaps, run_corpus
from app.services.duality import verify_context, verify_duality
from app.services.reflection import dualize, is_reflection
from app.services.solver import implication_chain, solve, verify_strategy
from app.services.spaces import (
    DUAL_GAMES,
    KINDS,
    FiniteSpace,
    basis_invariance_check,
    enumerate_topologies,
    gen_selection_set,
    minimal_basis,
    named_game,
)
from app.services.strategies import Strategy
from app.services.translate import DualityContext, make_context, translate


def solve_result(g: GameInstance, relation: str, budget: Optional[int] = None, **kwargs: Any) -> dict[str, Any]:
    report = solve(g, relation, budget, **kwargs)
    result = SolveReportModel.from_domain(report).model_dump()
    if report.witness_skipped:
        result["witness_skipped"] = True
    return result


def chain_result(g: GameInstance, budget: Optional[int] = None) -> dict[str, Any]:
    report = implication_chain(g, budget)
    return {"verdicts": report.verdicts, "violations": report.violations, "consistent": report.consistent, "nodes": report.nodes_explored}


def reflect_result(g: GameInstance, R: Family, strict: bool = True, budget: Optional[int] = None) -> dict[str, Any]:
    report = is_reflection(R, g.family, strict=strict, budget=budget)
    result = ReflectionReportModel.from_domain(report).model_dump()
    result["subset_ok"] = report.subset_ok
    result["coinitial_ok"] = report.coinitial_ok
    return result


def dualize_result(g: GameInstance, R: Family) -> dict[str, Any]:
    return InstanceModel.from_domain(dualize(g, R)).model_dump()


def translate_result(
    g: GameInstance,
    R: Family,
    theorem: str,
    direction: str,
    s: Strategy,
    budget: Optional[int] = None,
    allow_unchecked: bool = False,
    check: bool = False,
) -> dict[str, Any]:
    ctx = make_context(g, R, budget)
    result = translate(ctx, theorem, direction, s, budget, allow_unchecked=allow_unchecked)
    out: dict[str, Any] = {
        "theorem": result.theorem,
        "direction": result.direction,
        "target": result.target,
        "strategy": StrategyModel.from_domain(result.strategy).to_json_dict(),
        "provenance": list(result.provenance),
        "fillers": [list(f) for f in result.fillers],
    }
    if check:
        verdict = verify_strategy(ctx.side(result.target), result.strategy, budget)
        out["wins"] = verdict.ok
    return out


def duality_result(
    g: GameInstance, R: Family, budget: Optional[int] = None, soundness: bool = False
) -> dict[str, Any]:
    return verify_duality(g, R, budget, soundness=soundness).to_dict()


def named_duality_result(
    space: FiniteSpace,
    game: str,
    horizon: int,
    point: Optional[str] = None,
    k: Optional[int] = None,
    budget: Optional[int] = None,
    soundness: bool = False,
) -> dict[str, Any]:
    ctx = named_game(space, game, horizon, point=point, k=k, budget=budget)
    if not isinstance(ctx, DualityContext):
        dual_names = [d for d, (p, _) in DUAL_GAMES.items() if p == game]
        ctx = named_game(space, dual_names[0], horizon, point=point, k=k, budget=budget)
    assert isinstance(ctx, DualityContext)
    return verify_context(ctx, budget, soundness=soundness).to_dict()


def gen_result(
    space: FiniteSpace,
    game: Optional[str] = None,
    kind: Optional[str] = None,
    horizon: int = 1,
    point: Optional[str] = None,
    finite_set: Optional[list[str]] = None,
    k: Optional[int] = None,
    minimal: bool = False,
    include_empty_F: bool = False,
    budget: Optional[int] = None,
) -> dict[str, Any]:
    """A named game (primal instance, or primal + reflection + dual) or a bare selection set."""
    if game is not None:
        built: Union[GameInstance, DualityContext] = named_game(space, game, horizon, point=point, k=k, minimal=minimal, budget=budget)
        if isinstance(built, DualityContext):
            return {
                "primal": InstanceModel.from_domain(built.primal).model_dump(),
                "reflection": FamilyModel(family=built.reflection_family.to_lists()).model_dump(exclude_none=True),
                "dual": InstanceModel.from_domain(built.dual).model_dump(),
            }
        return {"instance": InstanceModel.from_domain(built).model_dump()}
    selection = gen_selection_set(
        space, kind or KINDS[0], point=point, finite_set=finite_set, k=k, minimal=minimal,
        include_empty_F=include_empty_F, budget=budget,
    )
    return {
        "kind": selection.kind,
        "universe": list(selection.family.universe.ids),
        "atoms": selection.atoms,
        "family": selection.family.to_lists(),
        "warnings": list(selection.warnings),
    }


def corpus_result(
    seed: int,
    count: int,
    caps: CorpusCaps = CorpusCaps(),
    reflection_filter: bool = True,
    budget: Optional[int] = None,
    out_dir: Optional[Path] = None,
    workers: int = 1,
) -> dict[str, Any]:
    return run_corpus(seed, count, caps, reflection_filter, budget, out_dir, workers).to_dict()


def topologies_result(n: int, method: str = "preorder", budget: Optional[int] = None) -> dict[str, Any]:
    spaces = enumerate_topologies(n, method, budget)
    return {"points": n, "method": method, "count": len(spaces), "spaces": [SpaceModel.from_domain(s).model_dump() for s in spaces]}


def basis_check_result(
    space: FiniteSpace,
    game: str,
    horizon: int,
    alt_basis: Optional[list[list[str]]] = None,
    point: Optional[str] = None,
    minimal: bool = False,
    budget: Optional[int] = None,
) -> dict[str, Any]:
    basis = alt_basis if alt_basis is not None else [sorted(b) for b in minimal_basis(space)]
    report = basis_invariance_check(space, basis, game, horizon, point=point, minimal=minimal, budget=budget)
    return {
        "game": report.game,
        "default": report.default_verdicts,
        "alternative": report.alternative_verdicts,
        "identical": report.identical,
    }
