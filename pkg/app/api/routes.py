from contextlib import contextmanager
from typing import Any, Dict, Iterator

from fastapi import APIRouter, HTTPException

from app.config import get_settings
from app.exceptions import BoundExceeded, InstanceParseError, WorkbenchError
from app.models.requests import (
    CorpusRequest,
    DualityRequest,
    DualizeRequest,
    GenRequest,
    InstanceRequest,
    ReflectRequest,
    SolveRequest,
    TranslateRequest,
)
from app.services import workbench
from app.services.corpus import CorpusCaps

router = APIRouter()


@contextmanager
def service_errors() -> Iterator[None]:
    try:
        yield
    except BoundExceeded as e:
        raise HTTPException(status_code=413, detail=e.to_dict()) from e
    except InstanceParseError as e:
        raise HTTPException(status_code=422, detail=e.to_dict()) from e
    except WorkbenchError as e:
        raise HTTPException(status_code=400, detail=e.to_dict()) from e


@router.post("/solve")
def solve(req: SolveRequest) -> Dict[str, Any]:
    with service_errors():
        return workbench.solve_result(
            req.instance.to_domain(), req.relation, req.budget,
            witness=req.witness, use_cache=req.use_cache, markov_search=req.markov_search,
        )


@router.post("/chain-check")
def chain_check(req: InstanceRequest) -> Dict[str, Any]:
    with service_errors():
        return workbench.chain_result(req.instance.to_domain(), req.budget)


@router.post("/reflect")
def reflect(req: ReflectRequest) -> Dict[str, Any]:
    with service_errors():
        g = req.instance.to_domain()
        return workbench.reflect_result(g, req.reflection.to_domain(g.universe), req.strict, req.budget)


@router.post("/dualize")
def dualize(req: DualizeRequest) -> Dict[str, Any]:
    with service_errors():
        g = req.instance.to_domain()
        return workbench.dualize_result(g, req.reflection.to_domain(g.universe))


@router.post("/translate")
def translate(req: TranslateRequest) -> Dict[str, Any]:
    with service_errors():
        g = req.instance.to_domain()
        return workbench.translate_result(
            g, req.reflection.to_domain(g.universe), req.theorem, req.direction, req.strategy.to_domain(),
            req.budget, allow_unchecked=req.allow_unchecked, check=req.check,
        )


@router.post("/verify-duality")
def verify_duality(req: DualityRequest) -> Dict[str, Any]:
    with service_errors():
        if req.space is not None and req.game is not None:
            return workbench.named_duality_result(
                req.space.to_domain(), req.game, req.horizon, point=req.point, k=req.k,
                budget=req.budget, soundness=req.soundness,
            )
        assert req.instance is not None and req.reflection is not None
        g = req.instance.to_domain()
        return workbench.duality_result(g, req.reflection.to_domain(g.universe), req.budget, soundness=req.soundness)


@router.post("/gen")
def gen(req: GenRequest) -> Dict[str, Any]:
    with service_errors():
        return workbench.gen_result(
            req.space.to_domain(), game=req.game, kind=req.kind, horizon=req.horizon, point=req.point,
            finite_set=req.finite_set, k=req.k, minimal=req.minimal, include_empty_F=req.include_empty_F,
            budget=req.budget,
        )


@router.post("/corpus")
def corpus(req: CorpusRequest) -> Dict[str, Any]:
    seed = req.seed if req.seed is not None else get_settings().seed
    caps = CorpusCaps(req.max_universe, req.max_family, req.max_member, req.max_horizon)
    with service_errors():
        return workbench.corpus_result(seed, req.count, caps, req.reflection_filter, req.budget)
