#!/usr/bin/env python3
"""
Command-line front end for the selection game workbench.

Every command prints one JSON document on stdout (or a plain table with
--pretty) holding a run manifest and the result. Logging goes to stderr.

Exit codes: 0 success / verdict holds, 1 verdict fails, 2 error or budget.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import uvicorn

from app import __version__
from app.config import get_settings
from app.exceptions import DomainError, WorkbenchError
from app.models.schemas import FamilyModel, InstanceModel, RunManifest, SpaceModel, StrategyModel
from app.services import workbench
from app.services.core import Family, GameInstance
from app.services.corpus import CorpusCaps
from app.services.solver import RELATIONS
from app.services.spaces import GAME_NAMES, KINDS, FiniteSpace
from app.services.translate import DIRECTIONS, THEOREMS
from app.utils.codec import dumps, parse_model, read_json, write_json

logger = logging.getLogger("app.cli")


class Run:
    """Per-invocation state: resolved flags and the digests of every input read."""

    def __init__(self, args: argparse.Namespace):
        settings = get_settings()
        self.args = args
        self.budget: int = args.budget if args.budget is not None else settings.node_budget
        self.seed: int = args.seed if args.seed is not None else settings.seed
        self.out: Optional[Path] = Path(args.out) if args.out else None
        self.digests: dict[str, str] = {}

    def _read(self, label: str, path: str) -> Any:
        data, digest = read_json(Path(path))
        self.digests[label] = digest
        return data

    def instance(self, path: str) -> GameInstance:
        return parse_model(InstanceModel, self._read("instance", path), path).to_domain()

    def reflection(self, path: str, g: GameInstance) -> Family:
        return parse_model(FamilyModel, self._read("reflection", path), path).to_domain(g.universe)

    def strategy(self, path: str) -> Any:
        return parse_model(StrategyModel, self._read("strategy", path), path).to_domain()

    def space(self, path: str) -> FiniteSpace:
        return parse_model(SpaceModel, self._read("space", path), path).to_domain()

    def manifest(self) -> RunManifest:
        seed = self.seed if self.args.command == "corpus" else None
        return RunManifest(
            command=self.args.command, input_digests=dict(sorted(self.digests.items())),
            seed=seed, budget=self.budget, tool_version=__version__,
        )


# -- commands -----------------------------------------------------------------
# Each returns (result, exit code).


def cmd_gen(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    if a.game is None and a.kind is None:
        raise DomainError("gen needs --game or --kind")
    result = workbench.gen_result(
        run.space(a.space), game=a.game, kind=a.kind, horizon=a.horizon, point=a.point, finite_set=a.finite_set,
        k=a.k, minimal=a.minimal, include_empty_F=a.include_empty_F, budget=run.budget,
    )
    return result, 0


def cmd_solve(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    result = workbench.solve_result(
        run.instance(a.instance), a.relation, run.budget,
        witness=not a.no_witness, use_cache=not a.no_cache, markov_search=a.markov_search,
    )
    return result, 0 if result["holds"] else 1


def cmd_chain_check(run: Run) -> tuple[dict[str, Any], int]:
    result = workbench.chain_result(run.instance(run.args.instance), run.budget)
    return result, 0 if result["consistent"] else 1


def cmd_reflect(run: Run) -> tuple[dict[str, Any], int]:
    g = run.instance(run.args.instance)
    result = workbench.reflect_result(g, run.reflection(run.args.reflection, g), not run.args.lenient, run.budget)
    return result, 0 if result["is_reflection"] else 1


def cmd_dualize(run: Run) -> tuple[dict[str, Any], int]:
    g = run.instance(run.args.instance)
    return workbench.dualize_result(g, run.reflection(run.args.reflection, g)), 0


def cmd_translate(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    g = run.instance(a.instance)
    result = workbench.translate_result(
        g, run.reflection(a.reflection, g), a.theorem, a.direction, run.strategy(a.strategy),
        run.budget, allow_unchecked=a.allow_unchecked, check=a.check,
    )
    return result, 0 if result.get("wins", True) else 1


def cmd_verify_duality(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    if a.space is not None:
        if a.game is None:
            raise DomainError("verify-duality with --space needs --game")
        result = workbench.named_duality_result(
            run.space(a.space), a.game, a.horizon, point=a.point, k=a.k, budget=run.budget, soundness=a.soundness
        )
    else:
        if a.instance is None or a.reflection is None:
            raise DomainError("verify-duality needs INSTANCE and REFLECTION files, or --space and --game")
        g = run.instance(a.instance)
        result = workbench.duality_result(g, run.reflection(a.reflection, g), run.budget, soundness=a.soundness)
    ok = result["holds"] and all(s["ok"] for s in result["soundness"])
    return result, 0 if ok else 1


def cmd_corpus(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    caps = CorpusCaps(a.max_universe, a.max_family, a.max_member, a.max_horizon)
    workers = a.workers if a.workers is not None else get_settings().corpus_workers
    out = run.out or Path(get_settings().out_dir)
    result = workbench.corpus_result(run.seed, a.count, caps, not a.no_reflection_filter, run.budget, out, workers)
    failed = result["duality_fail"] + result["soundness_fail"] + result["chain_fail"]
    return result, 1 if failed and not a.no_reflection_filter else 0


def cmd_topologies(run: Run) -> tuple[dict[str, Any], int]:
    return workbench.topologies_result(run.args.points, run.args.method, run.budget), 0


def cmd_serve(run: Run) -> tuple[dict[str, Any], int]:
    """Run the HTTP API in the foreground until interrupted."""
    a = run.args
    level = (a.log_level or get_settings().log_level).lower()
    uvicorn.run("app.main:app", host=a.host, port=a.port, reload=a.reload, log_level=level)
    return {"served": f"http://{a.host}:{a.port}"}, 0


def cmd_basis_check(run: Run) -> tuple[dict[str, Any], int]:
    a = run.args
    alt = None
    if a.basis is not None:
        alt = parse_model(SpaceModel, run._read("basis", a.basis), a.basis).basis
        if not isinstance(alt, list):
            raise DomainError("--basis file must list the alternative basis explicitly")
    result = workbench.basis_check_result(
        run.space(a.space), a.game, a.horizon, alt_basis=alt, point=a.point, minimal=a.minimal, budget=run.budget
    )
    return result, 0 if result["identical"] else 1


COMMANDS: dict[str, Callable[[Run], tuple[dict[str, Any], int]]] = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "reflect": cmd_reflect,
    "dualize": cmd_dualize,
    "translate": cmd_translate,
    "verify-duality": cmd_verify_duality,
    "corpus": cmd_corpus,
    "chain-check": cmd_chain_check,
    "topologies": cmd_topologies,
    "basis-check": cmd_basis_check,
    "serve": cmd_serve,
}


# -- output -------------------------------------------------------------------


def render_table(doc: dict[str, Any]) -> str:
    """Flatten nested dicts into aligned ``key  value`` lines."""
    rows: list[tuple[str, str]] = []

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict) and value:
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
            for i, v in enumerate(value):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append((prefix, dumps(value).strip().replace("\n", " ")))

    walk("", doc)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app", description="Finite selection game workbench")
    parser.add_argument("--budget", type=int, default=None, help="Explored-node budget (default from settings)")
    parser.add_argument("--seed", type=int, default=None, help="Seed for random corpus generation")
    parser.add_argument("--out", default=None, help="Directory for output and counterexample files")
    parser.add_argument("--pretty", action="store_true", help="Print a plain-text table instead of JSON")
    parser.add_argument("--log-level", default=None, help="Override the configured log level")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # gen
    gen = subparsers.add_parser("gen", help="Generate a named game or a selection set from a finite space")
    gen.add_argument("space", help="Space JSON file")
    gen.add_argument("--game", choices=GAME_NAMES, help="Named game to build")
    gen.add_argument("--kind", choices=KINDS, help="Selection set to build instead of a game")
    gen.add_argument("--horizon", type=int, default=1, help="Number of rounds")
    gen.add_argument("--point", help="Point parameter x")
    gen.add_argument("--finite-set", nargs="*", help="Finite set F for T_X_F")
    gen.add_argument("--k", type=int, default=None, help="Largest finite set for omega-covers")
    gen.add_argument("--minimal", action="store_true", help="Keep only subset-minimal covers")
    gen.add_argument("--include-empty-F", dest="include_empty_F", action="store_true", help="Admit F = {} for T_X_F and F_X")

    # solve
    solve = subparsers.add_parser("solve", help="Decide one win relation")
    solve.add_argument("instance", help="Instance JSON file")
    solve.add_argument("--relation", required=True, choices=RELATIONS)
    solve.add_argument("--no-witness", action="store_true", help="Report the verdict only")
    solve.add_argument("--no-cache", action="store_true", help="Disable the backward-induction memo table")
    solve.add_argument("--markov-search", choices=("transversal", "exhaustive"), default=None)

    # chain-check
    chain = subparsers.add_parser("chain-check", help="Solve all four relations and check the implication chain")
    chain.add_argument("instance", help="Instance JSON file")

    # reflect
    reflect = subparsers.add_parser("reflect", help="Check whether a family reflects the instance family")
    reflect.add_argument("instance", help="Instance JSON file")
    reflect.add_argument("reflection", help="Reflection family JSON file")
    reflect.add_argument("--lenient", action="store_true", help="Check the coinitial condition only")

    # dualize
    dualize = subparsers.add_parser("dualize", help="Build G(R, not B) from G(A, B)")
    dualize.add_argument("instance", help="Instance JSON file")
    dualize.add_argument("reflection", help="Reflection family JSON file")

    # translate
    translate = subparsers.add_parser("translate", help="Carry a strategy across to the dual game or back")
    translate.add_argument("instance", help="Primal instance JSON file")
    translate.add_argument("reflection", help="Reflection family JSON file")
    translate.add_argument("strategy", help="Strategy JSON file")
    translate.add_argument("--theorem", required=True, choices=THEOREMS)
    translate.add_argument("--direction", required=True, choices=DIRECTIONS)
    translate.add_argument("--allow-unchecked", action="store_true", help="Translate even if R is not a reflection")
    translate.add_argument("--check", action="store_true", help="Verify the translated strategy wins")

    # verify-duality
    duality = subparsers.add_parser("verify-duality", help="Check the four duality equivalences")
    duality.add_argument("instance", nargs="?", help="Primal instance JSON file")
    duality.add_argument("reflection", nargs="?", help="Reflection family JSON file")
    duality.add_argument("--space", help="Space JSON file (use a named game instead of files)")
    duality.add_argument("--game", choices=GAME_NAMES)
    duality.add_argument("--horizon", type=int, default=1)
    duality.add_argument("--point")
    duality.add_argument("--k", type=int, default=None)
    duality.add_argument("--soundness", action="store_true", help="Also translate and replay every winning witness")

    # corpus
    corpus = subparsers.add_parser("corpus", help="Run duality checks on a seeded random corpus")
    corpus.add_argument("--count", type=int, default=200)
    corpus.add_argument("--max-universe", type=int, default=5)
    corpus.add_argument("--max-family", type=int, default=4)
    corpus.add_argument("--max-member", type=int, default=3)
    corpus.add_argument("--max-horizon", type=int, default=3)
    corpus.add_argument("--no-reflection-filter", action="store_true", help="Falsifier mode: draw A and R independently")
    corpus.add_argument("--workers", type=int, default=None, help="Worker processes")

    # topologies
    topologies = subparsers.add_parser("topologies", help="List every labeled topology on n points")
    topologies.add_argument("points", type=int)
    topologies.add_argument("--method", choices=("preorder", "subbase"), default="preorder")

    # basis-check
    basis = subparsers.add_parser("basis-check", help="Compare verdicts of a named game over two bases")
    basis.add_argument("space", help="Space JSON file")
    basis.add_argument("--game", required=True, choices=GAME_NAMES)
    basis.add_argument("--horizon", type=int, default=1)
    basis.add_argument("--basis", help="Space JSON file whose explicit basis is the alternative (default: minimal basis)")
    basis.add_argument("--point")
    basis.add_argument("--minimal", action="store_true")

    # serve
    serve = subparsers.add_parser("serve", help="Serve the HTTP API with uvicorn (same as: uvicorn app.main:app)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--reload", action="store_true", help="Restart on code changes")

    return parser


def configure_logging(level: Optional[str]) -> None:
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    configure_logging(args.log_level)
    run = Run(args)
    try:
        result, code = COMMANDS[args.command](run)
    except WorkbenchError as e:
        logger.error("%s failed: %s", args.command, e)
        doc = {"manifest": run.manifest().model_dump(), "error": e.to_dict()}
        print(render_table(doc) if args.pretty else dumps(doc), end="")
        return 2

    doc = {"manifest": run.manifest().model_dump(), "result": result}
    if run.out is not None:
        write_json(run.out / f"{args.command}.json", doc)
    print(render_table(doc) if args.pretty else dumps(doc), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
