"""
Duality checks between a game G(A, B) and its dual G(R, not-B).

``verify_duality`` solves all four relations on both games and compares
them pairwise; ``translation_soundness`` pushes every winning witness through
the matching translation and replays the result in the other game.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from app.exceptions import IllegalStrategyError, ReflectionViolation
from app.services.core import Family, GameInstance
from app.services.reflection import ReflectionReport
from app.services.solver import RELATIONS, SolveReport, solve_all, verify_strategy
from app.services.translate import WITNESS_ROUTES, DualityContext, make_context, translate

logger = logging.getLogger(__name__)

# (primal relation, dual relation) pairs that must agree
EQUIVALENCES: tuple[tuple[str, str], ...] = (
    ("I_pre", "II_markov"),
    ("II_markov", "I_pre"),
    ("I_full", "II_full"),
    ("II_full", "I_full"),
)


@dataclass(frozen=True)
class EquivalenceCheck:
    primal_relation: str
    dual_relation: str
    primal_holds: bool
    dual_holds: bool

    @property
    def holds(self) -> bool:
        return self.primal_holds == self.dual_holds

    def to_dict(self) -> dict[str, Any]:
        return {
            "primal": self.primal_relation,
            "dual": self.dual_relation,
            "primal_holds": self.primal_holds,
            "dual_holds": self.dual_holds,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class SoundnessCheck:
    """One winning witness carried across by a translation and replayed."""

    side: str
    relation: str
    theorem: str
    direction: str
    target_relation: str
    ok: bool
    error: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "side": self.side,
            "relation": self.relation,
            "translation": f"{self.theorem} {self.direction}",
            "target_relation": self.target_relation,
            "ok": self.ok,
            "error": self.error,
        }


@dataclass(frozen=True)
class DualityReport:
    reflection: ReflectionReport
    primal: dict[str, SolveReport]
    dual: dict[str, SolveReport]
    equivalences: tuple[EquivalenceCheck, ...]
    soundness: tuple[SoundnessCheck, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return all(e.holds for e in self.equivalences)

    @property
    def sound(self) -> bool:
        return all(s.ok for s in self.soundness)

    @property
    def nodes_explored(self) -> int:
        return sum(r.nodes_explored for r in (*self.primal.values(), *self.dual.values()))

    def to_dict(self) -> dict[str, Any]:
        return {
            "reflection": self.reflection.to_dict(),
            "primal": {r: self.primal[r].holds for r in RELATIONS},
            "dual": {r: self.dual[r].holds for r in RELATIONS},
            "equivalences": [e.to_dict() for e in self.equivalences],
            "soundness": [s.to_dict() for s in self.soundness],
            "holds": self.holds,
            "nodes": self.nodes_explored,
        }


def _braces(atoms: Any) -> str:
    return "{" + ",".join(atoms) + "}"


def reflection_failure(report: ReflectionReport) -> ReflectionViolation:
    """The error raised when a duality check is asked of a non-reflection."""
    condition = report.failed_condition or "unknown"
    w = report.witness
    if condition == "subset":
        message = f"witness range {_braces(w.get('range', []))}"
    elif condition == "coinitial":
        message = (
            f"witness member {_braces(w.get('member', []))} misses "
            f"reflection member {_braces(w.get('disjoint_reflection_member', []))}"
        )
    else:
        message = "the families are not a reflection"
    return ReflectionViolation(condition, message, w)


def compare(primal: dict[str, SolveReport], dual: dict[str, SolveReport]) -> tuple[EquivalenceCheck, ...]:
    return tuple(EquivalenceCheck(p, d, primal[p].holds, dual[d].holds) for p, d in EQUIVALENCES)


def translation_soundness(
    ctx: DualityContext,
    primal_reports: dict[str, SolveReport],
    dual_reports: dict[str, SolveReport],
    budget: Optional[int] = None,
) -> list[SoundnessCheck]:
    checks = []
    for side, reports in (("primal", primal_reports), ("dual", dual_reports)):
        for relation in RELATIONS:
            report = reports[relation]
            if not report.holds or report.witness is None:
                continue
            theorem, direction, target_relation = WITNESS_ROUTES[(side, relation)]
            target = ctx.dual if side == "primal" else ctx.primal
            try:
                result = translate(
                    ctx, theorem, direction, report.witness, budget, allow_unchecked=not ctx.reflection_checked
                )
                verdict = verify_strategy(target, result.strategy, budget)
                check = SoundnessCheck(side, relation, theorem, direction, target_relation, verdict.ok)
            except (ReflectionViolation, IllegalStrategyError) as e:
                check = SoundnessCheck(side, relation, theorem, direction, target_relation, False, str(e))
            if not check.ok:
                logger.warning("translation %s %s of %s %s witness is unsound: %s", theorem, direction, side, relation, check.error)
            checks.append(check)
    return checks


def verify_duality(
    primal: GameInstance,
    R: Family,
    budget: Optional[int] = None,
    *,
    require_reflection: bool = True,
    soundness: bool = False,
    **solve_kwargs: Any,
) -> DualityReport:
    """Solve G(A, B) and G(R, not-B) and compare the four paired relations.

    The reflection check runs first; with ``require_reflection`` a failure
    raises ReflectionViolation before anything is solved.
    """
    ctx = make_context(primal, R, budget)
    reflection = ctx.reflection
    assert reflection is not None
    if require_reflection and not reflection.is_reflection:
        raise reflection_failure(reflection)

    primal_reports = solve_all(ctx.primal, budget, witness=soundness, **solve_kwargs)
    dual_reports = solve_all(ctx.dual, budget, witness=soundness, **solve_kwargs)
    equivalences = compare(primal_reports, dual_reports)
    checks = translation_soundness(ctx, primal_reports, dual_reports, budget) if soundness else []

    report = DualityReport(reflection, primal_reports, dual_reports, equivalences, tuple(checks))
    if not report.holds:
        level = logging.ERROR if reflection.is_reflection else logging.INFO
        failed = [f"{e.primal_relation}~{e.dual_relation}" for e in equivalences if not e.holds]
        logger.log(level, "duality failed for %s", ", ".join(failed))
    return report


def verify_context(ctx: DualityContext, budget: Optional[int] = None, *, soundness: bool = False) -> DualityReport:
    """Same as ``verify_duality`` for an already built context (named dual games)."""
    reflection = ctx.reflection
    assert reflection is not None
    if not reflection.is_reflection:
        raise reflection_failure(reflection)
    primal_reports = solve_all(ctx.primal, budget, witness=soundness)
    dual_reports = solve_all(ctx.dual, budget, witness=soundness)
    checks = translation_soundness(ctx, primal_reports, dual_reports, budget) if soundness else []
    return DualityReport(reflection, primal_reports, dual_reports, compare(primal_reports, dual_reports), tuple(checks))
