"""
Seeded random corpus of (A, R, B, N) instances for duality regression runs.

Entries are independent: entry ``i`` draws from ``random.Random`` seeded by
(seed, i) so a process pool can run them in any order while the summary
stays ordered by index and byte-identical across reruns.

With the reflection filter on, R is drawn first and A is built from the
choice-function ranges of R plus random supersets of them, which is a
reflection by construction. Draws whose ranges exceed the caps are
discarded and counted. With the filter off, A and R are drawn
independently and duality failures are kept as expected negatives.
"""

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from app.exceptions import BoundExceeded, ReflectionViolation
from app.models.schemas import FamilyModel, InstanceModel
from app.services.core import AtomSet, ExtensionalPayoff, Family, GameInstance, Universe
from app.services.duality import verify_duality
from app.services.reflection import choice_ranges
from app.services.solver import RELATIONS, check_chain
from app.utils.codec import write_json

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 200


@dataclass(frozen=True)
class CorpusCaps:
    universe_size: int = 5
    family_size: int = 4
    member_size: int = 3
    horizon: int = 3


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    discarded: int
    is_reflection: bool
    failed_condition: Optional[str] = None
    duality_holds: Optional[bool] = None
    sound: Optional[bool] = None
    chain_violations: tuple[str, ...] = ()
    witnesses_translated: int = 0
    nodes: int = 0
    error: Optional[str] = None
    file: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.duality_holds) and bool(self.sound) and not self.chain_violations and self.error is None


@dataclass
class CorpusSummary:
    seed: int
    count: int
    caps: CorpusCaps
    reflection_filter: bool
    entries: list[CorpusEntry] = field(default_factory=list)

    def _tally(self, pred: Any) -> int:
        return sum(1 for e in self.entries if pred(e))

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "count": self.count,
            "caps": asdict(self.caps),
            "reflection_filter": self.reflection_filter,
            "discarded_draws": sum(e.discarded for e in self.entries),
            "reflections": self._tally(lambda e: e.is_reflection),
            "duality_pass": self._tally(lambda e: e.duality_holds is True),
            "duality_fail": self._tally(lambda e: e.duality_holds is False),
            "soundness_fail": self._tally(lambda e: e.sound is False),
            "chain_fail": self._tally(lambda e: bool(e.chain_violations)),
            "skipped": self._tally(lambda e: e.error is not None),
            "witnesses_translated": sum(e.witnesses_translated for e in self.entries),
            "files": [e.file for e in self.entries if e.file],
            "entries": [
                {
                    "index": e.index,
                    "is_reflection": e.is_reflection,
                    "failed_condition": e.failed_condition,
                    "duality_holds": e.duality_holds,
                    "sound": e.sound,
                    "chain_violations": list(e.chain_violations),
                    "nodes": e.nodes,
                    "error": e.error,
                }
                for e in self.entries
            ],
        }


def entry_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + index)


def _random_member(rng: random.Random, atoms: tuple[str, ...], caps: CorpusCaps) -> AtomSet:
    size = rng.randint(1, min(caps.member_size, len(atoms)))
    return frozenset(rng.sample(atoms, size))


def _random_family(rng: random.Random, universe: Universe, caps: CorpusCaps) -> Family:
    members: list[AtomSet] = []
    for _ in range(rng.randint(1, caps.family_size)):
        m = _random_member(rng, universe.ids, caps)
        if m not in members:
            members.append(m)
    return Family(tuple(members), universe)


def _random_payoff(rng: random.Random, universe: Universe) -> ExtensionalPayoff:
    ids = universe.ids
    subsets = (frozenset(c) for r in range(len(ids) + 1) for c in itertools.combinations(ids, r))
    return ExtensionalPayoff(frozenset(s for s in subsets if rng.random() < 0.5), frozenset(ids))


def _reflected_family(rng: random.Random, R: Family, caps: CorpusCaps) -> Optional[Family]:
    ranges = list(choice_ranges(R))
    if len(ranges) > caps.family_size or any(len(r) > caps.member_size for r in ranges):
        return None
    members = list(ranges)
    for _ in range(caps.family_size - len(members)):
        base = rng.choice(ranges)
        extra = [a for a in R.universe.ids if a not in base]
        if not extra or len(base) >= caps.member_size or rng.random() < 0.5:
            continue
        grown = base | {rng.choice(extra)}
        if grown not in members:
            members.append(grown)
    return Family(tuple(members), R.universe)


def draw_pair(seed: int, index: int, caps: CorpusCaps, reflection_filter: bool = True) -> tuple[GameInstance, Family, int]:
    """The primal game and reflection family of entry ``index`` plus the number of discarded draws."""
    rng = entry_rng(seed, index)
    for attempt in range(MAX_ATTEMPTS):
        universe = Universe.of(str(i) for i in range(1, rng.randint(2, caps.universe_size) + 1))
        R = _random_family(rng, universe, caps)
        A = _reflected_family(rng, R, caps) if reflection_filter else _random_family(rng, universe, caps)
        if A is None:
            continue
        g = GameInstance(universe, A, _random_payoff(rng, universe), rng.randint(1, caps.horizon))
        return g, R, attempt
    raise BoundExceeded(f"corpus entry {index} draw", MAX_ATTEMPTS, MAX_ATTEMPTS)


def _write_case(out_dir: Path, folder: str, index: int, g: GameInstance, R: Family, report: dict[str, Any]) -> str:
    path = out_dir / folder / f"entry-{index:05d}.json"
    write_json(
        path,
        {
            "instance": InstanceModel.from_domain(g).model_dump(),
            "reflection": FamilyModel(family=R.to_lists()).model_dump(exclude_none=True),
            "report": report,
        },
    )
    return path.as_posix()


def run_entry(
    seed: int,
    index: int,
    caps: CorpusCaps,
    reflection_filter: bool = True,
    budget: Optional[int] = None,
    out_dir: Optional[Path] = None,
) -> CorpusEntry:
    g, R, discarded = draw_pair(seed, index, caps, reflection_filter)
    try:
        report = verify_duality(g, R, budget, require_reflection=reflection_filter, soundness=True)
    except (BoundExceeded, ReflectionViolation) as e:
        logger.warning("corpus entry %d skipped: %s", index, e)
        return CorpusEntry(index, discarded, False, getattr(e, "condition", None), error=str(e))

    reflection = report.reflection
    violations = [f"primal: {v}" for v in check_chain({r: report.primal[r].holds for r in RELATIONS})]
    violations += [f"dual: {v}" for v in check_chain({r: report.dual[r].holds for r in RELATIONS})]
    entry = CorpusEntry(
        index,
        discarded,
        reflection.is_reflection,
        reflection.failed_condition,
        report.holds,
        report.sound,
        tuple(violations),
        len(report.soundness),
        report.nodes_explored,
    )
    if out_dir is not None and not entry.passed:
        folder = "counterexamples" if reflection.is_reflection else "negatives"
        path = _write_case(Path(out_dir), folder, index, g, R, report.to_dict())
        entry = CorpusEntry(**{**asdict(entry), "file": path})
        if reflection.is_reflection:
            logger.error("corpus entry %d failed; written to %s", index, path)
    return entry


def _run_entry_args(args: tuple[int, int, CorpusCaps, bool, Optional[int], Optional[Path]]) -> CorpusEntry:
    return run_entry(*args)


def run_corpus(
    seed: int,
    count: int,
    caps: CorpusCaps = CorpusCaps(),
    reflection_filter: bool = True,
    budget: Optional[int] = None,
    out_dir: Optional[Path] = None,
    workers: int = 1,
) -> CorpusSummary:
    summary = CorpusSummary(seed, count, caps, reflection_filter)
    jobs = [(seed, i, caps, reflection_filter, budget, out_dir) for i in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summary.entries = list(pool.map(_run_entry_args, jobs))
    else:
        for job in jobs:
            summary.entries.append(_run_entry_args(job))
            if (job[1] + 1) % 50 == 0:
                logger.info("corpus: %d/%d entries done", job[1] + 1, count)
    logger.info("corpus seed=%d: %d entries, %d files", seed, count, sum(1 for e in summary.entries if e.file))
    return summary
