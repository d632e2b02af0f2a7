import json

import pytest

from app.services.corpus import CorpusCaps, draw_pair, run_corpus, run_entry
from app.services.reflection import is_reflection
from app.utils.codec import dumps


def test_empty_corpus():
    summary = run_corpus(seed=42, count=0).to_dict()
    assert summary["entries"] == []
    assert summary["duality_pass"] == 0
    assert summary["files"] == []


def test_draws_are_reflections_within_caps():
    caps = CorpusCaps()
    for i in range(30):
        g, R, _ = draw_pair(7, i, caps)
        assert len(g.universe) <= caps.universe_size
        assert len(g.family) <= caps.family_size and len(R) <= caps.family_size
        assert all(len(m) <= caps.member_size for m in (*g.family, *R))
        assert 1 <= g.horizon <= caps.horizon
        assert is_reflection(R, g.family).is_reflection


def test_draw_is_deterministic():
    a = draw_pair(3, 5, CorpusCaps())
    b = draw_pair(3, 5, CorpusCaps())
    assert a[0].family == b[0].family
    assert a[1] == b[1]
    assert a[0].payoff == b[0].payoff


def test_small_corpus_passes(tmp_path):
    summary = run_corpus(seed=1, count=25, out_dir=tmp_path).to_dict()
    assert summary["reflections"] == 25
    assert summary["duality_pass"] == 25
    assert summary["soundness_fail"] == 0
    assert summary["chain_fail"] == 0
    assert summary["files"] == []


def test_falsifier_mode_records_negatives(tmp_path):
    summary = run_corpus(seed=11, count=40, reflection_filter=False, out_dir=tmp_path).to_dict()
    assert summary["reflections"] < 40
    written = [tmp_path.joinpath(*p.split("/")[-2:]) for p in summary["files"]]
    for path in written:
        doc = json.loads(path.read_text())
        assert set(doc) == {"instance", "reflection", "report"}
        assert not doc["report"]["reflection"]["is_reflection"]


def test_entry_reports_nodes():
    entry = run_entry(seed=2, index=0, caps=CorpusCaps(horizon=1))
    assert entry.is_reflection
    assert entry.passed
    assert entry.nodes > 0


@pytest.mark.slow
def test_seeded_corpus_acceptance():
    summary = run_corpus(seed=42, count=200)
    doc = summary.to_dict()
    assert doc["reflections"] == 200
    assert doc["duality_pass"] == 200
    assert doc["soundness_fail"] == 0
    assert doc["chain_fail"] == 0
    assert doc["skipped"] == 0
    assert dumps(doc) == dumps(run_corpus(seed=42, count=200).to_dict())


@pytest.mark.slow
def test_parallel_corpus_matches_serial():
    serial = run_corpus(seed=5, count=12).to_dict()
    parallel = run_corpus(seed=5, count=12, workers=2).to_dict()
    assert dumps(serial) == dumps(parallel)
