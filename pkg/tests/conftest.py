import json
import sys
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).parent.parent))

from app.config import Settings, get_settings
from app.main import app
from app.services.core import ExtensionalPayoff, Family, GameInstance, Universe, atom_set
from app.services.spaces import discrete_space, named_game, sierpinski_space
from app.services.translate import DualityContext


def build_game(universe, family, winning, horizon, negated=False):
    u = Universe.of(universe)
    payoff = ExtensionalPayoff(frozenset(atom_set(s) for s in winning), frozenset(u.ids), negated=negated)
    return GameInstance(u, Family.build(u, family), payoff, horizon)


@pytest.fixture
def make_game():
    return build_game


@pytest.fixture
def fix_a():
    """U={1,2}, A={{1},{1,2}}, B={{1}}, one round."""
    return build_game(["1", "2"], [["1"], ["1", "2"]], [["1"]], 1)


@pytest.fixture
def fix_a_json():
    return {
        "universe": ["1", "2"],
        "family": [["1"], ["1", "2"]],
        "payoff": {"kind": "extensional", "sets": [["1"]]},
        "horizon": 1,
    }


@pytest.fixture
def reflection_one(fix_a):
    return Family.build(fix_a.universe, [["1"]])


@pytest.fixture
def reflection_pair(fix_a):
    return Family.build(fix_a.universe, [["1", "2"]])


@pytest.fixture
def fix_b():
    """Rothberger game on the discrete 2-point space, horizon given by the caller."""

    def build(horizon):
        return named_game(discrete_space(2), "rothberger", horizon)

    return build


@pytest.fixture
def point_open():
    def build(horizon) -> DualityContext:
        ctx = named_game(discrete_space(2), "point_open", horizon)
        assert isinstance(ctx, DualityContext)
        return ctx

    return build


@pytest.fixture
def sierpinski():
    return sierpinski_space()


@pytest.fixture
def test_client():
    return TestClient(app)


@pytest.fixture
def mock_settings():
    return Settings(app_name="Test Workbench", environment="testing", node_budget=5000)


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
