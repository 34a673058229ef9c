import json
from pathlib import Path

import pytest

from probgram import World, build_cube_world

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def cube() -> World:
    return build_cube_world()


@pytest.fixture(scope="session")
def calibration() -> dict:
    with open(FIXTURES / "calibration.json", encoding="utf-8") as fh:
        return json.load(fh)
