import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    override = os.environ.get("SOLNAV_FIXTURES")
    if override:
        return Path(override)
    return Path(__file__).parent / "fixtures"
