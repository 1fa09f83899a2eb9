import os
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return Path(os.environ.get("REGPIPE_FIXTURES_DIR", Path(__file__).resolve().parents[2] / "fixtures"))


@pytest.fixture(scope="session")
def read(fixtures):
    return lambda name: (fixtures / name).read_text()
