from __future__ import annotations

from pathlib import Path

import pytest

from inicalc.config import PROGRAMS_DIR
from inicalc.semantics.models import get_model


@pytest.fixture
def dist():
    return get_model("dist")


@pytest.fixture
def pset():
    return get_model("pset")


@pytest.fixture
def name():
    return get_model("name")


@pytest.fixture
def programs() -> Path:
    return PROGRAMS_DIR


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size corpora; deselect with -m 'not slow'")
