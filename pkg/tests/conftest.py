import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from cordic_core import EngineConfig  # noqa: E402
from fixnum import Q2_14, FixedWord  # noqa: E402

FIXTURES = ROOT / "fixtures"


@pytest.fixture
def config():
    return EngineConfig()


@pytest.fixture
def unit_x():
    return FixedWord.from_real(1.0, Q2_14), FixedWord.zero(Q2_14)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
