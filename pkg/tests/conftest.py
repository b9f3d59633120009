import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reference_data import fixture_codes  # noqa: E402

from arcforge.diagram import realize_dt  # noqa: E402


@pytest.fixture(scope="session")
def codes():
    return fixture_codes()


@pytest.fixture(scope="session")
def diagrams(codes):
    return {name: realize_dt(code) for name, code in codes.items()}
