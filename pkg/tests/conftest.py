import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

MODELS_DIR = Path(__file__).parent.parent / "models"


@pytest.fixture
def models_dir() -> Path:
    return MODELS_DIR
