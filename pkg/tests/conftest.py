from __future__ import annotations

from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "demos" / "data"


@pytest.fixture(scope="session")
def line_insert_session() -> Path:
    return DATA_DIR / "line_insert_session"


@pytest.fixture(scope="session")
def refactor_session() -> Path:
    return DATA_DIR / "refactor_session"


@pytest.fixture(scope="session")
def all_session_dirs(line_insert_session, refactor_session) -> list[Path]:
    return [line_insert_session, refactor_session]
