import shutil
from pathlib import Path

import pytest

from declog.workspace import Workspace

REPO_WS = Path(__file__).resolve().parent.parent / "workspace"


@pytest.fixture(scope="session")
def ws() -> Workspace:
    """Read-only view of the shipped fixture workspace."""
    return Workspace(REPO_WS)


@pytest.fixture()
def tmp_ws(tmp_path) -> Workspace:
    """Mutable copy for service/session tests."""
    dst = tmp_path / "ws"
    shutil.copytree(REPO_WS, dst)
    return Workspace(dst)
