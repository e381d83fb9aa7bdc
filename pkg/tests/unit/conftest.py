"""Fixtures."""


from pathlib import Path
from typing import Callable

import pytest

from noisynet.cli import DEMOS_DIR
from noisynet.documents import NetworkDocument, load_document


@pytest.fixture
def demo_path() -> Callable[[str], Path]:
    """Get the path of a shipped demo by name."""

    def get(name: str) -> Path:
        return DEMOS_DIR / f"{name}.json"

    return get


@pytest.fixture
def demo_document(demo_path: Callable[[str], Path]) -> Callable[[str], NetworkDocument]:
    """Load a shipped demo by name."""

    def get(name: str) -> NetworkDocument:
        return load_document(demo_path(name))

    return get
