from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("fglab", max_examples=60, deadline=None)
settings.load_profile("fglab")

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def source_text() -> str:
    # the published derivation shipped alongside the code
    return (ROOT / "paper.md").read_text(encoding="utf-8")
