from __future__ import annotations

import pytest

from helpers import FIXTURES
from pagealign.bundle import DocumentBundle, load_bundle


@pytest.fixture(scope="session")
def pair1_old() -> DocumentBundle:
    return load_bundle(FIXTURES / "pair1_old")


@pytest.fixture(scope="session")
def pair1_new() -> DocumentBundle:
    return load_bundle(FIXTURES / "pair1_new")


@pytest.fixture(scope="session")
def selfcmp90() -> DocumentBundle:
    return load_bundle(FIXTURES / "selfcmp90")
