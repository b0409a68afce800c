"""Shared fixtures: sessions on the bundled models."""

from typing import Callable

import pytest

from prplab.session import LabSession


@pytest.fixture
def load() -> Callable[[str], LabSession]:
    """Factory returning a loaded session for a bundled model name."""

    def _load(name: str) -> LabSession:
        return LabSession(name).load()

    return _load


@pytest.fixture
def bin_lab(load) -> LabSession:
    return load("BIN")


@pytest.fixture
def drift_lab(load) -> LabSession:
    return load("BIN-DRIFT")


@pytest.fixture
def tri_lab(load) -> LabSession:
    return load("TRI")


@pytest.fixture
def coin_lab(load) -> LabSession:
    return load("COIN2")


@pytest.fixture
def tau_lab(load) -> LabSession:
    return load("TAU")


@pytest.fixture
def prod_lab(load) -> LabSession:
    return load("PROD2")
