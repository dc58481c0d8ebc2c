"""Pytest fixtures for hybridtele tests."""

import math
from pathlib import Path

import numpy as np
import pytest

from hybridtele.services.qubit import Qubit
from hybridtele.services.teleport import HybridChannel, build_channel


@pytest.fixture
def config_dir(tmp_path: Path) -> Path:
    """Temporary config directory."""
    config_dir = tmp_path / ".config"
    config_dir.mkdir()
    return config_dir


@pytest.fixture
def config_file(config_dir: Path) -> Path:
    """Path to config file (may not exist yet)."""
    return config_dir / "hybridtele.conf"


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(2024)


@pytest.fixture
def plus_qubit() -> Qubit:
    """(|0> + |1>)/sqrt(2) in the single-rail basis."""
    return Qubit(math.sqrt(0.5), math.sqrt(0.5))


@pytest.fixture
def complex_qubit() -> Qubit:
    """Qubit with unequal weights and a relative phase."""
    return Qubit(math.sqrt(0.8), 1j * math.sqrt(0.2))


@pytest.fixture
def channel() -> HybridChannel:
    """Hybrid channel at beta = 0.3 with the default cutoff."""
    return build_channel(0.3)
