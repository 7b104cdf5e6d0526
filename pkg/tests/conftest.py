"""Shared fixtures: deterministic RNG helpers and optional UCI data paths."""

import os
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(os.environ.get("SHIFT_EXPLAIN_DATA_DIR", REPO_ROOT / "data"))

FETCH_HINT = (
    "place it under data/ (or set SHIFT_EXPLAIN_DATA_DIR); "
    "scripts/fetch_uci.py downloads both UCI files when network access is available"
)


def _uci_path(filename: str) -> Path:
    path = DATA_DIR / filename
    if not path.exists():
        pytest.skip(f"{filename} not found in {DATA_DIR}: {FETCH_HINT}")
    return path


@pytest.fixture
def wisconsin_path() -> Path:
    return _uci_path("breast-cancer-wisconsin.data")


@pytest.fixture
def adult_path() -> Path:
    return _uci_path("adult.data")


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)


def random_instance(seed: int, max_n: int = 8, max_d: int = 4, equal_sizes: bool = True):
    """Small random OT instance used by the brute-force oracles."""
    r = np.random.default_rng(seed)
    n = int(r.integers(2, max_n + 1))
    m = n if equal_sizes else int(r.integers(2, max_n + 1))
    d = int(r.integers(1, max_d + 1))
    X = r.normal(size=(n, d))
    Y = r.normal(size=(m, d)) + r.normal(scale=1.5, size=d)
    return X, Y
