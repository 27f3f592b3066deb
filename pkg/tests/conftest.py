import json
import pathlib

import numpy as np
import pytest

from irsnoma.system import derive_stats, default_config

DATA = pathlib.Path(__file__).parent / "data"
ROOT = pathlib.Path(__file__).resolve().parent.parent
RECIPES = ROOT / "recipes"


def load_json(name):
    return json.loads((DATA / name).read_text())


def db(x):
    return 10.0 ** (x / 10.0)


def ks_distance(samples, cdf):
    """Two-sided Kolmogorov distance between a sample and a CDF callable."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


@pytest.fixture
def base():
    """Default three-user scenario with one single-element group."""
    return default_config()


@pytest.fixture
def base_stats(base):
    return derive_stats(base)
