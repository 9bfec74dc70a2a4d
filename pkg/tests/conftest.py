import json
import os

import numpy as np
import pytest

from polygreen.geometry import cage_from_json

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")

# acceptance tests record one line per criterion here; echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def load_fixture_cage(name):
    with open(fixture_path(name)) as f:
        return cage_from_json(json.load(f))


@pytest.fixture
def square_cage():
    return load_fixture_cage("square.json")


@pytest.fixture
def quad_cage():
    return load_fixture_cage("quad.json")


@pytest.fixture
def blob_cage():
    return load_fixture_cage("blob.json")


@pytest.fixture
def blob_bent_cage():
    return load_fixture_cage("blob_bent.json")


def interior_points(cage, n, seed=0, margin_frac=0.05):
    """Random points strictly inside a cage, away from the boundary."""
    from polygreen.deformer import filter_interior

    rng = np.random.default_rng(seed)
    lo, hi = cage.bounding_box()
    margin = margin_frac * cage.diameter()
    pts = []
    while len(pts) < n:
        cand = rng.uniform(lo, hi, size=(4 * n, 2))
        keep, _ = filter_interior(cage, cand, margin=margin)
        pts.extend(cand[keep].tolist())
    return np.asarray(pts[:n])
