import itertools
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mifwd.info_theory import JointPmf

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")


def pmf_from_weights(names, sizes, weights):
    table = np.asarray(weights, dtype=float).reshape(sizes)
    table = table / table.sum()
    supports = [tuple(range(n)) for n in sizes]
    return JointPmf(tuple(names), tuple(supports), table)


@st.composite
def joint_pmfs(draw, n_vars=(2, 4), support=(2, 3), zeros=True):
    """Random small joint tables; integer weights so exact zeros show up."""
    n = draw(st.integers(*n_vars))
    sizes = [draw(st.integers(*support)) for _ in range(n)]
    cells = int(np.prod(sizes))
    lo = 0 if zeros else 1
    weights = draw(st.lists(st.integers(lo, 12), min_size=cells, max_size=cells)
                   .filter(lambda w: sum(w) > 0))
    names = [f"V{i}" for i in range(n)]
    return pmf_from_weights(names, sizes, weights)


def parity():
    return JointPmf.from_mapping(
        ["X", "Y", "C"], [[-1, 1], [-1, 1], [0, 4]],
        {(x, y, (x + y) ** 2): 0.25 for x in (-1, 1) for y in (-1, 1)})


def parity_noise():
    rows = {}
    for w, x, y, z in itertools.product((0, 1), (-1, 1), (-1, 1), (0, 1)):
        rows[(w, x, y, z, (x + y) ** 2)] = 1 / 16
    return JointPmf.from_mapping(["W", "X", "Y", "Z", "C"],
                                 [[0, 1], [-1, 1], [-1, 1], [0, 1], [0, 4]], rows)


@pytest.fixture
def par():
    return parity()


@pytest.fixture
def noisy():
    return parity_noise()


# -- acceptance reporting ------------------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {line}")
