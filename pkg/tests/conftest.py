import os
import sys
import zlib

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from semiring_qmm.core import ExtMatrix  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def rand_ext(rng, n, allow, lo=-5, hi=5, p_inf=0.15):
    """Random ExtMatrix; ``allow`` lists the infinite tags that may appear."""
    vals = rng.integers(lo, hi + 1, size=(n, n))
    tags = np.zeros((n, n), dtype=np.int8)
    if allow:
        hit = rng.random((n, n)) < p_inf
        tags[hit] = rng.choice(allow, size=int(hit.sum()))
    return ExtMatrix(vals, tags)


@pytest.fixture
def rng(request):
    return np.random.default_rng(zlib.crc32(request.node.nodeid.encode()))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
