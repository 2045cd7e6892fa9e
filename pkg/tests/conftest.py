import functools
import sys

import pytest

from gapfield.geometry import SpherePair
from gapfield.singular import image_setup


@functools.lru_cache(maxsize=None)
def cached_setup(r1, r2, eps):
    pair = SpherePair(r1, r2, eps)
    return (pair, *image_setup(pair))


@pytest.fixture
def setup():
    """Callable returning (pair, sys1, sys2, constants), cached across tests."""
    return cached_setup


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
