"""Shared fixtures, the hypothesis profile and the acceptance summary hook."""

from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def u3000():
    from unimodal.exact_counts import default_cache

    return default_cache.u(3002).values


@pytest.fixture(scope="session")
def p2_3000():
    from unimodal.exact_counts import default_cache

    return default_cache.p2(3002).values


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
