"""Shared fixtures: reference schedules and both sweep backends."""

import pytest

from fatgraph import schedule
from fatgraph.kernels import available_backends, get_backend


@pytest.fixture(scope="session")
def ref():
    """Reference configuration: p = 1/2, one (3, 3) stage."""
    return schedule.validate("1/2", [(3, 3)])


@pytest.fixture(scope="session")
def ref2():
    """Two-stage configuration: p = 1/2, stages (3,3), (3,3)."""
    return schedule.validate("1/2", [(3, 3), (3, 3)])


@pytest.fixture(scope="session")
def ref910():
    """Skewed configuration: p = 9/10, one (3, 3) stage."""
    return schedule.validate("9/10", [(3, 3)])


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    return get_backend(request.param)
