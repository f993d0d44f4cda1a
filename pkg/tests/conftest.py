import os
import sys

import pytest
from hypothesis import HealthCheck, settings

SCRIPTS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "scripts")
sys.path.insert(0, SCRIPTS_DIR)

from coefficients import Scalar  # noqa: E402
from quiver_hall import HallAlgebra  # noqa: E402

settings.register_profile(
    "workbench",
    derandomize=True,
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("workbench")


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch, tmp_path):
    """Keep a developer's .env or cache directory out of the tests."""
    for name in ("HALL_CACHE_DIR", "WORKBENCH_CONFIG", "WORKBENCH_PROFILE", "WORKBENCH_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("settings.PROJECT_ROOT", str(tmp_path))


@pytest.fixture(scope="session")
def hall2():
    return HallAlgebra(2)


@pytest.fixture(scope="session")
def hall3():
    return HallAlgebra(3)


@pytest.fixture
def v():
    def power(k, q=2):
        return Scalar.v_power(q, k)
    return power
