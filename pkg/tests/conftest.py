import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from vadwindow import _kernels  # noqa: E402

# the backend fixture is meant to hold for every generated example
settings.register_profile("default", suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("default")


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    """Run a test once per kernel flavour."""
    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_kernels, "USE_NUMBA", request.param == "numba")
    return request.param
