import pytest
from hypothesis import HealthCheck, settings

from swarmshape.backend import get_backend, has_compiled

settings.register_profile(
    "swarmshape",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("swarmshape")

BACKENDS = ["python"] + (["compiled"] if has_compiled() else [])


@pytest.fixture(params=BACKENDS)
def backend_name(request):
    return request.param


@pytest.fixture
def backend(backend_name):
    return get_backend(backend_name)
