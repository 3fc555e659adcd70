import pytest
from hypothesis import HealthCheck, settings

from spheremono import Potential

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=25
)
settings.load_profile("default")

PENDULUM = Potential.from_generic(1.0)
PERTURBED = Potential.from_generic(-1.0, -2.0)
LASER = Potential.from_generic(1.0, 2.0)
TWO_COLOR = Potential.from_generic(1.2, -0.2, -1.1)
COS = Potential((1.0,))

EXAMPLES = {"pendulum": PENDULUM, "perturbed": PERTURBED, "laser": LASER, "two_color": TWO_COLOR}


@pytest.fixture(params=sorted(EXAMPLES))
def example(request):
    return EXAMPLES[request.param]
