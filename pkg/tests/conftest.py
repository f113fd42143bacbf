import numpy as np
import pytest

from rezone import PhaseState, ZoneParameters

TWO_PI = 2.0 * np.pi


@pytest.fixture
def reference_params() -> ZoneParameters:
    return ZoneParameters(a=2.0, b=1.0, p=1, mu1=1.0, mu2=0.0)


def random_states(rng: np.random.Generator, n: int, u_scale: float = 2.0):
    return [
        PhaseState(float(u), float(v))
        for u, v in zip(rng.uniform(-u_scale, u_scale, n), rng.uniform(0, TWO_PI, n))
    ]


def random_zone_params(rng: np.random.Generator) -> ZoneParameters:
    return ZoneParameters(
        a=2.0, b=1.0, p=1,
        mu1=float(rng.uniform(-3, 3)), mu2=float(rng.uniform(-3, 3)),
    )
