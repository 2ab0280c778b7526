import pytest

from algebra.polynomials import PoleSpec, char_poly
from harness.config import ScenarioConfig
from observer.leso import LesoConfig
from presets import ScenarioPresets


@pytest.fixture
def spec():
    return PoleSpec(((150, 2),))


@pytest.fixture
def char(spec):
    return char_poly(spec)


@pytest.fixture
def eso3():
    return LesoConfig(n=2, m=1, omega_o=1500.0, b=3.25)


@pytest.fixture
def eso4():
    return LesoConfig(n=2, m=2, omega_o=1500.0, b=3.25)


@pytest.fixture
def presets():
    return ScenarioPresets()


@pytest.fixture
def tiny(presets):
    return presets.get("tiny")


@pytest.fixture
def chain_scenario():
    """Factory for short closed loop runs on the double integrator."""

    def build(observers, disturbance=None, reference=None, dt=1e-4, duration=0.02, **extra):
        return ScenarioConfig.from_dict(
            {
                "name": "test",
                "plant": {"kind": "chain", "n": 2, "b": 3.25},
                "reference": reference or {"kind": "constant", "value": 0.0},
                "disturbance": disturbance or {"kind": "constant", "value": 0.0},
                "poles": [[150.0, 2]],
                "observers": observers,
                "dt": dt,
                "duration": duration,
                "baselines": False,
                **extra,
            }
        )

    return build
