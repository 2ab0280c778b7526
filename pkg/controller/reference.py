"""
Reference signals with closed form derivatives.

--> Kinds

    constant: {"value": float}
    ramp:     {"coefficients": [a_0, a_1, ...]}          r(t) = sum a_k t^k
    sinusoid: {"amplitude": float, "frequency": float (Hz), "phase": float (rad), "offset": float}

derivatives(t, count) returns [r_1, ..., r_count] where r_i is the
(i-1)th time derivative of the reference position.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConstantReference:
    value: float = 0.0

    kind = "constant"

    def derivatives(self, t, count):
        r = np.zeros(count)
        r[0] = self.value
        return r

    def sup_derivative(self, order, horizon=None):
        return abs(self.value) if order == 0 else 0.0

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class RampReference:
    coefficients: tuple = (0.0, 1.0)

    kind = "ramp"

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            raise ConfigException("reference.coefficients", "a ramp needs at least one coefficient")

    @property
    def poly(self):
        return Polynomial(self.coefficients)

    def derivatives(self, t, count):
        poly = self.poly
        return np.array([poly.deriv(order)(t) for order in range(count)])

    def sup_derivative(self, order, horizon=None):
        """sup over [0, horizon]; unbounded without a horizon unless the derivative is constant."""
        derived = self.poly.deriv(order)
        if derived.degree() == 0:
            return abs(derived.coef[0])
        if horizon is None:
            return math.inf
        # extremes sit at the interval ends or at real critical points inside it
        critical = [r.real for r in derived.deriv().roots() if abs(r.imag) < 1e-12 and 0 <= r.real <= horizon]
        return float(max(abs(derived(c)) for c in [0.0, horizon, *critical]))

    def to_dict(self):
        return {"kind": self.kind, "coefficients": list(self.coefficients)}


@dataclass(frozen=True)
class SinusoidReference:
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    offset: float = 0.0

    kind = "sinusoid"

    @property
    def omega(self):
        return 2.0 * math.pi * self.frequency

    def derivatives(self, t, count):
        r = np.array(
            [self.amplitude * self.omega**k * math.sin(self.omega * t + self.phase + k * math.pi / 2) for k in range(count)]
        )
        r[0] += self.offset
        return r

    def sup_derivative(self, order, horizon=None):
        if order == 0:
            return abs(self.amplitude) + abs(self.offset)
        return abs(self.amplitude) * self.omega**order

    def to_dict(self):
        return {
            "kind": self.kind,
            "amplitude": self.amplitude,
            "frequency": self.frequency,
            "phase": self.phase,
            "offset": self.offset,
        }


REFERENCE_KINDS = {
    "constant": ConstantReference,
    "ramp": RampReference,
    "sinusoid": SinusoidReference,
}


def reference_from_dict(data, path="reference"):
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigException(f"{path}.kind", "a reference needs a 'kind'")

    kind = data["kind"]
    if kind not in REFERENCE_KINDS:
        raise ConfigException(f"{path}.kind", f"unknown kind '{kind}', expected one of {sorted(REFERENCE_KINDS)}")

    params = {key: value for key, value in data.items() if key != "kind"}
    try:
        return REFERENCE_KINDS[kind](**params)
    except TypeError as err:
        raise ConfigException(path, f"bad parameters for '{kind}': {err}")
