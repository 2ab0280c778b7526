"""
Disturbance signals injected into the plant's last integrator.

--> Kinds

    constant:   {"value": float}
    step:       {"t_step": float, "amplitude": float, "base": float}
    sinusoid:   {"amplitude": float, "frequency": float (Hz), "phase": float (rad), "offset": float}
    stick_slip: {"amplitude": float, "frequency": float (Hz), "harmonics": int}
    sum:        {"terms": [ {kind: ..., ...}, ... ]}

--> Contract

    Every signal is callable as signal(t, x) so state dependent couplings
    share the plant interface. Time-only signals also expose
    derivative(t, order) and sup_derivative(order), which feed the observer
    error bounds. is_smooth is False when a derivative bound does not exist
    (step jumps, state couplings).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Stick-slip Fourier truncation
DEFAULT_HARMONICS = 8


@dataclass(frozen=True)
class ConstantDisturbance:
    value: float = 0.0

    kind = "constant"
    is_smooth = True

    def __call__(self, t, x=None):
        return self.value

    def derivative(self, t, order):
        return self.value if order == 0 else 0.0

    def sup_derivative(self, order):
        return abs(self.value) if order == 0 else 0.0

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class StepDisturbance:
    t_step: float = 0.0
    amplitude: float = 1.0
    base: float = 0.0

    kind = "step"
    is_smooth = False

    def __call__(self, t, x=None):
        return self.base + (self.amplitude if t >= self.t_step else 0.0)

    def derivative(self, t, order):
        return self(t) if order == 0 else 0.0

    def sup_derivative(self, order):
        if order == 0:
            return max(abs(self.base), abs(self.base + self.amplitude))
        return math.inf

    def to_dict(self):
        return {"kind": self.kind, "t_step": self.t_step, "amplitude": self.amplitude, "base": self.base}


@dataclass(frozen=True)
class SinusoidDisturbance:
    amplitude: float = 1.0
    frequency: float = 1.0
    phase: float = 0.0
    offset: float = 0.0

    kind = "sinusoid"
    is_smooth = True

    @property
    def omega(self):
        return 2.0 * math.pi * self.frequency

    def __call__(self, t, x=None):
        return self.derivative(t, 0)

    def derivative(self, t, order):
        value = self.amplitude * self.omega**order * math.sin(self.omega * t + self.phase + order * math.pi / 2)
        return value + self.offset if order == 0 else value

    def sup_derivative(self, order):
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


@dataclass(frozen=True)
class StickSlipDisturbance:
    """
    Band limited sawtooth, amplitude * (2/pi) * sum_k (-1)^(k+1) sin(k w t) / k.

    The truncated series keeps every derivative bounded, so the signal stays
    usable in the bound checks while still showing the slow build up and
    fast release of a stick-slip cycle.
    """

    amplitude: float = 1.0
    frequency: float = 1.0
    harmonics: int = DEFAULT_HARMONICS

    kind = "stick_slip"
    is_smooth = True

    def _terms(self):
        omega = 2.0 * math.pi * self.frequency
        scale = self.amplitude * 2.0 / math.pi
        for k in range(1, self.harmonics + 1):
            yield (-1) ** (k + 1) * scale / k, k * omega

    def __call__(self, t, x=None):
        return self.derivative(t, 0)

    def derivative(self, t, order):
        return sum(c * w**order * math.sin(w * t + order * math.pi / 2) for c, w in self._terms())

    def sup_derivative(self, order):
        return sum(abs(c) * w**order for c, w in self._terms())

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "frequency": self.frequency, "harmonics": self.harmonics}


@dataclass(frozen=True)
class SumDisturbance:
    terms: tuple = field(default_factory=tuple)

    kind = "sum"

    @property
    def is_smooth(self):
        return all(term.is_smooth for term in self.terms)

    def __call__(self, t, x=None):
        return sum(term(t, x) for term in self.terms)

    def derivative(self, t, order):
        return sum(term.derivative(t, order) for term in self.terms)

    def sup_derivative(self, order):
        # triangle inequality, not the exact sup
        return sum(term.sup_derivative(order) for term in self.terms)

    def to_dict(self):
        return {"kind": self.kind, "terms": [term.to_dict() for term in self.terms]}


@dataclass(frozen=True)
class FlexureCoupling:
    """
    State coupling (k (x_frame - x_1) + c (v_frame - x_2)) / m of a flexure
    anchored to a fixed frame. Makes a chain plant reproduce the RFC stage
    with its frame locked.
    """

    stiffness: float
    damping: float
    mass: float
    frame_position: float = 0.0

    kind = "flexure"
    is_smooth = False

    def __call__(self, t, x=None):
        return (self.stiffness * (self.frame_position - x[0]) + self.damping * (0.0 - x[1])) / self.mass

    def derivative(self, t, order):
        raise NotImplementedError("Flexure coupling depends on the plant state")

    def sup_derivative(self, order):
        return math.inf

    def to_dict(self):
        return {
            "kind": self.kind,
            "stiffness": self.stiffness,
            "damping": self.damping,
            "mass": self.mass,
            "frame_position": self.frame_position,
        }


SIGNAL_KINDS = {
    "constant": ConstantDisturbance,
    "step": StepDisturbance,
    "sinusoid": SinusoidDisturbance,
    "stick_slip": StickSlipDisturbance,
    "flexure": FlexureCoupling,
}


def disturbance_from_dict(data, path="disturbance"):
    """Build a signal from its config mapping; errors name the offending field."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigException(f"{path}.kind", "a disturbance needs a 'kind'")

    params = {key: value for key, value in data.items() if key != "kind"}
    kind = data["kind"]

    if kind == "sum":
        terms = params.get("terms", [])
        return SumDisturbance(
            terms=tuple(disturbance_from_dict(term, f"{path}.terms.{idx}") for idx, term in enumerate(terms))
        )

    if kind not in SIGNAL_KINDS:
        raise ConfigException(f"{path}.kind", f"unknown kind '{kind}', expected one of {sorted([*SIGNAL_KINDS, 'sum'])}")

    try:
        signal = SIGNAL_KINDS[kind](**params)
    except TypeError as err:
        raise ConfigException(path, f"bad parameters for '{kind}': {err}")

    if kind == "stick_slip" and (int(signal.harmonics) != signal.harmonics or signal.harmonics < 1):
        raise ConfigException(f"{path}.harmonics", "must be a positive integer")

    return signal


def derivative_bound(signal, m):
    """h1 = max over 1 <= i <= m of sup |f^(i)|."""
    if not signal.is_smooth:
        logger.warning(f"Disturbance '{signal.kind}' has no bounded derivatives; observer bounds do not apply")
        return math.inf
    return max(signal.sup_derivative(i) for i in range(1, m + 1))


def white_noise(std, count, seed):
    """Additive measurement noise, drawn once so every law sees the same realization."""
    if std <= 0:
        return np.zeros(count)
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, std, count)
