"""
Scenario configuration.

--> File format (YAML)

    name: chain-sinusoid
    plant:       {kind: chain | rfc, n: 2, b: 3.25, initial_state: [...], params: {...}}
    reference:   {kind: constant, value: 0.0}
    disturbance: {kind: sinusoid, amplitude: 50.0, frequency: 10.0}
    poles:       [[150.0, 2]]          # or the shorthand  omega_c: 150.0
    observers:   [{order: 3, omega_o: 1500.0}, {order: 4, omega_o: 1500.0}]
    dt: 1.0e-4
    duration: 1.0
    ...

from_dict validates everything and raises ConfigException naming the
dotted path of the bad field. to_dict is its exact inverse.
"""

import hashlib
import logging
import os
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from algebra.polynomials import PoleSpec
from controller.reference import reference_from_dict
from observer.leso import LesoConfig
from plant.chain import DEFAULT_B, ChainPlant
from plant.disturbance import disturbance_from_dict
from plant.rfc import FrictionParams, RfcPlant
from utils.exception_handler import AdrcException, ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Scenario Default Values
DEFAULT_DT = 1.0e-4
DEFAULT_DURATION = 1.0
DEFAULT_OMEGA_C = 150.0
DEFAULT_WINDOW = 20
DEFAULT_OUTPUT_DIR = "./output"
OUTPUT_DIR_ENV = "ADRC_OUTPUT_DIR"

PLANT_KINDS = ("chain", "rfc")
MEASUREMENT_HOLDS = ("linear", "zero")
IAE_METHODS = ("left", "trapezoid")

RFC_STAGE_KEYS = ("stage_mass", "frame_mass", "stiffness", "damping", "force_gain", "frame_locked")
RFC_FRICTION_KEYS = ("coulomb", "static", "stribeck_velocity", "viscous", "dead_velocity")


def _plain(value):
    """Convert tuples and numpy scalars into YAML-safe builtins."""
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _tuple(value, path):
    if value is None:
        return ()
    if not isinstance(value, (list, tuple)):
        raise ConfigException(path, f"expected a list, got {type(value).__name__}")
    return tuple(value)


def _number(data, key, path, default, positive=False, nonnegative=False, optional=False):
    value = data.get(key, default)
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigException(f"{path}{key}", f"expected a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigException(f"{path}{key}", f"must be positive, got {value}")
    if nonnegative and value < 0:
        raise ConfigException(f"{path}{key}", f"must be nonnegative, got {value}")
    return value


def _integer(data, key, path, default, minimum=None):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigException(f"{path}{key}", f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigException(f"{path}{key}", f"must be >= {minimum}, got {value}")
    return value


def _reject_unknown(data, allowed, path):
    for key in data:
        if key not in allowed:
            raise ConfigException(f"{path}{key}", "unknown field")


@dataclass(frozen=True)
class PlantConfig:
    kind: str = "chain"
    n: int = 2
    b: float = DEFAULT_B
    initial_state: tuple = ()
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data, path="plant."):
        if not isinstance(data, dict):
            raise ConfigException(path.rstrip("."), "expected a mapping")
        _reject_unknown(data, [f.name for f in fields(cls)], path)

        kind = data.get("kind", "chain")
        if kind not in PLANT_KINDS:
            raise ConfigException(f"{path}kind", f"expected one of {PLANT_KINDS}, got '{kind}'")

        params = dict(data.get("params") or {})
        if kind == "chain" and params:
            raise ConfigException(f"{path}params", "the chain plant takes no extra parameters")
        _reject_unknown(params, RFC_STAGE_KEYS + RFC_FRICTION_KEYS, f"{path}params.")

        n = _integer(data, "n", path, 2, minimum=1)
        if kind == "rfc" and n != 2:
            raise ConfigException(f"{path}n", "the RFC stage is a second order plant")

        b = _number(data, "b", path, DEFAULT_B)
        if b == 0:
            raise ConfigException(f"{path}b", "input gain must be nonzero")

        initial_state = tuple(float(v) for v in _tuple(data.get("initial_state"), f"{path}initial_state"))
        expected = 4 if kind == "rfc" else n
        if initial_state and len(initial_state) != expected:
            raise ConfigException(f"{path}initial_state", f"expected {expected} entries, got {len(initial_state)}")

        config = cls(kind=kind, n=n, b=b, initial_state=initial_state, params=params)
        config.build()
        return config

    def to_dict(self):
        return _plain({"kind": self.kind, "n": self.n, "b": self.b, "initial_state": self.initial_state, "params": self.params})

    def build(self, disturbance=None, friction_scale=1.0):
        kwargs = {} if disturbance is None else {"disturbance": disturbance}
        state = list(self.initial_state) or None
        if self.kind == "chain":
            return ChainPlant(n=self.n, b=self.b, x=state, **kwargs)

        stage = {key: self.params[key] for key in RFC_STAGE_KEYS if key in self.params}
        friction = FrictionParams(**{key: self.params[key] for key in RFC_FRICTION_KEYS if key in self.params})
        return RfcPlant(friction=friction.scaled(friction_scale), state=state, **stage, **kwargs)

    @property
    def nominal_b(self):
        if self.kind == "chain":
            return self.b
        return self.build().b


@dataclass(frozen=True)
class ObserverSpec:
    order: int
    omega_o: float
    initial_estimates: tuple = ()
    beta: tuple = None
    b: float = None
    label: str = None

    @classmethod
    def from_dict(cls, data, path):
        if not isinstance(data, dict):
            raise ConfigException(path.rstrip("."), "expected a mapping")
        _reject_unknown(data, [f.name for f in fields(cls)], path)
        if "order" not in data or "omega_o" not in data:
            raise ConfigException(path.rstrip("."), "an observer needs 'order' and 'omega_o'")

        beta = data.get("beta")
        return cls(
            order=_integer(data, "order", path, None, minimum=2),
            omega_o=_number(data, "omega_o", path, None, positive=True),
            initial_estimates=tuple(_tuple(data.get("initial_estimates"), f"{path}initial_estimates")),
            beta=None if beta is None else tuple(_tuple(beta, f"{path}beta")),
            b=_number(data, "b", path, None, optional=True),
            label=data.get("label"),
        )

    def to_dict(self):
        return _plain(
            {
                "order": self.order,
                "omega_o": self.omega_o,
                "initial_estimates": self.initial_estimates,
                "beta": self.beta,
                "b": self.b,
                "label": self.label,
            }
        )

    @property
    def name(self):
        return self.label or f"eso{self.order}-w{self.omega_o:g}"

    def build(self, n, plant_b, path="observers"):
        if self.order <= n:
            raise ConfigException(f"{path}.order", f"observer order must exceed the plant order {n}, got {self.order}")
        try:
            return LesoConfig(
                n=n,
                m=self.order - n,
                omega_o=self.omega_o,
                b=plant_b if self.b is None else self.b,
                beta=self.beta,
                initial_estimates=self.initial_estimates,
                allow_nonbinomial=self.beta is not None,
            )
        except ConfigException as err:
            raise ConfigException(f"{path}.{err.field.split('.')[-1]}", err.message)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    plant: PlantConfig = field(default_factory=PlantConfig)
    reference: dict = field(default_factory=lambda: {"kind": "constant", "value": 0.0})
    disturbance: dict = field(default_factory=lambda: {"kind": "constant", "value": 0.0})
    poles: tuple = ((DEFAULT_OMEGA_C, 2),)
    observers: tuple = ()
    dt: float = DEFAULT_DT
    duration: float = DEFAULT_DURATION
    window: int = DEFAULT_WINDOW
    hysteresis: float = 0.0
    initial_observer: int = 0
    measurement_hold: str = "linear"
    u_limit: float = None
    noise_std: float = 0.0
    seed: int = 0
    baselines: bool = True
    trials: int = 1
    friction_jitter: float = 0.0
    switch_du_limit: float = None
    iae_method: str = "left"
    output: str = None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigException("scenario", "expected a mapping at the top level")
        _reject_unknown(data, [f.name for f in fields(cls)] + ["omega_c"], "")

        plant = PlantConfig.from_dict(data.get("plant", {}))

        reference = dict(data.get("reference") or {"kind": "constant", "value": 0.0})
        reference_from_dict(reference)
        disturbance = dict(data.get("disturbance") or {"kind": "constant", "value": 0.0})
        disturbance_from_dict(disturbance)

        if "poles" in data and "omega_c" in data:
            raise ConfigException("poles", "give either 'poles' or 'omega_c', not both")
        if "omega_c" in data:
            poles = ((_number(data, "omega_c", "", None, positive=True), plant.n),)
        else:
            raw = _tuple(data.get("poles", [[DEFAULT_OMEGA_C, plant.n]]), "poles")
            poles = tuple(tuple(_tuple(pair, f"poles.{idx}")) for idx, pair in enumerate(raw))
        try:
            spec = PoleSpec(poles)
        except AdrcException as err:
            raise ConfigException("poles", err.message)
        except (IndexError, TypeError, ValueError):
            raise ConfigException("poles", f"expected a list of [value, multiplicity] pairs, got {poles}")
        if spec.degree != plant.n:
            raise ConfigException("poles", f"total multiplicity {spec.degree} must equal the plant order {plant.n}")

        observers = tuple(
            ObserverSpec.from_dict(item, f"observers.{idx}.") for idx, item in enumerate(_tuple(data.get("observers"), "observers"))
        )
        if not observers:
            raise ConfigException("observers", "the bank needs at least one observer")

        dt = _number(data, "dt", "", DEFAULT_DT, positive=True)
        duration = _number(data, "duration", "", DEFAULT_DURATION, positive=True)
        steps = duration / dt
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ConfigException("duration", f"must be a whole number of steps of {dt}, got {duration}")

        hold = data.get("measurement_hold", "linear")
        if hold not in MEASUREMENT_HOLDS:
            raise ConfigException("measurement_hold", f"expected one of {MEASUREMENT_HOLDS}, got '{hold}'")
        iae_method = data.get("iae_method", "left")
        if iae_method not in IAE_METHODS:
            raise ConfigException("iae_method", f"expected one of {IAE_METHODS}, got '{iae_method}'")

        friction_jitter = _number(data, "friction_jitter", "", 0.0, nonnegative=True)
        if friction_jitter >= 1:
            raise ConfigException("friction_jitter", "relative spread must stay below 1")

        hysteresis = _number(data, "hysteresis", "", 0.0, nonnegative=True)
        if hysteresis >= 1:
            raise ConfigException("hysteresis", "margin must stay below 1")
        initial_observer = _integer(data, "initial_observer", "", 0, minimum=0)
        if initial_observer >= len(observers):
            raise ConfigException("initial_observer", f"index {initial_observer} outside the bank of {len(observers)}")

        baselines = data.get("baselines", True)
        if not isinstance(baselines, bool):
            raise ConfigException("baselines", f"expected true/false, got {baselines!r}")

        config = cls(
            name=str(data.get("name", "scenario")),
            plant=plant,
            reference=reference,
            disturbance=disturbance,
            poles=poles,
            observers=observers,
            dt=dt,
            duration=duration,
            window=_integer(data, "window", "", DEFAULT_WINDOW, minimum=1),
            hysteresis=hysteresis,
            initial_observer=initial_observer,
            measurement_hold=hold,
            u_limit=_number(data, "u_limit", "", None, positive=True, optional=True),
            noise_std=_number(data, "noise_std", "", 0.0, nonnegative=True),
            seed=_integer(data, "seed", "", 0, minimum=0),
            baselines=baselines,
            trials=_integer(data, "trials", "", 1, minimum=1),
            friction_jitter=friction_jitter,
            switch_du_limit=_number(data, "switch_du_limit", "", None, positive=True, optional=True),
            iae_method=iae_method,
            output=data.get("output"),
        )
        config.observer_configs()
        return config

    def to_dict(self):
        return _plain(
            {
                "name": self.name,
                "plant": self.plant.to_dict(),
                "reference": self.reference,
                "disturbance": self.disturbance,
                "poles": self.poles,
                "observers": [spec.to_dict() for spec in self.observers],
                "dt": self.dt,
                "duration": self.duration,
                "window": self.window,
                "hysteresis": self.hysteresis,
                "initial_observer": self.initial_observer,
                "measurement_hold": self.measurement_hold,
                "u_limit": self.u_limit,
                "noise_std": self.noise_std,
                "seed": self.seed,
                "baselines": self.baselines,
                "trials": self.trials,
                "friction_jitter": self.friction_jitter,
                "switch_du_limit": self.switch_du_limit,
                "iae_method": self.iae_method,
                "output": self.output,
            }
        )

    @property
    def steps(self):
        return int(round(self.duration / self.dt))

    def pole_spec(self):
        return PoleSpec(self.poles)

    def build_reference(self):
        return reference_from_dict(self.reference)

    def build_disturbance(self):
        return disturbance_from_dict(self.disturbance)

    def observer_configs(self):
        plant_b = self.plant.nominal_b
        return [spec.build(self.plant.n, plant_b, f"observers.{idx}") for idx, spec in enumerate(self.observers)]

    def output_dir(self):
        return self.output or os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)


def dump_config(cfg):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def load_config(path):
    try:
        with open(path) as handle:
            data = yaml.safe_load(handle)
    except OSError as err:
        raise ConfigException("path", f"cannot read {path}: {err.strerror}")
    except yaml.YAMLError as err:
        raise ConfigException("path", f"{path} is not valid YAML: {err}")
    return ScenarioConfig.from_dict(data)


def config_hash(cfg):
    """sha256 of the canonical (key sorted) YAML dump of the resolved config."""
    canonical = yaml.safe_dump(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def with_override(cfg, dotted_path, value):
    """Copy of cfg with one field replaced, addressed like 'observers.0.omega_o'."""
    data = cfg.to_dict()
    keys = dotted_path.split(".")
    node = data
    try:
        for key in keys[:-1]:
            node = node[int(key)] if isinstance(node, list) else node[key]
        last = keys[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            if last not in node and last != "omega_c":
                raise KeyError(last)
            node[last] = value
    except (KeyError, IndexError, ValueError, TypeError):
        raise ConfigException(dotted_path, "no such field in the scenario")

    if keys == ["omega_c"]:
        data.pop("poles", None)
    return ScenarioConfig.from_dict(data)
