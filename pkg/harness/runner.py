import logging
import os
import re
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from algebra.polynomials import char_poly
from controller.ideal import IdealTrajectory
from controller.supervisor import initial_record, make_supervisor, supervisor_step
from harness.config import config_hash
from harness.metrics import MULTI_LAW, MetricsReport, iae, switch_transients, window_selections
from harness.trace import SimulationTrace
from plant.chain import total_disturbance_probe
from plant.disturbance import white_noise

## Instantiate Logger
logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    config: object
    traces: dict = field(default_factory=dict)
    metrics: MetricsReport = field(default_factory=MetricsReport)

    @property
    def multi(self):
        return self.traces[MULTI_LAW]


def _complete(record, plant, traj, reference, n):
    r = reference.derivatives(plant.t, n + 1)
    record["ebar1"] = float(plant.y - traj.x_star[0])
    record["disturbance"] = float(total_disturbance_probe(plant, r[n]))
    return record


def simulate(cfg, observers, label=MULTI_LAW, noise=None, friction_scale=1.0, probe=None):
    """
    Closed loop run of one control law (a bank of one or more observers).

    noise holds the additive measurement noise for samples 0..N. probe, when
    given, is called as probe(plant, sup, traj, reference) at every sample.
    """
    n = cfg.plant.n
    char = char_poly(cfg.pole_spec())
    reference = cfg.build_reference()
    disturbance = cfg.build_disturbance()
    if not disturbance.is_smooth:
        logger.warning(f"Disturbance '{disturbance.kind}' is not smooth; observer error bounds do not hold for this run")

    plant = cfg.plant.build(disturbance, friction_scale)
    noise = np.zeros(cfg.steps + 1) if noise is None else noise

    y = plant.y + noise[0]
    r = reference.derivatives(plant.t, n + 1)
    traj = IdealTrajectory.from_plant(plant, char.K)
    initial = cfg.initial_observer if label == MULTI_LAW else 0
    sup = make_supervisor(
        observers,
        char,
        y - r[0],
        cfg.window,
        cfg.u_limit,
        cfg.measurement_hold,
        t0=plant.t,
        hysteresis=cfg.hysteresis,
        initial=initial,
    )

    records = [_complete(initial_record(sup, y, reference, traj), plant, traj, reference, n)]
    if probe is not None:
        probe(plant, sup, traj, reference)

    for k in range(cfg.steps):
        plant.step(sup.u, cfg.dt)
        y = plant.y + noise[k + 1]
        _, record = supervisor_step(sup, y, reference, traj, cfg.dt)
        records.append(_complete(record, plant, traj, reference, n))
        if probe is not None:
            probe(plant, sup, traj, reference)

    header = {"config_hash": config_hash(cfg), "config": cfg.to_dict()}
    return SimulationTrace.from_records(records, label, len(observers), header)


def control_laws(cfg):
    """(label, observer configs) for the multi-observer law and each single observer baseline."""
    observers = cfg.observer_configs()
    laws = [(MULTI_LAW, observers)]
    if cfg.baselines and len(observers) > 1:
        seen = set()
        for idx, (spec, observer) in enumerate(zip(cfg.observers, observers)):
            label = spec.name if spec.name not in seen else f"{spec.name}-{idx}"
            seen.add(label)
            laws.append((label, [observer]))
    return laws


def run_scenario(cfg, probe=None):
    """
    Multi-observer run plus single observer baselines on identical noise and
    friction realizations, repeated over the configured trials.
    """
    logger.info(f"Running scenario '{cfg.name}': {cfg.steps} steps of {cfg.dt:g} s, {len(cfg.observers)} observers")

    laws = control_laws(cfg)
    rng = np.random.default_rng(cfg.seed)
    result = RunResult(config=cfg)
    trial_iae = defaultdict(list)

    for trial in range(cfg.trials):
        noise = white_noise(cfg.noise_std, cfg.steps + 1, rng)
        scale = rng.uniform(1.0 - cfg.friction_jitter, 1.0 + cfg.friction_jitter) if cfg.friction_jitter > 0 else 1.0

        for label, observers in laws:
            trace = simulate(
                cfg,
                observers,
                label=label,
                noise=noise,
                friction_scale=scale,
                probe=probe if label == MULTI_LAW and trial == 0 else None,
            )
            trial_iae[label].append(iae(trace, method=cfg.iae_method))
            peak = float(np.max(np.abs(trace["ebar1"])))
            result.metrics.sup_error[label] = max(result.metrics.sup_error.get(label, 0.0), peak)
            if trial == 0:
                result.traces[label] = trace
            logger.debug(f"trial {trial} law {label}: IAE {trial_iae[label][-1]:.6g}")

    multi = result.multi
    result.metrics.trial_iae = dict(trial_iae)
    result.metrics.switch_count = int(np.sum(multi["switched"]))
    result.metrics.selections = window_selections(multi, cfg.window)
    result.metrics.transients = switch_transients(multi)
    result.metrics.switch_du_limit = cfg.switch_du_limit

    for law, value in result.metrics.iae.items():
        logger.info(f"{law}: IAE {value:.6g}")
    logger.info(f"Switches: {result.metrics.switch_count}")
    return result


def _slug(text):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text)


def write_outputs(result, out_dir=None, long=False):
    """One CSV per law plus the text report; returns the written paths."""
    cfg = result.config
    out_dir = out_dir or cfg.output_dir()
    os.makedirs(out_dir, exist_ok=True)

    paths = []
    for label, trace in result.traces.items():
        suffix = "-long" if long else ""
        path = os.path.join(out_dir, f"{_slug(cfg.name)}-{_slug(label)}{suffix}.csv")
        trace.to_csv(path, long=long)
        paths.append(path)

    report_path = os.path.join(out_dir, f"{_slug(cfg.name)}-report.txt")
    with open(report_path, "w") as handle:
        handle.write(result.metrics.to_text() + "\n")
    paths.append(report_path)
    logger.info(f"Report written to {report_path}")
    return paths
