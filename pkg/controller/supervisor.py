"""
Parallel multi-observer ADRC supervisor.

--> Control period (t_k -> t_{k+1})

    1. take the new sample y, e_1 = y - r_1
    2. advance the ideal trajectory
    3. advance every candidate observer with the same e_1 and the applied u
    4. e1_tilde_j = e_1 - e_hat_1^j, push it through observer j's z filter
    5. accumulate |z_j|, select at window boundaries
    6. form u from the selected observer's estimates (clamped if configured)

Every observer integrates with the u that was actually applied, never its
own hypothetical law. An observer whose estimate or z filter goes
non-finite is dropped from candidacy and the bank carries on without it.
"""

import logging
from dataclasses import dataclass

import numpy as np

from algebra.polynomials import build_g_family
from controller.adrc import adrc_law, clamp
from controller.ideal import ideal_step
from evaluator.switching import DEFAULT_WINDOW, SwitchIndex, switch_update
from evaluator.zfilter import make_zfilter, zfilter_step
from observer.leso import init_state, leso_step
from utils.exception_handler import ConfigException, DivergenceException

## Instantiate Logger
logger = logging.getLogger(__name__)

MEASUREMENT_HOLDS = ("linear", "zero")


@dataclass
class ObserverChannel:
    config: object
    state: object
    zfilter: object
    e1_tilde: float = 0.0
    z: float = 0.0
    active: bool = True

    @property
    def e_hat(self):
        return self.state.e_hat


@dataclass
class SupervisorState:
    channels: list
    switch: SwitchIndex
    K: tuple
    u: float = 0.0
    u_limit: float = None
    hold: str = "linear"
    e1: float = 0.0
    t: float = 0.0
    switched: bool = False

    @property
    def selected(self):
        return self.switch.selected

    @property
    def size(self):
        return len(self.channels)


def make_supervisor(
    configs, char, e1_0, window=DEFAULT_WINDOW, u_limit=None, hold="linear", t0=0.0, hysteresis=0.0, initial=0
):
    """Bank of observers with their z filters, ready at t0 with the first control value computed."""
    if not configs:
        raise ConfigException("observers", "the bank needs at least one observer")
    if hold not in MEASUREMENT_HOLDS:
        raise ConfigException("measurement_hold", f"expected one of {MEASUREMENT_HOLDS}, got '{hold}'")
    if u_limit is not None and not u_limit > 0:
        raise ConfigException("u_limit", f"must be positive, got {u_limit}")

    n = char.n
    channels = []
    for idx, cfg in enumerate(configs):
        if cfg.n != n:
            raise ConfigException(f"observers.{idx}", f"observer is built for n={cfg.n}, the plant has n={n}")
        g_family = build_g_family(char.K, cfg.beta, n)
        channels.append(
            ObserverChannel(
                config=cfg,
                state=init_state(cfg, e1_0, t0),
                zfilter=make_zfilter(g_family[n], char.delta),
            )
        )
        channels[-1].zfilter.t = t0

    sup = SupervisorState(
        channels=channels,
        switch=SwitchIndex(size=len(channels), window=window, hysteresis=hysteresis, selected=initial),
        K=tuple(char.K),
        u_limit=u_limit,
        hold=hold,
        e1=e1_0,
        t=t0,
    )
    sup.u = clamp(control_law(sup, sup.selected), u_limit)
    return sup


def control_law(sup, idx):
    """ADRC law from observer idx, divided by that observer's own b."""
    channel = sup.channels[idx]
    return adrc_law(channel.e_hat, sup.K, channel.config.b)


def _drop(sup, idx, err):
    logger.warning(f"Observer {idx} diverged at t={sup.t:.6g}: {err.message}")
    sup.channels[idx].active = False
    sup.switch.drop(idx)


def supervisor_step(sup, y, ref, traj, dt):
    """
    One control period ending at the new sample y.

    Returns (u, record) where u is applied over the next period and record
    holds the per step trace values.
    """
    n = len(sup.K)
    t_next = sup.t + dt
    r = ref.derivatives(t_next, n + 1)
    e1 = y - r[0]
    e1_previous = sup.e1 if sup.hold == "linear" else None

    ideal_step(traj, ref, dt)

    u_applied = sup.u
    for idx, channel in enumerate(sup.channels):
        if not channel.active:
            continue
        try:
            channel.state = leso_step(channel.state, channel.config, e1, u_applied, dt, e1_previous)
            e1_tilde = e1 - channel.e_hat[0]
            previous = channel.e1_tilde if sup.hold == "linear" else None
            channel.z = zfilter_step(channel.zfilter, e1_tilde, dt, previous)
            channel.e1_tilde = e1_tilde
        except DivergenceException as err:
            _drop(sup, idx, err)

    before = sup.selected
    selected = switch_update(sup.switch, [channel.z if channel.active else np.nan for channel in sup.channels])
    sup.switched = selected != before
    if sup.switched:
        logger.debug(f"t={t_next:.6g}: observer {before} -> {selected}")

    sup.u = clamp(control_law(sup, selected), sup.u_limit)
    sup.e1 = e1
    sup.t = t_next

    record = {
        "t": t_next,
        "r": float(r[0]),
        "y": float(y),
        "x1_star": float(traj.x_star[0]),
        "e1": float(e1),
        "u": sup.u,
        "active": selected,
        "switched": int(sup.switched),
    }
    for idx in range(sup.size):
        record.update(channel_record(sup, idx, n))
    return sup.u, record


def initial_record(sup, y, ref, traj):
    """Trace values at t0, before the first control period."""
    n = len(sup.K)
    r = ref.derivatives(sup.t, n + 1)
    record = {
        "t": sup.t,
        "r": float(r[0]),
        "y": float(y),
        "x1_star": float(traj.x_star[0]),
        "e1": float(sup.e1),
        "u": sup.u,
        "active": sup.selected,
        "switched": 0,
    }
    for idx in range(sup.size):
        record.update(channel_record(sup, idx, n))
    return record


def channel_record(sup, idx, n):
    channel = sup.channels[idx]
    values = (channel.e1_tilde, channel.z, sup.switch.accumulators[idx], channel.e_hat[n])
    if not channel.active:
        values = (np.nan,) * 4
    names = (f"e1_tilde_{idx}", f"z_{idx}", f"acc_{idx}", f"ext_hat_{idx}")
    return {name: float(value) for name, value in zip(names, values)}

