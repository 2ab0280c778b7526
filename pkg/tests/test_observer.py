import logging
import math

import numpy as np
import pytest

from controller.reference import ConstantReference, RampReference
from observer.bounds import (
    homogeneous_norm,
    lemma1_G,
    lemma1_Gi,
    lemma1_bound,
    lemma1_eps_bound,
    reference_bound,
    scaled_matrix,
)
from observer.leso import LesoConfig, ScaledError, init_state, leso_step
from plant.chain import ChainPlant
from plant.disturbance import ConstantDisturbance, SinusoidDisturbance
from utils.exception_handler import ConfigException, ObserverDivergedException


def test_default_gains_are_binomial(eso3):
    assert eso3.order == 3
    assert eso3.beta == (4500.0, 6.75e6, 3.375e9)
    A, beta, B = eso3.matrices
    assert np.array_equal(B, [0.0, 3.25, 0.0])
    assert np.allclose(np.linalg.eigvals(A), -1500.0, rtol=1e-3)
    assert np.allclose(eso3.alpha, [3.0, 3.0, 1.0])


def test_nonbinomial_gains_need_opt_in(caplog):
    with pytest.raises(ConfigException) as err:
        LesoConfig(n=2, m=1, omega_o=10.0, beta=(30.0, 300.0, 999.0))
    assert err.value.field == "observer.beta"

    with caplog.at_level(logging.WARNING):
        cfg = LesoConfig(n=2, m=1, omega_o=10.0, beta=(30.0, 300.0, 999.0), allow_nonbinomial=True)
    assert cfg.beta == (30.0, 300.0, 999.0)
    assert "non-binomial" in caplog.text


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"omega_o": 0.0}, "observer.omega_o"),
        ({"m": 0}, "observer.order"),
        ({"b": 0.0}, "observer.b"),
        ({"initial_estimates": (1.0,)}, "observer.initial_estimates"),
        ({"beta": (1.0, 2.0)}, "observer.beta"),
    ],
)
def test_config_validation_names_the_field(kwargs, field):
    with pytest.raises(ConfigException) as err:
        LesoConfig(**kwargs)
    assert err.value.field == field


def test_typo_gains_only_for_fourth_order(eso3, eso4):
    typo = eso4.with_typo_gains()
    assert typo.beta[2] == pytest.approx(6.0 * 1500.0**3)
    assert typo.beta[:2] == eso4.beta[:2]
    with pytest.raises(ConfigException):
        eso3.with_typo_gains()


def test_init_state_uses_measurement_and_guesses(eso3):
    assert np.array_equal(init_state(eso3, 0.2).e_hat, [0.2, 0.0, 0.0])
    cfg = LesoConfig(n=2, m=1, initial_estimates=(1.0, -2.0))
    assert np.array_equal(init_state(cfg, 0.2, t0=1.0).e_hat, [0.2, 1.0, -2.0])


def test_observer_tracks_constant_disturbance(eso3):
    plant = ChainPlant(n=2, b=3.25, disturbance=ConstantDisturbance(5.0))
    state = init_state(eso3, plant.y)
    dt = 1e-5
    previous = plant.y
    for _ in range(2000):
        plant.step(0.0, dt)
        state = leso_step(state, eso3, plant.y, 0.0, dt, previous)
        previous = plant.y
    assert state.t == pytest.approx(0.02)
    assert state.e_hat[2] == pytest.approx(5.0, rel=1e-3)
    assert state.e_hat[1] == pytest.approx(plant.x[1], rel=1e-3)


def test_exact_start_without_forcing_keeps_zero_error():
    # b u cancels f, so e_1 is linear in t and e_3' = 0
    cfg = LesoConfig(n=2, m=1, omega_o=100.0, b=3.25, initial_estimates=(-0.2, 5.0))
    plant = ChainPlant(n=2, b=3.25, disturbance=ConstantDisturbance(5.0), x=[0.3, -0.2])
    u = -5.0 / 3.25
    state = init_state(cfg, plant.y)
    dt = 1e-4
    previous = plant.y
    worst = 0.0
    for _ in range(1000):
        plant.step(u, dt)
        state = leso_step(state, cfg, plant.y, u, dt, previous)
        previous = plant.y
        worst = max(worst, float(np.max(np.abs(state.e_hat - plant.true_errors(np.zeros(3), 3)))))
    assert worst < 1e-10


def _steady_disturbance_error(omega_o, dt=1e-5, duration=0.2):
    cfg = LesoConfig(n=2, m=1, omega_o=omega_o)
    signal = SinusoidDisturbance(amplitude=50.0, frequency=10.0)
    plant = ChainPlant(n=2, b=3.25, disturbance=signal)
    state = init_state(cfg, plant.y)
    previous = plant.y
    worst = 0.0
    for k in range(int(round(duration / dt))):
        plant.step(0.0, dt)
        state = leso_step(state, cfg, plant.y, 0.0, dt, previous)
        previous = plant.y
        if plant.t >= duration / 2:
            worst = max(worst, abs(state.e_hat[2] - signal(plant.t)))
    return worst


def test_wider_bandwidth_tracks_the_disturbance_closer():
    errors = [_steady_disturbance_error(omega_o) for omega_o in (200.0, 400.0, 800.0)]
    assert errors[0] > errors[1] > errors[2]


def test_leso_step_raises_on_divergence(eso3):
    with pytest.raises(ObserverDivergedException):
        leso_step(init_state(eso3, 0.0), eso3, math.nan, 0.0, 1e-4)
    with pytest.raises(ConfigException):
        leso_step(init_state(eso3, 0.0), eso3, 0.0, 0.0, -1e-4)


def test_scaled_error_tracks_running_sup():
    scaled = ScaledError(omega_o=10.0)
    assert np.allclose(scaled.update([1.0, 20.0, 300.0]), [1.0, 2.0, 3.0])
    scaled.update([0.5, 0.0, 0.0])
    assert scaled.gamma == pytest.approx(3.0)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_bound_constants_are_binomial(N):
    assert [lemma1_Gi(N, i) for i in range(1, N + 1)] == [math.comb(N, i - 1) for i in range(1, N + 1)]
    assert lemma1_G(N) == max(math.comb(N, i) for i in range(N))


def test_bound_constant_index_range():
    with pytest.raises(ConfigException):
        lemma1_Gi(3, 0)
    with pytest.raises(ConfigException):
        lemma1_Gi(3, 4)


@pytest.mark.parametrize("m", [1, 2])
def test_forcing_tail_is_the_static_gain(m):
    cfg = LesoConfig(n=2, m=m, omega_o=200.0)
    A, _, _ = cfg.matrices
    forcing = np.zeros(cfg.order)
    forcing[-1] = 1.0
    steady = np.linalg.solve(A, -forcing)
    for i in range(1, cfg.order + 1):
        assert abs(steady[i - 1]) == pytest.approx(lemma1_bound(cfg, 0.0, 1.0, 0.0, 1.0, i), rel=1e-9)


def test_homogeneous_norm(eso3):
    assert homogeneous_norm(eso3, 0.0) == pytest.approx(1.0)
    norms = homogeneous_norm(eso3, np.array([0.0, 0.01, 0.1]))
    assert norms.shape == (3,)
    assert norms[-1] < 1e-6
    assert np.allclose(scaled_matrix(eso3)[:, 0], -eso3.alpha)


def test_bounds_with_initial_error(eso3):
    t = np.array([0.0, 1e-3, 1e-2])
    bound = lemma1_bound(eso3, 0.1, 10.0, 0.0, t, 2)
    assert bound.shape == (3,)
    assert bound[0] == pytest.approx(1500.0 * 0.1 + 10.0 * 3 / 1500.0**2)
    assert lemma1_eps_bound(eso3, 0.0, 10.0, 0.0, 0.5) == pytest.approx(10.0 * 3 / 1500.0**3)


def test_reference_bound():
    assert reference_bound(ConstantReference(10.0), 4) == 10.0
    ramp = RampReference((0.0, 2.0, -1.0))
    assert reference_bound(ramp, 2, horizon=3.0) == pytest.approx(4.0)
    assert reference_bound(ramp, 2) == math.inf
