import math

import numpy as np
import pytest

from controller.adrc import adrc_law, clamp
from controller.ideal import IdealTrajectory, ideal_step
from controller.reference import ConstantReference, RampReference, SinusoidReference, reference_from_dict
from controller.supervisor import channel_record, control_law, make_supervisor, supervisor_step
from observer.leso import LesoConfig
from plant.chain import ChainPlant
from plant.disturbance import SinusoidDisturbance
from utils.exception_handler import ConfigException


def test_adrc_law():
    u = adrc_law(np.array([1.0, 2.0, 3.0, 99.0]), (22500.0, 300.0), 3.25)
    assert u == pytest.approx((-22500.0 - 600.0 - 3.0) / 3.25)
    with pytest.raises(ConfigException):
        adrc_law([1.0, 2.0], (22500.0, 300.0), 3.25)
    with pytest.raises(ConfigException):
        adrc_law([1.0, 2.0, 3.0], (22500.0, 300.0), 0.0)


def test_clamp():
    assert clamp(15.0, 10.0) == 10.0
    assert clamp(-15.0, 10.0) == -10.0
    assert clamp(3.0, None) == 3.0


def test_references():
    assert np.array_equal(ConstantReference(10.0).derivatives(1.0, 3), [10.0, 0.0, 0.0])

    ramp = RampReference((1.0, 2.0))
    assert np.allclose(ramp.derivatives(2.0, 3), [5.0, 2.0, 0.0])
    assert ramp.sup_derivative(1) == 2.0

    sine = SinusoidReference(amplitude=2.0, frequency=1.0)
    assert sine.derivatives(0.0, 2) == pytest.approx([0.0, 2.0 * 2.0 * math.pi])
    assert sine.sup_derivative(2) == pytest.approx(2.0 * (2.0 * math.pi) ** 2)


def test_reference_from_dict():
    assert reference_from_dict({"kind": "constant", "value": 20.0}) == ConstantReference(20.0)
    assert reference_from_dict({"kind": "ramp", "coefficients": [0.0, 1.0]}).to_dict() == {
        "kind": "ramp",
        "coefficients": [0.0, 1.0],
    }
    with pytest.raises(ConfigException) as err:
        reference_from_dict({"kind": "square"})
    assert err.value.field == "reference.kind"
    with pytest.raises(ConfigException):
        RampReference(())


def test_ideal_trajectory_settles_on_setpoint(char):
    plant = ChainPlant(n=2)
    traj = IdealTrajectory.from_plant(plant, char.K)
    reference = ConstantReference(10.0)
    for _ in range(2000):
        ideal_step(traj, reference, 1e-4)
    assert traj.t == pytest.approx(0.2)
    assert traj.x_star[0] == pytest.approx(10.0, abs=1e-9)
    assert traj.x_star[1] == pytest.approx(0.0, abs=1e-7)


def test_ideal_trajectory_validation(char):
    with pytest.raises(ConfigException):
        IdealTrajectory(x_star=[0.0], K=char.K)
    with pytest.raises(ConfigException):
        ideal_step(IdealTrajectory(x_star=[0.0, 0.0], K=char.K), ConstantReference(), 0.0)


def test_make_supervisor_validation(char, eso3):
    with pytest.raises(ConfigException):
        make_supervisor([], char, 0.0)
    with pytest.raises(ConfigException):
        make_supervisor([eso3], char, 0.0, hold="cubic")
    with pytest.raises(ConfigException):
        make_supervisor([eso3], char, 0.0, u_limit=-1.0)


def test_supervisor_initial_control(char, eso3):
    sup = make_supervisor([eso3, eso3], char, -10.0)
    assert sup.size == 2
    assert sup.selected == 0
    assert sup.u == pytest.approx(22500.0 * 10.0 / 3.25)

    clamped = make_supervisor([eso3], char, -10.0, u_limit=10.0)
    assert clamped.u == 10.0


def test_control_law_uses_the_selected_observers_b(char, eso3):
    heavier = LesoConfig(n=2, m=1, omega_o=1500.0, b=6.5)
    sup = make_supervisor([eso3, heavier], char, -10.0)
    assert sup.u == pytest.approx(22500.0 * 10.0 / 3.25)
    assert control_law(sup, 1) == pytest.approx(22500.0 * 10.0 / 6.5)

    sup.switch.selected = 1
    plant = ChainPlant(n=2, b=6.5)
    traj = IdealTrajectory.from_plant(plant, char.K)
    u, record = supervisor_step(sup, plant.y, ConstantReference(0.0), traj, 1e-4)
    assert record["active"] == 1
    assert u == pytest.approx(adrc_law(sup.channels[1].e_hat, sup.K, 6.5))


def test_extra_extended_state_does_not_reach_the_control(char, eso4):
    sup = make_supervisor([eso4], char, -10.0)
    plant = ChainPlant(n=2, disturbance=SinusoidDisturbance(amplitude=50.0, frequency=5.0))
    traj = IdealTrajectory.from_plant(plant, char.K)
    for _ in range(50):
        plant.step(sup.u, 1e-4)
        supervisor_step(sup, plant.y, ConstantReference(0.0), traj, 1e-4)

    before = control_law(sup, 0)
    sup.channels[0].state.e_hat[3] += 1.0e6
    assert control_law(sup, 0) == before


def _closed_loop(char, observers, steps, dt=1e-4, amplitude=50.0, frequency=5.0):
    plant = ChainPlant(n=2, disturbance=SinusoidDisturbance(amplitude=amplitude, frequency=frequency))
    reference = ConstantReference(0.0)
    traj = IdealTrajectory.from_plant(plant, char.K)
    sup = make_supervisor(observers, char, plant.y, window=20)
    records = []
    for _ in range(steps):
        plant.step(sup.u, dt)
        _, record = supervisor_step(sup, plant.y, reference, traj, dt)
        records.append(record)
    return sup, records


def test_identical_observers_never_switch(char, eso3):
    sup, records = _closed_loop(char, [eso3, eso3], 400)
    assert sup.switch.switches == 0
    assert all(record["z_0"] == record["z_1"] for record in records)
    assert all(record["switched"] == 0 for record in records)


def test_supervisor_selects_the_well_tuned_observer(char):
    detuned = LesoConfig(n=2, m=1, omega_o=150.0)
    tuned = LesoConfig(n=2, m=1, omega_o=1500.0)
    sup, records = _closed_loop(char, [detuned, tuned], 2000)
    assert sup.selected == 1
    late = [record["active"] for record in records[1000:]]
    assert np.mean(np.equal(late, 1)) >= 0.9


def test_dropped_observer_reports_nan(char, eso3, eso4):
    sup = make_supervisor([eso3, eso4], char, 0.0)
    sup.channels[1].active = False
    sup.switch.drop(1)
    record = channel_record(sup, 1, 2)
    assert all(math.isnan(value) for value in record.values())
    assert set(record) == {"e1_tilde_1", "z_1", "acc_1", "ext_hat_1"}


def test_diverging_observer_is_dropped(char, eso3):
    # gains of (s - omega_o)^3, every observer pole in the right half plane
    unstable = LesoConfig(n=2, m=1, omega_o=1500.0, beta=(-4500.0, 6.75e6, -3.375e9), allow_nonbinomial=True)
    sup, records = _closed_loop(char, [eso3, unstable], 6000, amplitude=1.0)
    assert not sup.channels[1].active
    assert not sup.switch.active[1]
    assert sup.selected == 0
    assert math.isnan(records[-1]["z_1"])
    assert math.isfinite(records[-1]["z_0"])
