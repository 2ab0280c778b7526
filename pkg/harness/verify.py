"""
Numerical verification of the observer bounds, the tracking error identity
and the switching behaviour.

--> Checks

    gain-exactness        binomial gains against the exact expansion of (s + omega_o)^N
    residue-oracle        partial fractions reconstruct g / Delta at random points
    identity              z matches e_bar_1, or e_bar_1 + gap with injected estimation error
    decay-rate            log|z - e_bar_1| falls with the slowest pole of Delta
    observer-bound        |e_tilde_i| and ||epsilon|| stay below their bounds
    tracking-bound        |e_bar_1| stays below the closed loop bound
    single-observer       a one observer bank equals plain single ESO ADRC, bit for bit
    duplicate-bank        two identical observers never switch
    detuned-bank          the well tuned observer is selected in steady state
    p2p-iae               multi-observer IAE against the best single observer
    switch-transient      control and output moves at switch instants
    determinism           reruns give identical trace text

Every check logs the measured value, its target and the margin; any failed
check fails the suite.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from algebra.polynomials import (
    PoleSpec,
    build_g_family,
    char_poly,
    expand_factors,
    evaluate_exact,
    leso_gains,
    reconstruct_exact,
    residue_table,
    residues,
)
from controller.adrc import adrc_law, clamp
from controller.ideal import IdealTrajectory, ideal_step
from evaluator.bounds import theorem1_gap, theorem2_bound
from harness.config import DEFAULT_OMEGA_C, ScenarioConfig
from harness.metrics import IAE_RATIO_LIMIT, window_selections
from harness.runner import run_scenario, simulate
from observer.bounds import lemma1_bound, lemma1_eps_bound, reference_bound
from observer.leso import DEFAULT_OMEGA_O, ScaledError, init_state, leso_step
from plant.disturbance import derivative_bound, disturbance_from_dict
from presets import ScenarioPresets
from utils.exception_handler import VerificationException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Check Thresholds
RESIDUE_CASES = 100
RESIDUE_POINTS = 20
RESIDUE_RTOL = 1e-9
RESIDUE_POLE_RANGE = (0.5, 50.0)
IDENTITY_RTOL = 1e-2
DECAY_RTOL = 0.10
DETUNED_SHARE = 0.90
DY_CONTINUITY = 1.01
# margins below this share of the target are reported as degraded
DEGRADED_MARGIN = 0.05

GAIN_ORDERS = range(2, 9)
GAIN_BANDWIDTHS = (1, 10, 1500)

IDENTITY_AMPLITUDE = 50.0
IDENTITY_FREQUENCY = 10.0
INJECTED_ERROR = 1.0

BOUND_AMPLITUDE = 10.0
BOUND_OMEGA = 300.0
BOUND_OFFSET = 5.0


@dataclass
class CheckResult:
    name: str
    measured: float
    target: float
    passed: bool
    relation: str = "<="
    detail: str = ""

    @property
    def margin(self):
        if self.relation == ">=":
            return self.measured - self.target
        return self.target - self.measured

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: measured {self.measured:.6g} {self.relation} {self.target:.6g} (margin {self.margin:.3g})"
        return f"{text} {self.detail}" if self.detail else text


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def failed(self):
        return [check.name for check in self.checks if not check.passed]

    @property
    def passed(self):
        return not self.failed

    def add(self, check):
        self.checks.append(check)
        if not check.passed:
            logger.error(check.line())
        else:
            logger.info(check.line())
            if check.target and check.margin < DEGRADED_MARGIN * abs(check.target):
                logger.warning(f"{check.name}: margin {check.margin:.3g} is degraded")
        return check

    def to_text(self):
        lines = [check.line() for check in self.checks]
        verdict = "all checks passed" if self.passed else f"failed: {', '.join(self.failed)}"
        lines.append(f"{len(self.checks)} checks, {verdict}")
        return "\n".join(lines)


def _at_most(name, measured, target, detail=""):
    return CheckResult(name, float(measured), float(target), bool(measured <= target), "<=", detail)


def _at_least(name, measured, target, detail=""):
    return CheckResult(name, float(measured), float(target), bool(measured >= target), ">=", detail)


@dataclass
class ErrorProbe:
    """Collects the true estimation error e - e_hat of one observer at every sample."""

    channel: int = 0
    times: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def __call__(self, plant, sup, traj, reference):
        channel = sup.channels[self.channel]
        N = channel.config.order
        e = plant.true_errors(reference.derivatives(plant.t, N), N)
        self.times.append(plant.t)
        self.errors.append(e - channel.e_hat)

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.errors)


def _chain_scenario(name, disturbance, observers, dt, duration, window=20, reference=None):
    return ScenarioConfig.from_dict(
        {
            "name": name,
            "plant": {"kind": "chain", "n": 2},
            "reference": reference or {"kind": "constant", "value": 0.0},
            "disturbance": disturbance,
            "poles": [[DEFAULT_OMEGA_C, 2]],
            "observers": observers,
            "dt": dt,
            "duration": duration,
            "window": window,
            "baselines": False,
        }
    )


def _residue_row(cfg, observer):
    spec = cfg.pole_spec()
    char = char_poly(spec)
    return residue_table(build_g_family(char.K, observer.beta, char.n), spec)


def check_gain_exactness():
    mismatches = []
    for order in GAIN_ORDERS:
        for omega_o in GAIN_BANDWIDTHS:
            exact = expand_factors(((omega_o, order),))
            gains = leso_gains(order, omega_o)
            if any(gains[i - 1] != exact[order - i] for i in range(1, order + 1)):
                mismatches.append((order, omega_o))
    detail = f"orders {GAIN_ORDERS.start}..{GAIN_ORDERS.stop - 1}, omega_o in {GAIN_BANDWIDTHS}"
    if mismatches:
        detail += f", mismatched {mismatches}"
    return _at_most("gain-exactness", len(mismatches), 0, detail)


def _random_pole_spec(rng):
    while True:
        distinct = int(rng.integers(1, 7))
        multiplicity = rng.integers(1, 4, size=distinct)
        if 2 <= multiplicity.sum() <= 6:
            break
    poles = np.sort(rng.uniform(RESIDUE_POLE_RANGE[0], RESIDUE_POLE_RANGE[1], size=distinct))
    return PoleSpec(tuple((float(s), int(d)) for s, d in zip(poles, multiplicity)))


def check_residue_oracle(seed=0):
    rng = np.random.default_rng(seed)
    worst = Fraction(0)
    for _ in range(RESIDUE_CASES):
        spec = _random_pole_spec(rng)
        coeffs = rng.uniform(-1.0, 1.0, spec.degree)
        coeffs[-1] = rng.choice((-1.0, 1.0)) * rng.uniform(0.5, 1.0)
        numerator = [Fraction(float(c)) for c in coeffs]
        delta = expand_factors(tuple((Fraction(s_j), d_j) for s_j, d_j in spec.poles))
        column = residues(numerator, spec, exact=True)

        for s in rng.uniform(0.0, 10.0, RESIDUE_POINTS):
            exact = evaluate_exact(numerator, s) / evaluate_exact(delta, s)
            if exact == 0:
                continue
            approx = reconstruct_exact(column, spec, s)
            worst = max(worst, abs(approx - exact) / abs(exact))
    detail = f"{RESIDUE_CASES} random cases, poles in {list(RESIDUE_POLE_RANGE)}"
    return _at_most("residue-oracle", float(worst), RESIDUE_RTOL, detail)


def check_identity(omega_o=DEFAULT_OMEGA_O, duration=1.0, dt=1e-5):
    disturbance = {"kind": "sinusoid", "amplitude": IDENTITY_AMPLITUDE, "frequency": IDENTITY_FREQUENCY}
    results = []
    for label, injected in (("identity", 0.0), ("identity-injected", INJECTED_ERROR)):
        observer = {"order": 3, "omega_o": omega_o}
        if injected:
            observer["initial_estimates"] = [-injected, 0.0]
        cfg = _chain_scenario(label, disturbance, [observer], dt, duration)
        observers = cfg.observer_configs()
        trace = simulate(cfg, observers)

        t = trace["t"]
        ebar1 = trace["ebar1"]
        gap = theorem1_gap(_residue_row(cfg, observers[0]), (0.0, injected, 0.0), t, t[0])
        error = np.max(np.abs(trace["z_0"] - gap - ebar1)) / np.max(np.abs(ebar1))
        results.append(_at_most(label, error, IDENTITY_RTOL, f"sup|e_bar_1| = {np.max(np.abs(ebar1)):.3g}"))
    return results


def check_decay(omega_o=DEFAULT_OMEGA_O, duration=0.2, dt=1e-5):
    observer = {"order": 3, "omega_o": omega_o, "initial_estimates": [-INJECTED_ERROR, 0.0]}
    cfg = _chain_scenario("decay", {"kind": "constant", "value": 0.0}, [observer], dt, duration)
    trace = simulate(cfg, cfg.observer_configs())

    t = trace["t"]
    diff = np.abs(trace["z_0"] - trace["ebar1"])
    fit = (t >= duration / 2) & (diff > 0)
    slope = float(np.polyfit(t[fit], np.log(diff[fit]), 1)[0])
    expected = -min(cfg.pole_spec().values)
    error = abs(slope - expected) / abs(expected)
    return _at_most("decay-rate", error, DECAY_RTOL, f"slope {slope:.4g} against {expected:.4g}")


def _bound_runs(omega_o, typo_gains, duration, dt):
    """Closed loop runs for the bound checks: (name, cfg, observer, trace, probe) per order and start."""
    frequency = BOUND_OMEGA / (2.0 * math.pi)
    disturbance = {"kind": "sinusoid", "amplitude": BOUND_AMPLITUDE, "frequency": frequency}

    runs = []
    for order in (3, 4):
        signal = disturbance_from_dict(disturbance)
        n = 2
        # estimates that match the true initial state exactly
        exact = [0.0] * (n - 1) + [signal.derivative(0.0, q) for q in range(order - n)]
        offset = list(exact)
        offset[0] += BOUND_OFFSET

        for start, estimates in (("exact", exact), ("offset", offset)):
            run_cfg = _chain_scenario(
                f"bound-eso{order}-{start}",
                disturbance,
                [{"order": order, "omega_o": omega_o, "initial_estimates": estimates}],
                dt,
                duration,
            )
            observer = run_cfg.observer_configs()[0]
            if typo_gains and order == 4:
                observer = observer.with_typo_gains()
            probe = ErrorProbe()
            trace = simulate(run_cfg, [observer], probe=probe)
            runs.append((f"eso{order}-{start}", run_cfg, observer, trace, probe))
    return runs


def check_observer_bounds(runs):
    results = []
    for name, cfg, observer, _, probe in runs:
        t, e_tilde = probe.arrays()
        N = observer.order
        scale = observer.omega_o ** np.arange(N)
        epsilon = e_tilde / scale
        eps0 = float(np.max(np.abs(epsilon[0])))

        h1 = derivative_bound(cfg.build_disturbance(), observer.m)
        h2 = reference_bound(cfg.build_reference(), N + 1, cfg.duration)

        worst = 0.0
        for i in range(1, N + 1):
            bound = lemma1_bound(observer, eps0, h1, h2, t, i, t[0])
            worst = max(worst, float(np.max(np.abs(e_tilde[:, i - 1]) / bound)))
        eps_bound = lemma1_eps_bound(observer, eps0, h1, h2, t, t[0])
        eps_worst = float(np.max(np.max(np.abs(epsilon), axis=1) / eps_bound))

        results.append(_at_most(f"observer-bound-{name}", worst, 1.0, "max |e_tilde_i| / bound"))
        results.append(_at_most(f"scaled-bound-{name}", eps_worst, 1.0, "max ||epsilon|| / bound"))
    return results


def check_tracking_bounds(runs):
    results = []
    for name, cfg, observer, trace, probe in runs:
        if not name.endswith("exact"):
            continue
        t, e_tilde = probe.arrays()
        scaled = ScaledError(observer.omega_o)
        gamma = np.empty(len(t))
        for k, value in enumerate(e_tilde):
            scaled.update(value)
            gamma[k] = scaled.gamma

        n = cfg.plant.n
        table = _residue_row(cfg, observer)
        bound = theorem2_bound(cfg.pole_spec(), table.rows[n], observer.omega_o, 0.0, gamma, t, t[0])
        ebar1 = np.abs(trace["ebar1"])
        defined = bound > 0
        if np.any(ebar1[~defined] > 0):
            worst = math.inf
        else:
            worst = float(np.max(ebar1[defined] / bound[defined])) if defined.any() else 0.0
        results.append(_at_most(f"tracking-bound-{name}", worst, 1.0, "max |e_bar_1| / bound"))
    return results


def single_eso_loop(cfg):
    """Plain single observer ADRC, written out without the supervisor; returns the u sequence."""
    n = cfg.plant.n
    char = char_poly(cfg.pole_spec())
    K = tuple(char.K)
    reference = cfg.build_reference()
    plant = cfg.plant.build(cfg.build_disturbance())
    observer = cfg.observer_configs()[0]

    traj = IdealTrajectory.from_plant(plant, K)
    t = plant.t
    e1 = plant.y - reference.derivatives(t, n + 1)[0]
    state = init_state(observer, e1, t)
    u = clamp(adrc_law(state.e_hat, K, observer.b), cfg.u_limit)
    controls = [u]

    for _ in range(cfg.steps):
        plant.step(u, cfg.dt)
        t = t + cfg.dt
        e1_next = plant.y - reference.derivatives(t, n + 1)[0]
        ideal_step(traj, reference, cfg.dt)
        previous = e1 if cfg.measurement_hold == "linear" else None
        state = leso_step(state, observer, e1_next, u, cfg.dt, previous)
        e1 = e1_next
        u = clamp(adrc_law(state.e_hat, K, observer.b), cfg.u_limit)
        controls.append(u)
    return np.asarray(controls)


def check_switching(duration=0.05, dt=1e-4):
    disturbance = {"kind": "sinusoid", "amplitude": IDENTITY_AMPLITUDE, "frequency": IDENTITY_FREQUENCY}
    single = _chain_scenario("single", disturbance, [{"order": 3, "omega_o": DEFAULT_OMEGA_O}], dt, duration)
    single_trace = simulate(single, single.observer_configs())
    mismatched = int(np.sum(single_trace["u"] != single_eso_loop(single)))
    results = [_at_most("single-observer", mismatched, 0, "samples where u differs from plain ADRC")]

    pair = [{"order": 3, "omega_o": DEFAULT_OMEGA_O}] * 2
    duplicate = _chain_scenario("duplicate", disturbance, pair, dt, duration)
    trace = simulate(duplicate, duplicate.observer_configs())
    differences = (
        int(np.sum(trace["z_0"] != trace["z_1"])) + int(np.sum(trace["switched"])) + int(np.sum(trace["u"] != single_trace["u"]))
    )
    results.append(_at_most("duplicate-bank", differences, 0, "z mismatches plus switches plus u mismatches"))
    return results


def check_detuned_bank(duration=0.5, dt=1e-4, settle=0.05):
    disturbance = {"kind": "sinusoid", "amplitude": IDENTITY_AMPLITUDE, "frequency": 5.0}
    bank = [{"order": 3, "omega_o": 150.0}, {"order": 3, "omega_o": DEFAULT_OMEGA_O}]
    cfg = _chain_scenario("detuned", disturbance, bank, dt, duration)
    trace = simulate(cfg, cfg.observer_configs())

    selections = np.asarray(window_selections(trace, cfg.window))
    times = trace["t"][cfg.window :: cfg.window]
    steady = selections[times >= settle]
    share = float(np.mean(steady == 1)) if steady.size else 0.0
    return _at_least("detuned-bank", share, DETUNED_SHARE, f"{steady.size} windows after {settle} s")


def check_point_to_point(presets):
    cfg = presets.get("p2p-r10")
    metrics = run_scenario(cfg).metrics

    multi, best, ratio = metrics.iae_ratio()
    detail = f"{metrics.switch_count} switches"
    results = [_at_most("p2p-iae", ratio, IAE_RATIO_LIMIT, f"multi {multi:.6g}, best single {best:.6g}")]

    transients = metrics.transients
    limit = cfg.switch_du_limit if cfg.switch_du_limit is not None else transients["du_other"]
    results.append(_at_most("switch-du", transients["du_switch"], limit, detail))
    results.append(_at_most("switch-dy", transients["dy_switch"], DY_CONTINUITY * transients["dy_other"], detail))
    return results


def check_determinism(presets):
    cfg = presets.get("tiny")
    first = simulate(cfg, cfg.observer_configs()).to_csv()
    second = simulate(cfg, cfg.observer_configs()).to_csv()
    return _at_most("determinism", int(first != second), 0, "trace text differs between reruns")


def verify_suite(omega_o=DEFAULT_OMEGA_O, typo_gains=False, identity_duration=1.0, bound_duration=0.1, seed=0):
    """
    Run every check; returns the report or raises VerificationException
    naming the failed checks.
    """
    if omega_o < DEFAULT_OMEGA_C:
        logger.warning(f"Observer bandwidth {omega_o:g} is below the closed loop bandwidth {DEFAULT_OMEGA_C:g}; expect degraded margins")
    if typo_gains:
        logger.warning("4th order observer runs with 6 omega_o^3 as its third gain")

    presets = ScenarioPresets()
    report = VerificationReport()

    report.add(check_gain_exactness())
    report.add(check_residue_oracle(seed))
    for check in check_identity(omega_o, identity_duration):
        report.add(check)
    report.add(check_decay(omega_o))

    runs = _bound_runs(omega_o, typo_gains, bound_duration, 1e-5)
    for check in check_observer_bounds(runs) + check_tracking_bounds(runs):
        report.add(check)

    for check in check_switching():
        report.add(check)
    report.add(check_detuned_bank())
    for check in check_point_to_point(presets):
        report.add(check)
    report.add(check_determinism(presets))

    logger.info(report.to_text().splitlines()[-1])
    if not report.passed:
        raise VerificationException(f"Verification failed: {', '.join(report.failed)}", report.failed)
    return report
