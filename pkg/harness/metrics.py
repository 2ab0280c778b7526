import logging
from dataclasses import dataclass, field

import numpy as np

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Multi-observer IAE may exceed the best single law by at most this factor
IAE_RATIO_LIMIT = 1.02

MULTI_LAW = "multi-eso"


def iae(trace, dt=None, method="left", column="ebar1"):
    """
    Integral of |e_bar_1| over the trace.

    left:      sum_{k<N} |e(t_k)| dt
    trapezoid: sum_{k<N} (|e(t_k)| + |e(t_k+1)|) dt / 2

    Accepts a SimulationTrace or a plain sample array with dt.
    """
    if hasattr(trace, "frame"):
        values = trace[column]
        dt = trace.dt if dt is None else dt
    else:
        values = np.asarray(trace, dtype=float)

    if values.size == 0:
        raise ConfigException("trace", "cannot integrate an empty trace")
    if values.size == 1:
        return 0.0
    if dt is None or dt <= 0:
        raise ConfigException("dt", f"need a positive step to integrate, got {dt}")

    magnitude = np.abs(values)
    if method == "left":
        return float(np.sum(magnitude[:-1]) * dt)
    if method == "trapezoid":
        return float(np.sum(magnitude[:-1] + magnitude[1:]) * dt / 2.0)
    raise ConfigException("iae_method", f"expected 'left' or 'trapezoid', got '{method}'")


def switch_transients(trace):
    """
    Largest |du| and |dy| over switch steps against the same over ordinary steps.

    A switch recorded at sample k changes u_k, so it shows in u_k - u_{k-1}
    and first moves the output over the next period, y_{k+1} - y_k.
    """
    u = trace["u"]
    y = trace["y"]
    switched = trace["switched"].astype(bool)
    du = np.abs(np.diff(u))
    dy = np.abs(np.diff(y))
    du_mask = switched[1:]
    dy_mask = switched[:-1]

    def peak(values, mask):
        return float(np.max(values[mask])) if mask.any() else 0.0

    return {
        "du_switch": peak(du, du_mask),
        "du_other": peak(du, ~du_mask),
        "dy_switch": peak(dy, dy_mask),
        "dy_other": peak(dy, ~dy_mask),
    }


def window_selections(trace, window):
    """Observer selected at the end of every complete window."""
    return [int(value) for value in trace["active"][window::window]]


@dataclass
class MetricsReport:
    sup_error: dict = field(default_factory=dict)
    switch_count: int = 0
    selections: list = field(default_factory=list)
    transients: dict = field(default_factory=dict)
    trial_iae: dict = field(default_factory=dict)
    switch_du_limit: float = None

    multi_law = MULTI_LAW

    @property
    def mean_iae(self):
        return {law: float(np.mean(values)) for law, values in self.trial_iae.items()}

    @property
    def iae(self):
        """IAE per control law, averaged over trials."""
        return self.mean_iae

    def iae_ratio(self):
        """(multi IAE, best single IAE, ratio) or None without baselines."""
        singles = {law: value for law, value in self.mean_iae.items() if law != self.multi_law}
        if not singles or self.multi_law not in self.mean_iae:
            return None
        best = min(singles.values())
        multi = self.mean_iae[self.multi_law]
        ratio = multi / best if best > 0 else (1.0 if multi == 0 else np.inf)
        return multi, best, ratio

    def transient_ok(self):
        if not self.transients:
            return True
        limit = self.switch_du_limit
        if limit is None:
            limit = self.transients["du_other"]
        return self.transients["du_switch"] <= limit

    def to_text(self):
        lines = ["law                      IAE            sup|ebar1|"]
        for law, value in self.mean_iae.items():
            lines.append(f"{law:<24} {value:<14.6g} {self.sup_error.get(law, float('nan')):.6g}")

        trials = len(next(iter(self.trial_iae.values()), []))
        if trials > 1:
            for law, values in self.trial_iae.items():
                lines.append(f"{law:<24} per trial: " + ", ".join(f"{value:.6g}" for value in values))

        lines.append(f"switches: {self.switch_count}, windows: {len(self.selections)}")
        if self.transients:
            t = self.transients
            lines.append(
                f"switch transients: |du| {t['du_switch']:.6g} (other steps {t['du_other']:.6g}), "
                f"|dy| {t['dy_switch']:.6g} (other steps {t['dy_other']:.6g})"
            )

        compared = self.iae_ratio()
        if compared is not None:
            multi, best, ratio = compared
            verdict = "ok" if ratio <= IAE_RATIO_LIMIT else "above"
            lines.append(f"multi/best single IAE: {ratio:.4f} ({verdict}, limit {IAE_RATIO_LIMIT})")
        return "\n".join(lines)
