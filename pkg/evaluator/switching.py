import logging
from dataclasses import dataclass, field

import numpy as np

from utils.exception_handler import ConfigException, DivergenceException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Control periods per switching decision
DEFAULT_WINDOW = 20


@dataclass
class SwitchIndex:
    """
    Windowed |z| accumulator that picks the observer to control with.

    Every control period adds |z_j| to observer j's accumulator. After
    `window` periods the observer with the smallest sum is selected (a tie
    with the current one keeps the current one) and all sums restart from
    zero. Observers that diverged are excluded from the comparison.

    With hysteresis h > 0 the challenger's sum has to be below (1 - h)
    times the current observer's sum before control is handed over.
    """

    size: int
    window: int = DEFAULT_WINDOW
    hysteresis: float = 0.0
    selected: int = 0
    accumulators: np.ndarray = None
    active: np.ndarray = None
    count: int = 0
    switches: int = 0
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.size < 1:
            raise ConfigException("observers", "the bank needs at least one observer")
        if int(self.window) != self.window or self.window < 1:
            raise ConfigException("window", f"must be a positive integer, got {self.window}")
        if not 0 <= self.selected < self.size:
            raise ConfigException("initial_observer", f"index {self.selected} outside the bank of {self.size}")
        if not 0.0 <= self.hysteresis < 1.0:
            raise ConfigException("hysteresis", f"must be in [0, 1), got {self.hysteresis}")

        self.window = int(self.window)
        self.accumulators = np.zeros(self.size)
        self.active = np.ones(self.size, dtype=bool)

    def drop(self, index):
        """Remove a diverged observer; if it was selected, move to the best remaining one now."""
        self.active[index] = False
        self.accumulators[index] = np.inf
        if not self.active.any():
            raise DivergenceException("Every observer in the bank diverged")

        if self.selected == index:
            candidates = np.flatnonzero(self.active)
            self.selected = int(candidates[np.argmin(self.accumulators[candidates])])
            self.switches += 1
            logger.warning(f"Observer {index} dropped while selected, switched to observer {self.selected}")
        else:
            logger.warning(f"Observer {index} dropped from candidacy")


def switch_update(idx, z_values):
    """Accumulate |z| and, at a window boundary, select the argmin. Returns the selected index."""
    z_values = np.asarray(z_values, dtype=float)
    if z_values.shape != (idx.size,):
        raise ConfigException("z_values", f"expected {idx.size} values, got {z_values.size}")

    idx.accumulators[idx.active] += np.abs(z_values[idx.active])
    idx.count += 1
    if idx.count < idx.window:
        return idx.selected

    candidates = np.flatnonzero(idx.active)
    best = int(candidates[np.argmin(idx.accumulators[candidates])])
    if idx.accumulators[best] < (1.0 - idx.hysteresis) * idx.accumulators[idx.selected]:
        logger.debug(f"Switching from observer {idx.selected} to {best}")
        idx.selected = best
        idx.switches += 1

    idx.history.append(idx.selected)
    idx.accumulators[idx.active] = 0.0
    idx.count = 0
    return idx.selected
