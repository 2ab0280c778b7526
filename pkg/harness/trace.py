"""
Simulation traces and their CSV form.

--> Columns (fixed order)

    t, r, y, x1_star, e1, ebar1, u, active, switched,
    then per observer j: e1_tilde_j, z_j, acc_j, ext_hat_j,
    then disturbance (ground truth total disturbance f - r_{n+1})

--> File layout

    # label: multi-eso
    # config_hash: <sha256>
    # config:
    #   name: ...
    t,r,y,...
    0.0,...

The header is YAML behind "# " so traces stay self describing and the body
stays a plain CSV any plotting tool reads.
"""

import io
import logging
from dataclasses import dataclass, field

import pandas as pd
import yaml

from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)

BASE_COLUMNS = ["t", "r", "y", "x1_star", "e1", "ebar1", "u", "active", "switched"]
OBSERVER_COLUMNS = ["e1_tilde", "z", "acc", "ext_hat"]
TAIL_COLUMNS = ["disturbance"]

# repr-exact floats keep reruns byte identical and lossless
FLOAT_FORMAT = "%.17g"


def trace_columns(bank_size):
    observer = [f"{name}_{idx}" for idx in range(bank_size) for name in OBSERVER_COLUMNS]
    return BASE_COLUMNS + observer + TAIL_COLUMNS


@dataclass
class SimulationTrace:
    frame: pd.DataFrame
    label: str = "multi-eso"
    bank_size: int = 1
    header: dict = field(default_factory=dict)

    @classmethod
    def from_records(cls, records, label, bank_size, header=None):
        frame = pd.DataFrame.from_records(records, columns=trace_columns(bank_size))
        frame["active"] = frame["active"].astype(int)
        frame["switched"] = frame["switched"].astype(int)
        return cls(frame=frame, label=label, bank_size=bank_size, header=dict(header or {}))

    def __len__(self):
        return len(self.frame)

    def __getitem__(self, column):
        return self.frame[column].to_numpy()

    @property
    def dt(self):
        t = self.frame["t"].to_numpy()
        return float(t[1] - t[0]) if len(t) > 1 else 0.0

    def long_format(self):
        """Plot ready (t, variable, value) rows."""
        return self.frame.melt(id_vars=["t"], var_name="variable", value_name="value")

    def to_csv(self, path=None, long=False):
        """Write (or return, when path is None) the CSV text with its YAML header."""
        header = {"label": self.label, **self.header}
        lines = yaml.safe_dump(header, sort_keys=False).splitlines()
        buffer = io.StringIO()
        buffer.write("".join(f"# {line}\n" for line in lines))

        body = self.long_format() if long else self.frame
        body.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

        text = buffer.getvalue()
        if path is None:
            return text
        with open(path, "w", newline="") as handle:
            handle.write(text)
        logger.info(f"Trace '{self.label}' written to {path}")
        return text


def read_trace(path):
    """Load a wide CSV trace written by SimulationTrace.to_csv."""
    header_lines = []
    with open(path) as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            header_lines.append(line[2:] if line.startswith("# ") else line[1:])

    header = yaml.safe_load("".join(header_lines)) or {}
    frame = pd.read_csv(path, comment="#")
    if "t" not in frame.columns or "variable" in frame.columns:
        raise ConfigException("path", f"{path} is not a wide trace file")

    bank_size = sum(1 for column in frame.columns if column.startswith("z_"))
    label = header.pop("label", "trace")
    return SimulationTrace(frame=frame, label=label, bank_size=bank_size, header=header)
