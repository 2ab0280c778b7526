import logging
from concurrent.futures import ThreadPoolExecutor

import yaml

from harness.config import with_override
from harness.runner import run_scenario, write_outputs
from utils.exception_handler import ConfigException

## Instantiate Logger
logger = logging.getLogger(__name__)

# Worker threads when the caller does not choose
DEFAULT_WORKERS = 4


def parse_values(text):
    """'1000, 1500, 2e3' -> [1000, 1500, 2000.0]; each item is read as a YAML scalar."""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    if not items:
        raise ConfigException("values", "the sweep needs at least one value")
    try:
        return [yaml.safe_load(item) for item in items]
    except yaml.YAMLError as err:
        raise ConfigException("values", f"cannot read '{text}': {err}")


def sweep_configs(cfg, param_path, values):
    """One resolved scenario per value, each renamed so its outputs never collide."""
    configs = []
    for value in values:
        swept = with_override(cfg, param_path, value)
        configs.append(with_override(swept, "name", f"{cfg.name}-{param_path}-{value}"))
    return configs


def run_sweep(cfg, param_path, values, max_workers=DEFAULT_WORKERS, out_dir=None, long=False):
    """
    Run the scenario once per value of one config field.

    Every run is an independent simulation on its own worker thread and
    writes its own files. Results come back in the order of values.
    """
    configs = sweep_configs(cfg, param_path, values)
    logger.info(f"Sweeping {param_path} over {len(configs)} values on {max_workers} workers")

    def job(swept):
        result = run_scenario(swept)
        if out_dir is not None:
            write_outputs(result, out_dir, long=long)
        return result

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(job, configs))

    for value, result in zip(values, results):
        iae = result.metrics.iae
        logger.info(f"{param_path}={value}: " + ", ".join(f"{law} {score:.6g}" for law, score in iae.items()))
    return results
