import logging

from harness.config import load_config
from harness.runner import run_scenario, write_outputs
from harness.sweep import DEFAULT_WORKERS, parse_values, run_sweep
from harness.verify import verify_suite
from observer.leso import DEFAULT_OMEGA_O
from presets import ScenarioPresets
from utils.exception_handler import (
    ConfigException,
    DivergenceException,
    PolynomialException,
    VerificationException,
)

## Instantiate Logger
logger = logging.getLogger(__name__)

# Exit statuses of the command line
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2
EXIT_VERIFICATION = 3


class Operations:

    def __init__(self, output_dir=None, long=False) -> None:
        self.output_dir = output_dir
        self.long = long
        self.presets = ScenarioPresets()

    def _run(self, cfg):
        result = run_scenario(cfg)
        write_outputs(result, self.output_dir, long=self.long)
        logger.info(result.metrics.to_text())
        return result

    def run_config(self, path):
        """
        Initiator for running a scenario file
        """

        try:
            self._run(load_config(path))
        except (ConfigException, PolynomialException) as err:
            logger.error(err.message)
            return EXIT_CONFIG
        except DivergenceException as err:
            logger.error(err.message)
            return EXIT_DIVERGED
        else:
            logger.info("Processing Done!!!")
            return EXIT_OK

    def run_preset(self, name):
        """
        Initiator for running a built in scenario
        """

        try:
            self._run(self.presets.get(name))
        except (ConfigException, PolynomialException) as err:
            logger.error(err.message)
            return EXIT_CONFIG
        except DivergenceException as err:
            logger.error(err.message)
            return EXIT_DIVERGED
        else:
            logger.info("Processing Done!!!")
            return EXIT_OK

    def list_presets(self):
        """
        Initiator for listing the built in scenarios
        """

        self.presets.get_list()
        logger.info("Processing Done!!!")
        return EXIT_OK

    def show_preset(self, name):
        """
        Initiator for printing a built in scenario as YAML
        """

        try:
            text = self.presets.describe(name)
        except ConfigException as err:
            logger.error(err.message)
            return EXIT_CONFIG
        else:
            print(text, end="")
            logger.info("Processing Done!!!")
            return EXIT_OK

    def verify(self, omega_o=DEFAULT_OMEGA_O, typo_gains=False):
        """
        Initiator for the numerical verification suite
        """

        try:
            verify_suite(omega_o=omega_o, typo_gains=typo_gains)
        except (ConfigException, PolynomialException) as err:
            logger.error(err.message)
            return EXIT_CONFIG
        except VerificationException as err:
            logger.error(err.message)
            return EXIT_VERIFICATION
        except DivergenceException as err:
            logger.error(err.message)
            return EXIT_DIVERGED
        else:
            logger.info("Processing Done!!!")
            return EXIT_OK

    def sweep(self, path, param, values, workers=DEFAULT_WORKERS):
        """
        Initiator for sweeping one field of a scenario file
        """

        try:
            cfg = load_config(path)
            out_dir = self.output_dir or cfg.output_dir()
            run_sweep(cfg, param, parse_values(values), max_workers=workers, out_dir=out_dir, long=self.long)
        except (ConfigException, PolynomialException) as err:
            logger.error(err.message)
            return EXIT_CONFIG
        except DivergenceException as err:
            logger.error(err.message)
            return EXIT_DIVERGED
        else:
            logger.info("Processing Done!!!")
            return EXIT_OK
