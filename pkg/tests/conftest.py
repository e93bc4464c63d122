import json
import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cqedsim.model import (  # noqa: E402
    DriveTone,
    ExperimentConfig,
    HilbertSpec,
    SolverOptions,
    SystemParams,
    validate_params,
    validate_tone,
)

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


@pytest.fixture(scope="session")
def table_s1():
    """Device constants used throughout (MHz)."""
    return validate_params(SystemParams(
        omega_q=5311.0, omega_c=3579.0, alpha=229.9, kerr_c=0.0022, chi=1.923))


@pytest.fixture(scope="session")
def hilbert():
    return HilbertSpec(n_q=4, n_c=12)


@pytest.fixture(scope="session")
def fig1_qubit_tone(table_s1):
    return validate_tone(DriveTone("qubit", 7.63, -20.0), table_s1)


@pytest.fixture(scope="session")
def table_s1_config_text():
    with open(os.path.join(CONFIG_DIR, "tableS1.json")) as fh:
        return fh.read()


@pytest.fixture()
def base_config(table_s1, hilbert):
    return ExperimentConfig(system=table_s1, drives=(), hilbert=hilbert,
                            solver=SolverOptions())


def config_with_experiment(cfg, experiment):
    return ExperimentConfig(system=cfg.system, drives=cfg.drives,
                            hilbert=cfg.hilbert, solver=cfg.solver,
                            experiment=experiment)


@pytest.fixture()
def tmp_config_path(tmp_path, table_s1_config_text):
    path = tmp_path / "config.json"
    path.write_text(table_s1_config_text)
    return str(path)


def make_config(**kwargs):
    """Small-truncation config for fast experiment tests."""
    system = validate_params(SystemParams(
        omega_q=5311.0, omega_c=3579.0, alpha=229.9, kerr_c=0.0022,
        chi=1.923))
    defaults = dict(system=system, drives=(), hilbert=HilbertSpec(4, 6),
                    solver=SolverOptions(rtol=1e-8, atol=1e-10))
    defaults.update(kwargs)
    return ExperimentConfig(**defaults)
