import dataclasses
from importlib import resources

import pytest

from uavtrack.config import RingPlacement, load_config
from uavtrack.engine import run


def scenario_path(name: str) -> str:
    return str(resources.files("uavtrack") / "scenarios" / name)


@pytest.fixture(scope="session")
def reference_path():
    return scenario_path("reference.yaml")


@pytest.fixture(scope="session")
def reference_config(reference_path):
    return load_config(reference_path)


@pytest.fixture(scope="session")
def reference_log(reference_config):
    return run(reference_config)


@pytest.fixture(scope="session")
def sweep_logs(reference_config):
    """UAV count -> RunLog for ring starts with M = 1..10."""
    logs = {}
    for m in range(1, 11):
        cfg = dataclasses.replace(reference_config, num_uavs=m, placement=RingPlacement())
        logs[m] = run(cfg)
    return logs
