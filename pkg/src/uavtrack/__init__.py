"""Coordinated multi-UAV formation and moving-target tracking simulator."""

from .config import ScenarioConfig, load_config
from .engine import RunLog, World, run, step

__all__ = ["ScenarioConfig", "load_config", "RunLog", "World", "run", "step"]
