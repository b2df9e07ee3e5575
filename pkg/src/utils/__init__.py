"""
Utility modules for configuration, errors, shared base classes and worker plumbing.
"""
from .config import Config, RunConfig
from .base import Base
from .errors import SSDError
from .parallel import run_ordered, spawn_generators

__all__ = ['Config', 'RunConfig', 'Base', 'SSDError', 'run_ordered', 'spawn_generators']
