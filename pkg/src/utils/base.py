"""
Base classes and metaclasses for the application.
"""
import threading
from typing import Any, Dict, Tuple


class Base(type):
    """
    Ensures only one instance of a class exists per key.
    Thread-safe implementation for shared resources.

    The key is the first positional argument (or the ``key`` keyword) passed
    to the constructor, so e.g. one report writer exists per output directory.
    """
    _instances: Dict[Tuple[type, Any], Any] = {}
    _lock = threading.Lock()

    def __call__(cls, *args, **kwargs):
        """
        Returns existing instance for the key or creates new one if none exists.
        """
        key = (cls, cls._instance_key(*args, **kwargs))
        # Thread-safe check and create
        if key not in cls._instances:
            with cls._lock:
                if key not in cls._instances:
                    instance = super().__call__(*args, **kwargs)
                    cls._instances[key] = instance
        return cls._instances[key]

    @staticmethod
    def _instance_key(*args, **kwargs) -> Any:
        if 'key' in kwargs:
            return str(kwargs['key'])
        if args:
            return str(args[0])
        return None

    @classmethod
    def clear_instances(cls):
        """Clear all instances (useful for testing)."""
        with cls._lock:
            cls._instances.clear()
