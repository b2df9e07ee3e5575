"""
Report emission: one JSON file per analysis unit plus a run manifest.

All analysis threads writing into one output directory share a single
ReportWriter, which serializes the writes.
"""
import json
import logging
import math
import os
import threading
from typing import Any, Dict, List

import numpy as np

from embeddings.store import EmbeddingSpace, save_embeddings
from utils.base import Base

logger = logging.getLogger(__name__)

MANIFEST = 'run_manifest.json'
REPORT_SUFFIXES = ('.json', '.txt', '.vec')


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays, tuples and non-finite floats into plain JSON values.

    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def dumps(payload: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + '\n'


class ReportWriter(metaclass=Base):
    """
    Serialized writer for one output directory.

    Reports never carry timestamps, so identical inputs give byte-identical files.
    """

    def __init__(self, output_dir: str):
        """
        Args:
            output_dir: Directory receiving every report of the run
        """
        self.output_dir = output_dir
        self._lock = threading.Lock()
        os.makedirs(output_dir, exist_ok=True)
        logger.info(f"Report writer initialized for {output_dir}")

    def path(self, relative: str) -> str:
        return os.path.join(self.output_dir, relative)

    def write_json(self, relative: str, payload: Dict[str, Any]) -> str:
        """Write one JSON report and return its path."""
        return self.write_text(relative, dumps(payload))

    def write_text(self, relative: str, text: str) -> str:
        """Write one text artifact and return its path."""
        target = self.path(relative)
        with self._lock:
            os.makedirs(os.path.dirname(target) or '.', exist_ok=True)
            with open(target, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
        logger.debug(f"Wrote {target}")
        return target

    def write_vectors(self, relative: str, space: EmbeddingSpace, precision: int = 17) -> str:
        """Write a word-vector file (e.g. a serialized gradient) and return its path."""
        target = self.path(relative)
        with self._lock:
            os.makedirs(os.path.dirname(target) or '.', exist_ok=True)
            save_embeddings(space, target, precision=precision)
        return target

    def read_json(self, relative: str) -> Dict[str, Any]:
        with open(self.path(relative), 'r', encoding='utf-8') as f:
            return json.load(f)

    def report_files(self) -> List[str]:
        """Every report below the output directory, relative and sorted."""
        found = []
        for root, _, files in os.walk(self.output_dir):
            for name in files:
                relative = os.path.relpath(os.path.join(root, name), self.output_dir).replace(os.sep, '/')
                if relative != MANIFEST and name.endswith(REPORT_SUFFIXES):
                    found.append(relative)
        return sorted(found)

    def write_manifest(self, config: Dict[str, Any]) -> str:
        """Run-level manifest listing every report currently in the directory."""
        return self.write_json(MANIFEST, {'config': config, 'reports': self.report_files()})
