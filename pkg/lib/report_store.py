#!/usr/bin/env python3
"""
Report storage on the local filesystem.

Every write goes to a temporary sibling first and is moved into place with
os.replace, so a failed run never leaves a partial file behind.
"""

import json
import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Dict, Optional, Union

from lib.matrix_io import dump_matrix
from semihilbert_radius.config import REPORT_DIR
from semihilbert_radius.errors import ReportIOError
from semihilbert_radius.harness.ensembles import Instance

logger = logging.getLogger(__name__)


def _write_into(directory: Path, name: str, text: str):
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f'.{name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, directory / name)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ReportStore:
    def __init__(self, root: Optional[Union[str, Path]] = None):
        self.root = Path(root or REPORT_DIR)

    def _ensure_root(self):
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ReportIOError(f"cannot create {self.root}: {exc}") from exc

    def write_text(self, name: str, text: str) -> Path:
        self._ensure_root()
        try:
            _write_into(self.root, name, text)
        except OSError as exc:
            raise ReportIOError(f"cannot write {self.root / name}: {exc}") from exc
        logger.info("wrote %s", self.root / name)
        return self.root / name

    def write_json(self, name: str, document: dict) -> Path:
        return self.write_text(name, json.dumps(document, indent=2, sort_keys=True) + '\n')

    def write_instance(self, name: str, instance: Instance, extra: Optional[Dict] = None) -> Path:
        """
        Directory with space.json, T1.json..., S1.json... (MatrixFile) and
        instance.json; built in a temporary directory, then renamed.
        """
        self._ensure_root()
        target = self.root / name
        try:
            staging = Path(tempfile.mkdtemp(dir=self.root, prefix=f'.{name}.'))
        except OSError as exc:
            raise ReportIOError(f"cannot stage {target}: {exc}") from exc
        try:
            _write_into(staging, 'space.json', dump_matrix(instance.space.A) + '\n')
            for k, op in enumerate(instance.T, start=1):
                _write_into(staging, f'T{k}.json', dump_matrix(op) + '\n')
            for k, op in enumerate(instance.S, start=1):
                _write_into(staging, f'S{k}.json', dump_matrix(op) + '\n')
            if instance.unitary is not None:
                _write_into(staging, 'U.json', dump_matrix(instance.unitary) + '\n')
            meta = dict(instance.describe(), **(extra or {}))
            _write_into(staging, 'instance.json', json.dumps(meta, indent=2, sort_keys=True) + '\n')
            if target.exists():
                shutil.rmtree(target)
            os.replace(staging, target)
        except OSError as exc:
            shutil.rmtree(staging, ignore_errors=True)
            raise ReportIOError(f"cannot write {target}: {exc}") from exc
        logger.info("wrote instance to %s", target)
        return target
