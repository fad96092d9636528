import json
import logging
import os
import sys
import tempfile
from typing import Any, Dict, Optional

import pandas as pd

from ..models.serialization import to_native
from ..version import __csv_schema__, __version__


class FileService:
    """Writes run artifacts. Files appear once, complete, via a temp-file rename."""

    def __init__(self):
        logging.debug("Initializing FileService")

    def _write_atomic(self, content: str, file_path: str):
        folder = os.path.dirname(os.path.abspath(file_path))
        os.makedirs(folder, exist_ok=True)
        handle, temp_path = tempfile.mkstemp(dir=folder, prefix=".turbox-", suffix=".tmp")
        try:
            with os.fdopen(handle, "w", encoding="utf-8", newline="") as file:
                file.write(content)
            os.replace(temp_path, file_path)
        except OSError:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise

    def _emit(self, content: str, file_path: Optional[str]):
        if file_path is None:
            sys.stdout.write(content)
            sys.stdout.flush()
            return
        try:
            logging.debug(f"Writing {len(content)} characters to {file_path}")
            self._write_atomic(content, file_path)
            logging.info(f"Saved {file_path}")
        except OSError as e:
            logging.error(f"Failed to write {file_path}: {e}")
            raise

    def save_json(self, document: Dict[str, Any], file_path: Optional[str] = None):
        payload = {"version": __version__, **to_native(document)}
        self._emit(json.dumps(payload, indent=4) + "\n", file_path)

    def save_table(self, table: pd.DataFrame, file_path: Optional[str] = None):
        header = f"# {__csv_schema__} ({__version__}) columns: {','.join(map(str, table.columns))}\n"
        self._emit(header + table.to_csv(index=False, lineterminator="\n"), file_path)

    @staticmethod
    def load_json(file_path: str) -> Dict[str, Any]:
        with open(file_path, "r", encoding="utf-8") as file:
            return json.load(file)

    @staticmethod
    def load_table(file_path: str) -> pd.DataFrame:
        return pd.read_csv(file_path, comment="#")
