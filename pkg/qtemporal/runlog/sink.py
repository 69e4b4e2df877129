"""
Central run-event sink: append-only JSONL file.
"""

from __future__ import annotations

import json
from pathlib import Path
from threading import Lock
from typing import Any

from qtemporal.core.config import get_settings


class RunEventSink:
    def __init__(self, log_file: Path | None = None) -> None:
        self._log_file = log_file
        self._lock = Lock()
        self._enabled = True

    def get_log_file(self) -> Path:
        return self._log_file or get_settings().run_log_file

    def set_log_file(self, log_file: Path | None) -> None:
        with self._lock:
            self._log_file = log_file

    def set_enabled(self, enabled: bool) -> None:
        with self._lock:
            self._enabled = enabled

    def _write_jsonl(self, record: dict[str, Any]) -> None:
        with self._lock:
            if not self._enabled:
                return
            log_file = self.get_log_file()
            log_file.parent.mkdir(parents=True, exist_ok=True)
            with open(log_file, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, ensure_ascii=True) + "\n")

    def write(self, record: dict[str, Any]) -> None:
        self._write_jsonl(record)


run_sink = RunEventSink()


def write_run_event(record: dict[str, Any]) -> None:
    run_sink.write(record)
