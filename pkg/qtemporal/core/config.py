import os
from dataclasses import dataclass
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[2]

WORKERS_ENV = "QTEMPORAL_WORKERS"


def _load_env_file(env_path: Path) -> None:
    if not env_path.exists():
        return

    for raw_line in env_path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue

        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip().strip("'\"")

        if key and key not in os.environ:
            os.environ[key] = value


_load_env_file(PROJECT_ROOT / ".env")


@dataclass(frozen=True)
class Settings:
    workers: int
    span_cache_dir: Path
    run_log_file: Path
    output_dir: Path


def _default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def _parse_workers(raw: str | None) -> int:
    if raw is None or not raw.strip():
        return _default_workers()
    try:
        workers = int(raw.strip())
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV} must be >= 1, got {workers}")
    return workers


def get_settings() -> Settings:
    # Re-load .env on access so long-lived processes pick up edits.
    _load_env_file(PROJECT_ROOT / ".env")

    return Settings(
        workers=_parse_workers(os.getenv(WORKERS_ENV)),
        span_cache_dir=PROJECT_ROOT / ".qtemporal" / "spans",
        run_log_file=PROJECT_ROOT / ".qtemporal" / "logs" / "run_events.jsonl",
        output_dir=PROJECT_ROOT / "results",
    )
