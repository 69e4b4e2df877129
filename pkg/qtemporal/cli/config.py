"""
Run configuration shared by command-line flags and JSON config files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qtemporal.apps.regimes import ConstraintRegime, RegimeTag
from qtemporal.core.errors import ConfigError
from qtemporal.core.tolerances import CURVE_POINTS, SOLVER_TOL_DEFAULT, SOLVER_TOL_MAX, SOLVER_TOL_MIN

Application = Literal[
    "chsh",
    "tsr",
    "tsr-curve",
    "qrac",
    "selftest",
    "classical-fidelity",
    "sample-span",
    "verify-oracle",
]
SpanScenario = Literal["chsh", "qrac2", "qrac3"]

APPLICATIONS: tuple[str, ...] = get_args(Application)

_REGIME_FREE = ("classical-fidelity", "verify-oracle")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    application: Application
    regime: RegimeTag | None = None
    dim: int | None = Field(default=None, ge=1)
    rank: int | None = Field(default=None, ge=1)
    level: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    tol: float = SOLVER_TOL_DEFAULT

    # qrac: number of encoded bits
    n: int = 2
    # curves: explicit grid, or `points` evenly spaced values
    grid: list[float] | None = None
    points: int = Field(default=CURVE_POINTS, ge=2)
    # selftest: observed 2->1 success probability
    observed: float | None = None
    # sample-span: which scenario to sample for
    scenario: SpanScenario = "chsh"

    input: Path | None = None
    output_dir: Path | None = None
    workers: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_consistency(self) -> RunConfig:
        if not SOLVER_TOL_MIN <= self.tol <= SOLVER_TOL_MAX:
            raise ValueError(f"tol must lie in [{SOLVER_TOL_MIN:g}, {SOLVER_TOL_MAX:g}], got {self.tol:g}")
        if self.rank is not None and self.dim is None:
            raise ValueError("rank requires dim")

        app = self.application
        if app in _REGIME_FREE and self.regime is not None:
            raise ValueError(f"{app} takes no regime")
        if app == "tsr" and self.input is None:
            raise ValueError("tsr requires an input correlation table (input)")
        if app == "qrac" and self.n not in (2, 3):
            raise ValueError(f"n must be 2 or 3, got {self.n}")
        if app == "selftest":
            if self.level < 2:
                raise ValueError("selftest requires level >= 2 (the fidelity functional uses length-3 words)")
            if self.regime not in (None, "dim-rank"):
                raise ValueError("selftest always uses the dim-rank regime")
            if self.observed is not None and self.input is not None:
                raise ValueError("give either observed or input for selftest, not both")
            if self.observed is not None and not 0.0 <= self.observed <= 1.0:
                raise ValueError(f"observed must lie in [0, 1], got {self.observed}")
        if app == "sample-span" and self.regime not in ("dim", "dim-rank"):
            raise ValueError("sample-span requires regime dim or dim-rank")

        if app not in _REGIME_FREE:
            try:
                self.constraint_regime()
            except ConfigError as exc:
                raise ValueError(str(exc)) from exc
        return self

    def constraint_regime(self) -> ConstraintRegime:
        """The regime with per-application defaults filled in."""
        if self.application in ("qrac", "selftest") and self.regime in (None, "dim-rank"):
            return ConstraintRegime(
                "dim-rank",
                dim=self.dim if self.dim is not None else 2,
                rank=self.rank if self.rank is not None else 1,
                seed=self.seed,
            )
        return ConstraintRegime(self.regime or "di", dim=self.dim, rank=self.rank, seed=self.seed)

    def config_hash(self) -> str:
        """Content hash of everything that determines the results."""
        payload = self.model_dump(mode="json", exclude={"output_dir", "workers"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _format_errors(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        field = ".".join(str(loc) for loc in error["loc"]) or "config"
        message = error["msg"].removeprefix("Value error, ")
        parts.append(f"{field}: {message}")
    return "; ".join(parts)


def build_config(values: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {_format_errors(exc)}") from exc


def load_config_file(path: Path) -> RunConfig:
    try:
        values = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return build_config(values)
