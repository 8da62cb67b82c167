"""Tunable defaults loader with user overrides."""

import logging
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, field_validator

from zerotap.config import DEFAULT_SETTINGS_PATH
from zerotap.errors import InputFormatError
from zerotap.io import read_json, validation_message
from zerotap.roots import SolverOptions

logger = logging.getLogger(__name__)


class SolverSettings(BaseModel):
    """Aberth iteration limits."""

    max_iter: int = 200
    residual_tol_log: float
    polish_iter: int = 8

    @field_validator("max_iter")
    @classmethod
    def validate_max_iter(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"max_iter must be >= 1, got: {v}")
        return v

    @field_validator("residual_tol_log")
    @classmethod
    def validate_residual_tol_log(cls, v: float) -> float:
        if not v < 0:
            raise ValueError(f"residual_tol_log is a natural log below 0, got: {v}")
        return v

    def options(self) -> SolverOptions:
        return SolverOptions(self.max_iter, self.residual_tol_log, self.polish_iter)


class ProfileSettings(BaseModel):
    """Grid used when neither --grid nor a family-specific grid applies."""

    grid_points: int = 301
    default_grid: tuple[float, float] = (-1.0, 2.0)

    @field_validator("grid_points")
    @classmethod
    def validate_grid_points(cls, v: int) -> int:
        if v < 2:
            raise ValueError(f"grid_points must be >= 2, got: {v}")
        return v

    @field_validator("default_grid")
    @classmethod
    def validate_default_grid(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not v[0] < v[1]:
            raise ValueError(f"default_grid must be an increasing pair t_min < t_max, got: {list(v)}")
        return v


class DetectorSettings(BaseModel):
    min_piece_intervals: int = 3
    min_tol: float = 1e-3
    gap_factor: float = 1.05
    max_slope_tol: float = 0.5

    @field_validator("gap_factor")
    @classmethod
    def validate_gap_factor(cls, v: float) -> float:
        if v < 1.0:
            raise ValueError(f"gap_factor must be >= 1 so the tolerance covers the sandwich gap, got: {v}")
        return v

    @field_validator("max_slope_tol")
    @classmethod
    def validate_max_slope_tol(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError(f"max_slope_tol must lie in (0, 1], got: {v}")
        return v


class MetricSettings(BaseModel):
    annulus_delta: float = 0.1
    exclusion_factor: float = 0.05

    @field_validator("annulus_delta")
    @classmethod
    def validate_annulus_delta(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError(f"annulus_delta must lie in (0, 1), got: {v}")
        return v


class TruncationSettings(BaseModel):
    radius: float = 4.0
    margin: float = 700.0


class PlotSettings(BaseModel):
    enabled: bool = True
    size_px: int = 1000
    dpi: int = 100


class Settings(BaseModel):
    """Root settings object."""

    version: str
    description: str | None = None
    solver: SolverSettings
    profile: ProfileSettings = Field(default_factory=ProfileSettings)
    detector: DetectorSettings = Field(default_factory=DetectorSettings)
    metrics: MetricSettings = Field(default_factory=MetricSettings)
    truncation: TruncationSettings = Field(default_factory=TruncationSettings)
    plots: PlotSettings = Field(default_factory=PlotSettings)


def deep_merge(base: dict, override: dict) -> dict:
    """Deep merge two dictionaries, with override taking precedence."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def load_settings(user_path: Path | None = None) -> Settings:
    """Packaged defaults, optionally deep-merged with a user file, then validated."""
    data = read_json(DEFAULT_SETTINGS_PATH)
    if user_path is not None:
        logger.info(f"Loading user settings from {user_path}")
        data = deep_merge(data, read_json(Path(user_path)))
    try:
        return Settings(**data)
    except ValidationError as e:
        raise InputFormatError(f"settings {validation_message(e)}") from e
