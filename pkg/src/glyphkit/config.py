"""Runtime configuration: documented defaults, JSON loading, validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .labels import Thresholds
from .losses import CostMatrix, LossWeights
from .raster import DEFAULT_VIEW_BOX

__all__ = ["Config", "RasterConfig", "ChamferConfig", "SteConfig", "load_config", "config_to_dict"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RasterConfig:
    resolution: int = 128
    view_box: tuple[float, float, float, float] = DEFAULT_VIEW_BOX
    fill_rule: str = "nonzero"

    def __post_init__(self) -> None:
        if self.resolution < 8:
            raise ConfigError("raster.resolution must be at least 8")
        x0, y0, x1, y1 = self.view_box
        if x1 <= x0 or y1 <= y0:
            raise ConfigError("raster.view_box must have positive area")
        if self.fill_rule not in ("nonzero", "evenodd"):
            raise ConfigError(f"unknown raster.fill_rule {self.fill_rule!r}")


@dataclass(frozen=True)
class ChamferConfig:
    n_per_segment: int = 32
    arclength: bool = False

    def __post_init__(self) -> None:
        if self.n_per_segment < 2:
            raise ConfigError("chamfer.n_per_segment must be at least 2")


@dataclass(frozen=True)
class SteConfig:
    temperature: float = 1.0
    soft_branch_grads: bool = False

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ConfigError("ste.temperature must be positive")


@dataclass(frozen=True)
class Config:
    thresholds: Thresholds = field(default_factory=Thresholds)
    confidence: float = 0.75
    cost_matrix: CostMatrix = field(default_factory=CostMatrix)
    loss_weights: LossWeights = field(default_factory=LossWeights)
    raster: RasterConfig = field(default_factory=RasterConfig)
    chamfer: ChamferConfig = field(default_factory=ChamferConfig)
    ste: SteConfig = field(default_factory=SteConfig)
    output_precision: int = 9

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ConfigError("confidence must be in [0, 1]")
        if not 1 <= self.output_precision <= 17:
            raise ConfigError("output_precision must be in [1, 17]")


_SECTIONS = {
    "thresholds",
    "confidence",
    "cost_matrix",
    "cost_matrix_literal",
    "loss_weights",
    "raster",
    "chamfer",
    "ste",
    "output_precision",
}


def load_config(path: str | None = None) -> Config:
    """Build a Config from a JSON file; missing fields take the defaults."""
    if path is None:
        return Config()
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    unknown = set(data) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")

    try:
        kwargs = {}
        if "thresholds" in data:
            kwargs["thresholds"] = Thresholds(**data["thresholds"])
        if "confidence" in data:
            kwargs["confidence"] = float(data["confidence"])
        if "cost_matrix" in data:
            rows = tuple(tuple(float(v) for v in r) for r in data["cost_matrix"])
            kwargs["cost_matrix"] = CostMatrix(
                rows, validate=not data.get("cost_matrix_literal", False)
            )
        if "loss_weights" in data:
            kwargs["loss_weights"] = LossWeights(**data["loss_weights"])
        if "raster" in data:
            raw = dict(data["raster"])
            if "view_box" in raw:
                raw["view_box"] = tuple(float(v) for v in raw["view_box"])
            kwargs["raster"] = RasterConfig(**raw)
        if "chamfer" in data:
            kwargs["chamfer"] = ChamferConfig(**data["chamfer"])
        if "ste" in data:
            kwargs["ste"] = SteConfig(**data["ste"])
        if "output_precision" in data:
            kwargs["output_precision"] = int(data["output_precision"])
        return Config(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: Config) -> dict:
    """Effective settings in the same shape load_config accepts."""
    return {
        "thresholds": asdict(cfg.thresholds),
        "confidence": cfg.confidence,
        "cost_matrix": [list(r) for r in cfg.cost_matrix.rows],
        "cost_matrix_literal": not cfg.cost_matrix.validate,
        "loss_weights": asdict(cfg.loss_weights),
        "raster": {
            "resolution": cfg.raster.resolution,
            "view_box": list(cfg.raster.view_box),
            "fill_rule": cfg.raster.fill_rule,
        },
        "chamfer": asdict(cfg.chamfer),
        "ste": asdict(cfg.ste),
        "output_precision": cfg.output_precision,
    }
