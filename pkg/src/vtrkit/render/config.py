from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Mapping

TRANSFORM_KINDS = ("persp_x", "persp_y", "trap_x", "trap_y", "skew_x", "skew_y", "rotate")
DEFAULT_WEIGHTS = {"persp_x": 1, "persp_y": 1, "trap_x": 1, "trap_y": 1, "skew_x": 2, "skew_y": 2, "rotate": 3}

_PROBS = ("vertical_prob", "offset_prob", "flow_prob", "curve_prob", "style_prob", "border_prob",
          "transform_prob", "anomaly_prob", "border_alpha")


@dataclass(frozen=True)
class EngineConfig:
    """Rendering-engine knobs. Defaults follow the canonical/anomaly parameter table;
    fields under "artifact" stand in for the font pool."""

    canvas_size: tuple[int, int] = (1024, 1024)  # width, height
    vertical_prob: float = 0.10
    elements_per_sample: tuple[int, int] = (3, 10)
    text_len: tuple[int, int] = (1, 25)
    font_size_px: tuple[int, int] = (50, 100)
    # layout
    h_spacing_px: tuple[int, int] = (50, 200)
    line_spacing_px: tuple[int, int] = (10, 20)
    length_ratio: tuple[float, float] = (0.8, 1.0)
    offset_prob: float = 0.20
    offset_px: tuple[int, int] = (10, 30)
    margin_px: int = 15
    flow_prob: float = 0.80
    curve_prob: float = 0.20
    # style
    style_prob: float = 0.25
    border_prob: float = 1.0
    border_size_ratio: tuple[float, float] = (0.05, 0.15)
    border_alpha: float = 1.0
    # geometry
    transform_prob: float = 0.50
    transform_weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    persp_x_percent: tuple[float, float] = (0.8, 0.8)
    persp_y_percent: tuple[float, float] = (0.8, 1.0)
    trap_x_percent: tuple[float, float] = (0.8, 1.0)
    trap_y_percent: tuple[float, float] = (0.8, 1.0)
    skew_x_deg: tuple[float, float] = (0.0, 30.0)
    skew_y_deg: tuple[float, float] = (0.0, 10.0)
    rotate_deg: tuple[float, float] = (0.0, 10.0)
    # anomalies
    anomaly_prob: float = 0.50
    op_probs: tuple[float, float, float] = (0.4, 0.4, 0.4)  # delete, insert, swap
    # artifact
    stroke_width_ratio: tuple[float, float] = (0.06, 0.10)
    glyph_scale: tuple[float, float] = (0.9, 1.0)
    curve_depth_ratio: tuple[float, float] = (0.1, 0.5)
    min_contrast: float = 40.0
    language: str = "zh"
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, list):
                object.__setattr__(self, f.name, tuple(v))
        for name in _PROBS:
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        for p in self.op_probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"op_probs must lie in [0, 1], got {self.op_probs}")
        if len(self.op_probs) != 3:
            raise ValueError("op_probs needs (delete, insert, swap)")
        if abs(self.flow_prob + self.curve_prob - 1.0) > 1e-9:
            raise ValueError("flow_prob + curve_prob must equal 1")
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name not in ("canvas_size", "op_probs") and isinstance(v, tuple):
                if len(v) != 2 or v[0] > v[1]:
                    raise ValueError(f"{f.name} must be a (low, high) range, got {v}")
        unknown = set(self.transform_weights) - set(TRANSFORM_KINDS)
        if unknown:
            raise ValueError(f"unknown transform kinds {sorted(unknown)}")
        if any(w < 0 for w in self.transform_weights.values()) or sum(self.transform_weights.values()) <= 0:
            raise ValueError("transform weights must be non-negative with a positive sum")
        if self.elements_per_sample[0] < 1 or self.text_len[0] < 1 or self.font_size_px[0] < 8:
            raise ValueError("element count, text length and font size must be positive (font >= 8 px)")
        w, h = self.canvas_size
        if w <= 2 * self.margin_px or h <= 2 * self.margin_px:
            raise ValueError("canvas too small for its margins")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["transform_weights"] = dict(self.transform_weights)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "EngineConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text) or {}
        else:
            data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a map")
        return cls.from_dict(data)
