"""Stroke-based text-image renderer with structural-anomaly labels."""

from vtrkit.render.config import DEFAULT_WEIGHTS, TRANSFORM_KINDS, EngineConfig
from vtrkit.render.layout import Arc, Placement, PlacementError, layout_curve, layout_flow
from vtrkit.render.raster import rasterize_glyph, style_border
from vtrkit.render.synth import (
    RenderSample,
    SampleFailure,
    load_corpus,
    plan_text,
    synthesize_dataset,
    synthesize_sample,
)
from vtrkit.render.transforms import Transform, apply_transform, choose_transform, transform_points

__all__ = [
    "DEFAULT_WEIGHTS", "TRANSFORM_KINDS", "EngineConfig",
    "Arc", "Placement", "PlacementError", "layout_curve", "layout_flow",
    "rasterize_glyph", "style_border",
    "RenderSample", "SampleFailure", "load_corpus", "plan_text", "synthesize_dataset", "synthesize_sample",
    "Transform", "apply_transform", "choose_transform", "transform_points",
]
