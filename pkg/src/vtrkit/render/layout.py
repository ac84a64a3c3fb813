"""Element placement on the canvas.

Flow layout fills lines left to right (columns top to bottom in vertical
mode). Curve layout bends the glyph baseline of each element along a
quadratic arc and then flows the enlarged element boxes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from vtrkit.render.config import EngineConfig


class PlacementError(ValueError):
    """The elements cannot be placed inside the canvas margins."""


@dataclass(frozen=True)
class Placement:
    x: int
    y: int
    w: int
    h: int

    def overlaps(self, other: "Placement") -> bool:
        return (self.x < other.x + other.w and other.x < self.x + self.w
                and self.y < other.y + other.h and other.y < self.y + self.h)


def _draw(rng: np.random.Generator, bounds) -> int:
    lo, hi = bounds
    return int(rng.integers(lo, hi + 1))


def layout_flow(
    sizes: Sequence[tuple[int, int]],
    cfg: EngineConfig,
    rng: np.random.Generator,
    vertical: bool = False,
) -> list[Placement]:
    """Place ``(w, h)`` boxes in reading order with sampled spacing.

    Each element reserves a slot enlarged by its (optional) offset, so slots
    and therefore boxes never overlap.
    """
    cw, ch = cfg.canvas_size
    m = cfg.margin_px
    # work in (main, cross) coordinates; main is x for horizontal text
    main_len, cross_len = (ch, cw) if vertical else (cw, ch)
    out = []
    pos, line, line_extent = m, m, 0
    for w, h in sizes:
        along, across = (h, w) if vertical else (w, h)
        if along > main_len - 2 * m or across > cross_len - 2 * m:
            raise PlacementError(f"element of size {w}x{h} does not fit the {cw}x{ch} canvas")
        if rng.random() < cfg.offset_prob:
            o_main, o_cross = _draw(rng, cfg.offset_px), _draw(rng, cfg.offset_px)
        else:
            o_main = o_cross = 0
        slot_main, slot_cross = along + o_main, across + o_cross
        if pos + slot_main > main_len - m:
            if pos == m:
                raise PlacementError("element plus offset wider than the usable canvas")
            line += line_extent + _draw(rng, cfg.line_spacing_px)
            pos, line_extent = m, 0
        if line + slot_cross > cross_len - m:
            raise PlacementError("canvas overflow: elements do not fit")
        a, c = pos + o_main, line + o_cross
        out.append(Placement(c, a, w, h) if vertical else Placement(a, c, w, h))
        line_extent = max(line_extent, slot_cross)
        pos += slot_main + _draw(rng, cfg.h_spacing_px)
    return out


@dataclass(frozen=True)
class Arc:
    """Quadratic baseline ``offset(t) = depth * ((t - L/2) / (L/2))**2`` over ``[0, L]``.

    Positive depth bends the ends toward +y (+x in vertical mode).
    """

    length: float
    depth: float

    def offset(self, t) -> np.ndarray:
        half = self.length / 2.0
        if half <= 0:
            return np.zeros_like(np.asarray(t, dtype=np.float64))
        u = (np.asarray(t, dtype=np.float64) - half) / half
        return self.depth * u * u

    def angle(self, t) -> np.ndarray:
        half = self.length / 2.0
        if half <= 0:
            return np.zeros_like(np.asarray(t, dtype=np.float64))
        slope = 2.0 * self.depth * (np.asarray(t, dtype=np.float64) - half) / (half * half)
        return np.arctan(slope)

    @property
    def extent(self) -> float:
        return abs(self.depth)


def sample_arc(length: float, font_size: float, cfg: EngineConfig, rng: np.random.Generator) -> Arc:
    ratio = float(rng.uniform(*cfg.curve_depth_ratio))
    sign = 1 if rng.random() < 0.5 else -1
    return Arc(length, sign * ratio * font_size)


def glyph_centers(n: int, advance: float, arc: Arc | None = None) -> np.ndarray:
    """Main-axis centers and cross-axis baseline shifts for ``n`` glyph cells.

    Shifts are non-negative, so an element only grows by ``arc.extent``.
    """
    t = (np.arange(n) + 0.5) * advance
    if arc is None:
        return np.c_[t, np.zeros(n)]
    off = arc.offset(t)
    off = off - min(0.0, arc.depth)
    return np.c_[t, off]


def layout_curve(
    sizes: Sequence[tuple[int, int]],
    arcs: Sequence[Arc],
    cfg: EngineConfig,
    rng: np.random.Generator,
    vertical: bool = False,
) -> list[Placement]:
    """Flow the boxes after growing each by its arc's cross-axis extent."""
    if len(arcs) != len(sizes):
        raise ValueError("need one arc per element")
    grown = []
    for (w, h), arc in zip(sizes, arcs):
        e = int(math.ceil(arc.extent))
        grown.append((w + e, h) if vertical else (w, h + e))
    return layout_flow(grown, cfg, rng, vertical)
