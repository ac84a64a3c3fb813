"""Glyph rasterization, border styling, colors and compositing.

Coverage maps are float32 arrays in [0, 1] with pixel ``k`` spanning
``[k, k + 1)``; colors are 8-bit RGB triples.
"""
from __future__ import annotations

import math
import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from vtrkit.strokes import StrokeGlyph

SUPERSAMPLE = 4
MIN_GLYPH_PX = 8


def luminance(rgb) -> float:
    r, g, b = rgb
    return 0.299 * r + 0.587 * g + 0.114 * b


def draw_strokes(polylines, size: tuple[int, int], width_px: float) -> np.ndarray:
    """Anti-aliased coverage of polylines given in pixel coordinates.

    Drawn at ``SUPERSAMPLE``x with round joints and caps, then box-reduced.
    """
    w, h = size
    s = SUPERSAMPLE
    img = Image.new("L", (w * s, h * s), 0)
    draw = ImageDraw.Draw(img)
    lw = max(1, int(round(width_px * s)))
    r = lw / 2.0
    for pts in polylines:
        pts = [(float(x) * s, float(y) * s) for x, y in pts]
        draw.line(pts, fill=255, width=lw, joint="curve")
        for x, y in (pts[0], pts[-1]):
            draw.ellipse((x - r, y - r, x + r, y + r), fill=255)
    img = img.reduce(s)
    return np.asarray(img, dtype=np.float32) / 255.0


def glyph_polylines(g: StrokeGlyph, center, size_px: float, angle_rad: float = 0.0):
    """Map a glyph's em-square strokes to pixels: scaled to ``size_px``,
    rotated by ``angle_rad`` and centered on ``center``."""
    k = size_px / g.em
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    rot = np.array([[c, -s], [s, c]])
    out = []
    for stroke in g.strokes:
        local = (np.asarray(stroke) - g.em / 2.0) * k
        out.append(local @ rot.T + np.asarray(center, dtype=np.float64))
    return out


def ink_box(coverage: np.ndarray, threshold: float = 0.0):
    """Tight ``(x0, y0, x1, y1)`` box (exclusive max) of pixels above threshold, or None."""
    ys, xs = np.nonzero(coverage > threshold)
    if len(xs) == 0:
        return None
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def rasterize_glyph(g: StrokeGlyph, size_px: int, stroke_width_px: float):
    """Render one glyph into a ``size_px`` square; returns ``(coverage, tight_box)``."""
    if size_px < MIN_GLYPH_PX:
        raise ValueError(f"glyph size must be at least {MIN_GLYPH_PX} px, got {size_px}")
    lines = glyph_polylines(g, (size_px / 2.0, size_px / 2.0), size_px)
    cov = draw_strokes(lines, (size_px, size_px), stroke_width_px)
    return cov, ink_box(cov)


def border_radius(ratio: float, font_size: float) -> int:
    return int(math.ceil(ratio * font_size - 1e-9))


def style_border(coverage: np.ndarray, ratio: float, font_size: float, alpha: float = 1.0) -> np.ndarray:
    """Dilate ink by ``ceil(ratio * font_size)`` px; the result is the border
    layer drawn behind the glyph (it includes the ink footprint)."""
    radius = border_radius(ratio, font_size)
    if radius <= 0:
        return coverage
    ink = coverage > 0
    if not ink.any():
        return np.zeros_like(coverage)
    dist = ndimage.distance_transform_edt(~ink)
    grown = (dist <= radius).astype(np.float32)
    return np.maximum(grown, coverage) * np.float32(alpha)


# -- colors --------------------------------------------------------------------

def _rgb(rng: np.random.Generator):
    return tuple(int(v) for v in rng.integers(0, 256, size=3))


def ink_contrasts(ink, bg_pair, min_contrast: float) -> bool:
    """Ink must differ from both gradient ends by ``min_contrast`` and lie on
    the same side of both, so every point of the gradient keeps the contrast."""
    li = luminance(ink)
    la, lb = luminance(bg_pair[0]), luminance(bg_pair[1])
    return (li >= max(la, lb) + min_contrast) or (li <= min(la, lb) - min_contrast)


def _ink_feasible(pair, min_contrast: float) -> bool:
    la, lb = luminance(pair[0]), luminance(pair[1])
    return min(la, lb) >= min_contrast or max(la, lb) <= 255 - min_contrast


def sample_background(rng: np.random.Generator, min_contrast: float = 40.0, tries: int = 64):
    """Flat color or linear gradient (even odds) that leaves room for a contrasting ink.

    Gradient ends are redrawn until the whole ramp sits far enough from
    black or from white; after ``tries`` failures the background is flat.
    """
    start = _rgb(rng)
    while not _ink_feasible((start, start), min_contrast):
        start = _rgb(rng)
    if rng.random() < 0.5:
        return (start, start), 0.0
    angle = float(rng.uniform(0, 2 * math.pi))
    for _ in range(tries):
        end = _rgb(rng)
        if _ink_feasible((start, end), min_contrast):
            return (start, end), angle
    return (start, start), 0.0


def sample_ink(rng: np.random.Generator, bg_pair, min_contrast: float, tries: int = 64):
    """Ink and border colors with the required luminance contrast.

    Falls back to black or white (whichever contrasts) after ``tries`` draws.
    """
    ink = None
    for _ in range(tries):
        cand = _rgb(rng)
        if ink_contrasts(cand, bg_pair, min_contrast):
            ink = cand
            break
    if ink is None:
        darkest = min(luminance(c) for c in bg_pair)
        ink = (0, 0, 0) if darkest >= min_contrast else (255, 255, 255)
    border = None
    for _ in range(tries):
        cand = _rgb(rng)
        if abs(luminance(cand) - luminance(ink)) >= min_contrast:
            border = cand
            break
    if border is None:
        border = (255, 255, 255) if luminance(ink) < 128 else (0, 0, 0)
    return ink, border


def render_background(size: tuple[int, int], bg_pair, angle: float) -> np.ndarray:
    w, h = size
    a, b = (np.asarray(c, dtype=np.float32) for c in bg_pair)
    if np.array_equal(a, b):
        return np.broadcast_to(a, (h, w, 3)).copy()
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float32)
    proj = xs * math.cos(angle) + ys * math.sin(angle)
    t = (proj - proj.min()) / max(float(proj.max() - proj.min()), 1e-6)
    return a + t[..., None] * (b - a)


def composite(canvas: np.ndarray, coverage: np.ndarray, color, x: int, y: int, alpha: float = 1.0) -> None:
    """Alpha-blend ``color`` over ``canvas`` (float HxWx3) in place at ``(x, y)``."""
    h, w = coverage.shape
    region = canvas[y:y + h, x:x + w]
    a = (coverage[: region.shape[0], : region.shape[1], None] * alpha).astype(np.float32)
    region *= 1.0 - a
    region += a * np.asarray(color, dtype=np.float32)


def to_uint8(canvas: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(canvas), 0, 255).astype(np.uint8)
