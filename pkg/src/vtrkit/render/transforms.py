"""Weighted geometric transforms for rendered text elements.

A transform is defined on an element rectangle ``[0, w] x [0, h]``. The same
analytic forward map moves the label quad and (through its inverse) resamples
the raster, so quads and pixels stay consistent.

Naming: the ``_x`` variants squeeze along x (one vertical edge shrinks), the
``_y`` variants along y. ``persp_*`` is projective; ``trap_*`` is a linear
taper with the same corners.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from vtrkit.render.config import TRANSFORM_KINDS, EngineConfig


@dataclass(frozen=True)
class Transform:
    kind: str
    amount: float  # retained edge fraction for persp/trap, degrees for skew/rotate
    side: int = 1  # which edge is squeezed (persp/trap) or the angle sign (skew/rotate)

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValueError(f"unknown transform {self.kind!r}")
        if self.side not in (-1, 1):
            raise ValueError("side must be -1 or 1")
        if self.kind.startswith(("persp", "trap")) and not 0 < self.amount <= 1:
            raise ValueError(f"{self.kind} fraction must lie in (0, 1], got {self.amount}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "amount": self.amount, "side": self.side}


def choose_transform(cfg: EngineConfig, rng: np.random.Generator) -> Transform | None:
    """Bernoulli(transform_prob), then one kind with probability proportional to its weight."""
    if rng.random() >= cfg.transform_prob:
        return None
    kinds = [k for k in TRANSFORM_KINDS if cfg.transform_weights.get(k, 0) > 0]
    weights = np.array([cfg.transform_weights[k] for k in kinds], dtype=np.float64)
    kind = kinds[int(rng.choice(len(kinds), p=weights / weights.sum()))]
    lo, hi = getattr(cfg, _RANGE_FIELD[kind])
    amount = float(rng.uniform(lo, hi))
    side = 1 if rng.random() < 0.5 else -1
    return Transform(kind, amount, side)


_RANGE_FIELD = {
    "persp_x": "persp_x_percent",
    "persp_y": "persp_y_percent",
    "trap_x": "trap_x_percent",
    "trap_y": "trap_y_percent",
    "skew_x": "skew_x_deg",
    "skew_y": "skew_y_deg",
    "rotate": "rotate_deg",
}


def rect_quad(w: float, h: float) -> np.ndarray:
    """Corners clockwise on screen (y down) from the top-left."""
    return np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)


def homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 projective map taking four ``src`` points to ``dst``."""
    a, b = [], []
    for (x, y), (u, v) in zip(src, dst):
        a.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        a.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        b.extend([u, v])
    p = np.linalg.solve(np.array(a, dtype=np.float64), np.array(b, dtype=np.float64))
    return np.append(p, 1.0).reshape(3, 3)


def _apply_h(m: np.ndarray, pts: np.ndarray) -> np.ndarray:
    q = np.c_[pts, np.ones(len(pts))] @ m.T
    return q[:, :2] / q[:, 2:3]


def _squeezed_quad(t: Transform, w: float, h: float) -> np.ndarray:
    q = rect_quad(w, h)
    p = t.amount
    if t.kind.endswith("_x"):
        # right edge (side=1) or left edge shrinks about its midpoint
        idx = (1, 2) if t.side == 1 else (0, 3)
        q[list(idx), 1] = h / 2 + (q[list(idx), 1] - h / 2) * p
    else:
        idx = (2, 3) if t.side == 1 else (0, 1)
        q[list(idx), 0] = w / 2 + (q[list(idx), 0] - w / 2) * p
    return q


def _taper(t: Transform, coord: np.ndarray, length: float) -> np.ndarray:
    # scale factor 1 at the untouched edge, amount at the squeezed edge
    u = coord / length if t.side == 1 else 1.0 - coord / length
    return 1.0 + (t.amount - 1.0) * u


def _linear(t: Transform, w: float, h: float) -> np.ndarray:
    a = math.radians(t.amount) * t.side
    cx, cy = w / 2, h / 2
    if t.kind == "rotate":
        c, s = math.cos(a), math.sin(a)
        lin = np.array([[c, -s], [s, c]])
    elif t.kind == "skew_x":
        lin = np.array([[1.0, math.tan(a)], [0.0, 1.0]])
    else:
        lin = np.array([[1.0, 0.0], [math.tan(a), 1.0]])
    m = np.eye(3)
    m[:2, :2] = lin
    m[:2, 2] = np.array([cx, cy]) - lin @ np.array([cx, cy])
    return m


def transform_points(t: Transform, pts, size: tuple[float, float]) -> np.ndarray:
    """Forward map of element-local points for an element of ``size = (w, h)``."""
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    w, h = size
    if t.kind.startswith("persp"):
        return _apply_h(homography(rect_quad(w, h), _squeezed_quad(t, w, h)), pts)
    if t.kind == "trap_x":
        s = _taper(t, pts[:, 0], w)
        return np.c_[pts[:, 0], h / 2 + (pts[:, 1] - h / 2) * s]
    if t.kind == "trap_y":
        s = _taper(t, pts[:, 1], h)
        return np.c_[w / 2 + (pts[:, 0] - w / 2) * s, pts[:, 1]]
    return _apply_h(_linear(t, w, h), pts)


def inverse_points(t: Transform, pts, size: tuple[float, float]) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    w, h = size
    if t.kind.startswith("persp"):
        return _apply_h(np.linalg.inv(homography(rect_quad(w, h), _squeezed_quad(t, w, h))), pts)
    if t.kind == "trap_x":
        s = _taper(t, pts[:, 0], w)
        return np.c_[pts[:, 0], h / 2 + (pts[:, 1] - h / 2) / s]
    if t.kind == "trap_y":
        s = _taper(t, pts[:, 1], h)
        return np.c_[w / 2 + (pts[:, 0] - w / 2) / s, pts[:, 1]]
    return _apply_h(np.linalg.inv(_linear(t, w, h)), pts)


def transformed_extent(t: Transform | None, size: tuple[float, float]):
    """Integer output size and the shift that moves the mapped quad to the origin."""
    w, h = size
    if t is None:
        return (int(math.ceil(w)), int(math.ceil(h))), np.zeros(2)
    q = transform_points(t, rect_quad(w, h), size)
    lo = np.floor(q.min(axis=0))
    hi = np.ceil(q.max(axis=0))
    return (int(hi[0] - lo[0]), int(hi[1] - lo[1])), -lo


def apply_transform(t: Transform | None, layers: np.ndarray):
    """Warp ``layers`` (H x W x C coverage) and return ``(warped, quad)``.

    ``quad`` is the element rectangle's corners in the warped raster's
    coordinates. Sampling is bilinear through the inverse map.
    """
    h, w = layers.shape[:2]
    if t is None:
        return layers, rect_quad(w, h)
    (ow, oh), shift = transformed_extent(t, (w, h))
    quad = transform_points(t, rect_quad(w, h), (w, h)) + shift
    ys, xs = np.mgrid[0:oh, 0:ow].astype(np.float64)
    centers = np.c_[xs.ravel() + 0.5, ys.ravel() + 0.5] - shift
    src = inverse_points(t, centers, (w, h)) - 0.5
    out = np.empty((oh, ow, layers.shape[2]), dtype=np.float32)
    for c in range(layers.shape[2]):
        out[..., c] = ndimage.map_coordinates(
            layers[..., c], [src[:, 1], src[:, 0]], order=1, mode="constant", cval=0.0
        ).reshape(oh, ow)
    return out, quad
