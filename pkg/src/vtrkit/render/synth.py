"""Sample and dataset synthesis.

A sample is planned first (every random draw, element sizes computed
analytically, layout) and rasterized afterwards, so a layout failure only
costs a re-plan. All randomness comes from one ``numpy.random.Generator``
per sample, derived from the dataset seed and the sample index.
"""
from __future__ import annotations

import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from vtrkit.marked import Token, anomaly_counts, parse_marked
from vtrkit.render.config import EngineConfig
from vtrkit.render.layout import Arc, Placement, PlacementError, glyph_centers, layout_flow
from vtrkit.render.raster import (
    border_radius,
    composite,
    draw_strokes,
    glyph_polylines,
    render_background,
    sample_background,
    sample_ink,
    style_border,
    to_uint8,
)
from vtrkit.render.transforms import Transform, apply_transform, choose_transform, transformed_extent
from vtrkit.strokes import EditLog, GlyphDB, StrokeGlyph, compose_anomaly, load_stroke_db

log = logging.getLogger(__name__)

MAX_REDRAWS = 10
ANOMALY_RETRIES = 16
REDRAW_SHRINK = 0.85
CURVE_PAD = 0.25  # extra padding (font-size units) for glyphs rotated along an arc


class SampleFailure(RuntimeError):
    pass


# -- corpus --------------------------------------------------------------------

def load_corpus(path: str | Path | None = None) -> list[str]:
    """Whitespace-separated words; the bundled sample corpus when no path is given."""
    if path is None:
        text = resources.files("vtrkit").joinpath("data/corpus.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = text.split()
    if not words:
        raise ValueError("corpus is empty")
    return words


def covered_words(words: Sequence[str], db: GlyphDB) -> tuple[list[str], list[str]]:
    """Drop characters the stroke database cannot draw; returns ``(words, missing)``."""
    missing = sorted({ch for w in words for ch in w if ch not in db})
    if missing:
        log.warning("skipping %d corpus characters with no stroke data: %s", len(missing), "".join(missing))
    bad = set(missing)
    kept = ["".join(ch for ch in w if ch not in bad) for w in words]
    kept = [w for w in kept if w]
    if not kept:
        raise ValueError("no corpus character is covered by the stroke database")
    return kept, missing


# -- texts ----------------------------------------------------------------------

@dataclass(frozen=True)
class TextPlan:
    text: str
    glyphs: tuple[StrokeGlyph, ...]
    edits: tuple[EditLog, ...]  # one per character, empty when canonical

    @property
    def anomalous(self) -> int:
        return sum(1 for e in self.edits if e)

    @property
    def label(self) -> str:
        return Token.word(self.text, [i for i, e in enumerate(self.edits) if e]).serialize()

    def edit_records(self) -> list[dict]:
        return [
            {"index": i, "character": self.text[i], **e.to_dict()}
            for i, e in enumerate(self.edits) if e
        ]


def draw_text(words: Sequence[str], cfg: EngineConfig, rng: np.random.Generator) -> str:
    n = int(rng.integers(cfg.text_len[0], cfg.text_len[1] + 1))
    buf = ""
    while len(buf) < n:
        buf += words[int(rng.integers(len(words)))]
    return buf[:n]


def plan_text(words: Sequence[str], db: GlyphDB, cfg: EngineConfig, rng: np.random.Generator) -> TextPlan:
    """Draw a text and decide (Bernoulli ``anomaly_prob``) whether it is anomalous.

    An anomalous text runs ``compose_anomaly`` on every character. If no
    operator fired anywhere, random characters are retried so the label
    matches the decision.
    """
    text = draw_text(words, cfg, rng)
    glyphs = [db[ch] for ch in text]
    edits = [EditLog()] * len(text)
    if rng.random() < cfg.anomaly_prob:
        for i, g in enumerate(glyphs):
            glyphs[i], edits[i], _ = compose_anomaly(g, db, rng, *cfg.op_probs)
        tries = 0
        while not any(edits) and tries < ANOMALY_RETRIES:
            i = int(rng.integers(len(text)))
            glyphs[i], edits[i], _ = compose_anomaly(db[text[i]], db, rng, *cfg.op_probs)
            tries += 1
    return TextPlan(text, tuple(glyphs), tuple(edits))


# -- elements -------------------------------------------------------------------

@dataclass(frozen=True)
class ElementPlan:
    text: TextPlan
    vertical: bool
    font_size: int
    stroke_ratio: float
    glyph_scales: tuple[float, ...]
    arc_ratio: float | None  # signed curve depth in font-size units; None for flow
    border_ratio: float | None
    transform: Transform | None
    ink: tuple[int, int, int]
    border: tuple[int, int, int]

    @property
    def arc(self) -> Arc | None:
        if self.arc_ratio is None:
            return None
        return Arc(len(self.text.text) * self.font_size, self.arc_ratio * self.font_size)

    @property
    def stroke_width(self) -> float:
        return max(1.0, self.stroke_ratio * self.font_size)

    @property
    def pad(self) -> int:
        pad = math.ceil(self.stroke_width) + 2
        if self.border_ratio is not None:
            pad += border_radius(self.border_ratio, self.font_size)
        if self.arc_ratio is not None:
            pad += math.ceil(CURVE_PAD * self.font_size)
        return pad

    def local_size(self) -> tuple[int, int]:
        """Untransformed raster ``(w, h)``."""
        n, f, p = len(self.text.text), self.font_size, self.pad
        bend = math.ceil(abs(self.arc.depth)) if self.arc_ratio is not None else 0
        along, across = n * f + 2 * p, f + 2 * p + bend
        return (across, along) if self.vertical else (along, across)

    def size(self) -> tuple[int, int]:
        return transformed_extent(self.transform, self.local_size())[0]

    def resized(self, font_size: int) -> "ElementPlan":
        return replace(self, font_size=font_size)


def _fit(el: ElementPlan, avail: tuple[float, float]) -> ElementPlan:
    """Shrink the font until the transformed element fits ``avail = (w, h)``."""
    for _ in range(32):
        w, h = el.size()
        k = min(avail[0] / w, avail[1] / h)
        if k >= 1:
            return el
        f = max(8, int(math.floor(el.font_size * k * 0.98)))
        if f == el.font_size:
            return el
        el = el.resized(f)
    return el


def plan_element(
    words, db, cfg: EngineConfig, rng: np.random.Generator, vertical: bool, curve: bool,
    bg_pair, scale: float = 1.0,
) -> ElementPlan:
    text = plan_text(words, db, cfg, rng)
    font = int(rng.integers(cfg.font_size_px[0], cfg.font_size_px[1] + 1))
    font = max(8, int(round(font * scale)))
    stroke_ratio = float(rng.uniform(*cfg.stroke_width_ratio))
    scales = tuple(float(s) for s in rng.uniform(*cfg.glyph_scale, size=len(text.text)))
    arc_ratio = None
    if curve:
        sign = 1 if rng.random() < 0.5 else -1
        arc_ratio = sign * float(rng.uniform(*cfg.curve_depth_ratio))
    border_ratio = None
    if rng.random() < cfg.style_prob and rng.random() < cfg.border_prob:
        border_ratio = float(rng.uniform(*cfg.border_size_ratio))
    transform = choose_transform(cfg, rng)
    ink, border = sample_ink(rng, bg_pair, cfg.min_contrast)
    length_ratio = float(rng.uniform(*cfg.length_ratio))
    el = ElementPlan(text, vertical, font, stroke_ratio, scales, arc_ratio, border_ratio, transform, ink, border)
    cw, ch = cfg.canvas_size
    m2 = 2 * cfg.margin_px
    # length_ratio caps the element along the reading direction
    avail = ((cw - m2), (ch - m2) * length_ratio) if vertical else ((cw - m2) * length_ratio, (ch - m2))
    return _fit(el, avail)


@dataclass(frozen=True)
class SamplePlan:
    seed_info: tuple
    vertical: bool
    layout: str
    background: tuple
    gradient_angle: float
    elements: tuple[ElementPlan, ...]
    placements: tuple[Placement, ...]
    attempts: int


def plan_sample(words, db, cfg: EngineConfig, rng: np.random.Generator, seed_info=()) -> SamplePlan:
    last = None
    for attempt in range(MAX_REDRAWS):
        scale = REDRAW_SHRINK ** attempt
        vertical = bool(rng.random() < cfg.vertical_prob)
        curve = bool(rng.random() < cfg.curve_prob)
        bg_pair, angle = sample_background(rng, cfg.min_contrast)
        n = int(rng.integers(cfg.elements_per_sample[0], cfg.elements_per_sample[1] + 1))
        els = [plan_element(words, db, cfg, rng, vertical, curve, bg_pair, scale) for _ in range(n)]
        try:
            places = layout_flow([e.size() for e in els], cfg, rng, vertical)
        except PlacementError as e:
            last = e
            continue
        return SamplePlan(tuple(seed_info), vertical, "curve" if curve else "flow", bg_pair, angle,
                          tuple(els), tuple(places), attempt + 1)
    raise SampleFailure(f"could not place sample {seed_info} after {MAX_REDRAWS} draws: {last}")


# -- rendering --------------------------------------------------------------------

def render_element(el: ElementPlan) -> tuple[np.ndarray, np.ndarray]:
    """Rasterize ``el`` into ``(layers, quad)``; layers are ink and border coverage."""
    w, h = el.local_size()
    f, p, n = el.font_size, el.pad, len(el.text.text)
    arc = el.arc
    centers = glyph_centers(n, f, arc)
    angles = arc.angle(centers[:, 0]) if arc is not None else np.zeros(n)
    lines = []
    for k, g in enumerate(el.text.glyphs):
        along, shift = centers[k]
        cross = p + f / 2.0 + shift
        if el.vertical:
            center, angle = (cross, p + along), -angles[k]
        else:
            center, angle = (p + along, cross), angles[k]
        lines.extend(glyph_polylines(g, center, f * el.glyph_scales[k], float(angle)))
    ink = draw_strokes(lines, (w, h), el.stroke_width)
    if el.border_ratio is not None:
        border = style_border(ink, el.border_ratio, f, 1.0)
    else:
        border = np.zeros_like(ink)
    layers = np.stack([ink, border], axis=-1)
    return apply_transform(el.transform, layers)


@dataclass
class BoxLabel:
    quad: np.ndarray
    text: str
    anomalous: int
    total: int
    edits: list = field(default_factory=list)
    transform: dict | None = None


@dataclass
class RenderSample:
    image: np.ndarray
    boxes: list[BoxLabel]
    language: str
    seed: tuple
    vertical: bool = False
    layout: str = "flow"

    @property
    def image_label(self) -> str:
        return " ".join(b.text for b in self.boxes)

    @property
    def anomalous(self) -> int:
        return sum(b.anomalous for b in self.boxes)

    @property
    def total(self) -> int:
        return sum(b.total for b in self.boxes)

    def records(self, sample_id: str, image_name: str) -> list[dict]:
        """Label records: one image-level record followed by its boxes."""
        out = [{"id": sample_id, "image": image_name, "language": self.language, "level": "image",
                "text": self.image_label, "anomalous": self.anomalous, "total": self.total}]
        for k, b in enumerate(self.boxes):
            rec = {"id": f"{sample_id}_{k:02d}", "image": image_name, "language": self.language, "level": "box",
                   "quad": [[round(float(x), 3), round(float(y), 3)] for x, y in b.quad],
                   "text": b.text, "anomalous": b.anomalous, "total": b.total}
            if b.edits:
                rec["edits"] = b.edits
            out.append(rec)
        return out

    def png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.image, "RGB").save(buf, format="PNG", optimize=False)
        return buf.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.image.tobytes()).hexdigest()


def render_plan(plan: SamplePlan, cfg: EngineConfig) -> RenderSample:
    canvas = render_background(cfg.canvas_size, plan.background, plan.gradient_angle)
    boxes = []
    for el, pl in zip(plan.elements, plan.placements):
        layers, quad = render_element(el)
        composite(canvas, layers[..., 1], el.border, pl.x, pl.y, cfg.border_alpha)
        composite(canvas, layers[..., 0], el.ink, pl.x, pl.y)
        t = el.text
        boxes.append(BoxLabel(quad + np.array([pl.x, pl.y]), t.label, t.anomalous, len(t.text),
                              t.edit_records(), el.transform.to_dict() if el.transform else None))
    return RenderSample(to_uint8(canvas), boxes, cfg.language, plan.seed_info, plan.vertical, plan.layout)


def synthesize_sample(cfg: EngineConfig, db: GlyphDB, words: Sequence[str], rng: np.random.Generator,
                      seed_info=()) -> RenderSample:
    if not words:
        raise ValueError("corpus is empty")
    return render_plan(plan_sample(words, db, cfg, rng, seed_info), cfg)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def check_sample(s: RenderSample) -> None:
    """Assert the label invariants; raises AssertionError with a reason."""
    w, h = s.image.shape[1], s.image.shape[0]
    for b in s.boxes:
        assert np.all(b.quad >= -1e-9) and np.all(b.quad[:, 0] <= w + 1e-9) and np.all(b.quad[:, 1] <= h + 1e-9), \
            "quad leaves the canvas"
        assert anomaly_counts(parse_marked(b.text, s.language)) == (b.anomalous, b.total), "label counts disagree"
        assert b.anomalous == len(b.edits), "anomalous count differs from edited glyphs"


# -- datasets ------------------------------------------------------------------------

def _worker(args):
    cfg_dict, db_path, words, index = args
    cfg = EngineConfig.from_dict(cfg_dict)
    db = load_stroke_db(db_path)
    s = synthesize_sample(cfg, db, words, sample_rng(cfg.seed, index), (cfg.seed, index))
    return s.png_bytes(), s.digest(), s.records(f"{index:06d}", f"images/{index:06d}.png")


def _generate(cfg, db, db_path, words, n, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            jobs = ((cfg.to_dict(), db_path, list(words), i) for i in range(n))
            yield from pool.map(_worker, jobs, chunksize=4)
        return
    for i in range(n):
        s = synthesize_sample(cfg, db, words, sample_rng(cfg.seed, i), (cfg.seed, i))
        yield s.png_bytes(), s.digest(), s.records(f"{i:06d}", f"images/{i:06d}.png")


def synthesize_dataset(
    cfg: EngineConfig,
    n: int,
    out_dir: str | Path,
    db: GlyphDB | None = None,
    words: Sequence[str] | None = None,
    db_path: str | Path | None = None,
    workers: int = 1,
) -> dict:
    """Write ``n`` PNG images, ``labels.jsonl`` and ``manifest.json`` under ``out_dir``.

    Workers re-load the stroke database from ``db_path`` (bundled set when
    None). On an I/O failure a partial manifest is written before re-raising.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    out = Path(out_dir)
    if db is None:
        db = load_stroke_db(db_path)
    words, missing = covered_words(words if words is not None else load_corpus(), db)
    counts = {"images": {"anomalous": 0, "normal": 0}, "boxes": {"anomalous": 0, "normal": 0},
              "chars": {"anomalous": 0, "total": 0}}
    image_hash = hashlib.sha256()
    manifest = {"n_requested": n, "n_samples": 0, "complete": False, "seed": cfg.seed, **counts,
                "missing_characters": missing, "config": cfg.to_dict()}
    labels = out / "labels.jsonl"
    try:
        (out / "images").mkdir(parents=True, exist_ok=True)
        with open(labels, "w", encoding="utf-8", newline="\n") as fh:
            for i, (png, digest, records) in enumerate(_generate(cfg, db, db_path, words, n, workers)):
                (out / records[0]["image"]).write_bytes(png)
                for rec in records:
                    fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
                image_hash.update(digest.encode())
                img = records[0]
                counts["images"]["anomalous" if img["anomalous"] else "normal"] += 1
                for rec in records[1:]:
                    counts["boxes"]["anomalous" if rec["anomalous"] else "normal"] += 1
                counts["chars"]["anomalous"] += img["anomalous"]
                counts["chars"]["total"] += img["total"]
                manifest["n_samples"] = i + 1
    except OSError:
        manifest.update(counts)
        _write_manifest(out, manifest)
        raise
    manifest.update(counts)
    manifest["boxes"]["total"] = counts["boxes"]["anomalous"] + counts["boxes"]["normal"]
    manifest["labels_sha256"] = hashlib.sha256(labels.read_bytes()).hexdigest()
    manifest["images_sha256"] = image_hash.hexdigest()
    manifest["complete"] = True
    _write_manifest(out, manifest)
    return manifest


def _write_manifest(out: Path, manifest: dict) -> None:
    try:
        with open(out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError:
        log.error("could not write manifest to %s", out)
