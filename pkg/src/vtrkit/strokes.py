"""Stroke-level glyph representation and structural edit operators.

Glyphs are ordered lists of stroke medians (polylines) in a square em box,
y pointing down. Operators take a ``numpy.random.Generator`` and never
mutate their input.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

DEFAULT_EM = 1024.0
CENTROID_SAMPLES = 32
INSERT_JITTER = 0.1


class StrokeDataError(ValueError):
    pass


def as_polyline(points) -> np.ndarray:
    """Validate and freeze an ``(n, 2)`` point array; consecutive duplicates are dropped."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("a stroke must be a sequence of (x, y) points")
    if len(pts) > 1:
        keep = np.ones(len(pts), bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        pts = pts[keep]
    if len(pts) < 2:
        raise ValueError("a stroke needs at least 2 distinct points")
    pts.setflags(write=False)
    return pts


@dataclass(frozen=True)
class StrokeGlyph:
    character: str
    strokes: tuple[np.ndarray, ...]
    em: float = DEFAULT_EM

    def __post_init__(self):
        strokes = tuple(as_polyline(s) for s in self.strokes)
        for s in strokes:
            if s.min() < 0 or s.max() > self.em:
                raise ValueError(f"{self.character!r}: stroke leaves the [0, {self.em}] em square")
        object.__setattr__(self, "strokes", strokes)

    def __len__(self) -> int:
        return len(self.strokes)

    def __eq__(self, other):
        if not isinstance(other, StrokeGlyph):
            return NotImplemented
        return (
            self.character == other.character
            and self.em == other.em
            and len(self.strokes) == len(other.strokes)
            and all(np.array_equal(a, b) for a, b in zip(self.strokes, other.strokes))
        )

    def __hash__(self):
        return hash((self.character, len(self.strokes)))

    def replace(self, strokes) -> "StrokeGlyph":
        return StrokeGlyph(self.character, tuple(strokes), self.em)

    def to_record(self) -> dict:
        return {"character": self.character, "strokes": [s.tolist() for s in self.strokes]}


@dataclass(frozen=True)
class EditOp:
    kind: str
    strokes: tuple[int, ...]
    donor: str | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "strokes": list(self.strokes)}
        if self.donor is not None:
            d["donor"] = self.donor
        return d


@dataclass(frozen=True)
class EditLog:
    operations: tuple[EditOp, ...] = ()
    skipped: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.operations)

    def __add__(self, other: "EditLog") -> "EditLog":
        return EditLog(self.operations + other.operations, self.skipped + other.skipped)

    def to_dict(self) -> dict:
        return {"operations": [op.to_dict() for op in self.operations], "skipped": list(self.skipped)}


# -- database ---------------------------------------------------------------

GlyphDB = Mapping[str, StrokeGlyph]


def load_stroke_db(path: str | Path | None = None, em: float = DEFAULT_EM) -> GlyphDB:
    """Load line-delimited ``{"character", "strokes"}`` records.

    With no path, the bundled sample set is loaded.
    """
    if path is None:
        text = resources.files("vtrkit").joinpath("data/strokes.jsonl").read_text(encoding="utf-8")
        source = "<bundled strokes>"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    db: dict[str, StrokeGlyph] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise StrokeDataError(f"{source}:{lineno}: malformed JSON ({e.msg})") from None
        ch = rec.get("character") if isinstance(rec, dict) else None
        if not isinstance(ch, str) or len(ch) != 1:
            raise StrokeDataError(f"{source}:{lineno}: field 'character' must be a single character")
        strokes = rec.get("strokes")
        if not isinstance(strokes, list) or not strokes:
            raise StrokeDataError(f"{source}:{lineno}: {ch!r} field 'strokes' must be a non-empty list")
        if ch in db:
            raise StrokeDataError(f"{source}:{lineno}: duplicate character {ch!r}")
        try:
            db[ch] = StrokeGlyph(ch, tuple(strokes), em)
        except (ValueError, TypeError) as e:
            raise StrokeDataError(f"{source}:{lineno}: {ch!r} field 'strokes': {e}") from None
    if not db:
        raise StrokeDataError(f"{source}: stroke database is empty")
    return MappingProxyType(db)


# -- geometry -----------------------------------------------------------------

def arc_length(stroke: np.ndarray) -> float:
    return float(np.hypot(*np.diff(stroke, axis=0).T).sum())


def resample(stroke, n: int) -> np.ndarray:
    """``n`` points equally spaced in arc length; endpoints kept exactly."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    pts = np.asarray(stroke, dtype=np.float64)
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0:
        raise ValueError("cannot resample a zero-length stroke")
    targets = np.linspace(0.0, total, n)
    out = np.column_stack([np.interp(targets, cum, pts[:, 0]), np.interp(targets, cum, pts[:, 1])])
    out[0], out[-1] = pts[0], pts[-1]
    return out


def centroid(stroke) -> np.ndarray:
    """Mean of 32 arc-uniform samples, so it does not depend on source point density.

    Closed strokes (first point == last) use 32 distinct stations around the
    loop rather than counting the seam twice.
    """
    pts = np.asarray(stroke, dtype=np.float64)
    if len(pts) > 2 and np.array_equal(pts[0], pts[-1]):
        return resample(pts, CENTROID_SAMPLES + 1)[:-1].mean(axis=0)
    return resample(pts, CENTROID_SAMPLES).mean(axis=0)


def _translate_inside(stroke: np.ndarray, shift: np.ndarray, em: float) -> np.ndarray:
    # clamp the shift (not the points) so the stroke keeps its shape
    lo, hi = stroke.min(axis=0), stroke.max(axis=0)
    shift = np.clip(shift, -lo, em - hi)
    return stroke + shift


# -- operators ----------------------------------------------------------------

def op_delete(g: StrokeGlyph, rng: np.random.Generator, k: int) -> tuple[StrokeGlyph, EditLog]:
    """Remove ``k`` strokes chosen uniformly without replacement."""
    if not 1 <= k < len(g):
        raise ValueError(f"cannot delete {k} of {len(g)} strokes")
    removed = sorted(int(i) for i in rng.choice(len(g), size=k, replace=False))
    gone = set(removed)
    kept = [s for i, s in enumerate(g.strokes) if i not in gone]
    return g.replace(kept), EditLog((EditOp("delete", tuple(removed)),))


def op_swap(g: StrokeGlyph, rng: np.random.Generator, pair: tuple[int, int] | None = None) -> tuple[StrokeGlyph, EditLog]:
    """Exchange the positions of two strokes by moving each onto the other's centroid."""
    if len(g) < 2:
        raise ValueError("swap needs at least 2 strokes")
    if pair is None:
        i, j = sorted(int(x) for x in rng.choice(len(g), size=2, replace=False))
    else:
        i, j = pair
        if i == j:
            raise ValueError("swap needs two distinct strokes")
    ci, cj = centroid(g.strokes[i]), centroid(g.strokes[j])
    strokes = list(g.strokes)
    strokes[i] = _translate_inside(g.strokes[i], cj - ci, g.em)
    strokes[j] = _translate_inside(g.strokes[j], ci - cj, g.em)
    return g.replace(strokes), EditLog((EditOp("swap", (i, j)),))


def op_insert(g: StrokeGlyph, donor_db: GlyphDB, rng: np.random.Generator) -> tuple[StrokeGlyph, EditLog]:
    """Append a stroke borrowed from another character, placed near existing ink."""
    donors = sorted(c for c in donor_db if c != g.character and len(donor_db[c]))
    if not donors:
        raise ValueError(f"no donor glyph other than {g.character!r}")
    donor = donor_db[donors[int(rng.integers(len(donors)))]]
    stroke = np.asarray(donor.strokes[int(rng.integers(len(donor)))]) * (g.em / donor.em)
    if len(g):
        anchor = centroid(g.strokes[int(rng.integers(len(g)))])
    else:
        anchor = np.array([g.em / 2, g.em / 2])
    jitter = rng.uniform(-INSERT_JITTER * g.em, INSERT_JITTER * g.em, size=2)
    placed = _translate_inside(stroke, anchor + jitter - centroid(stroke), g.em)
    return g.replace(list(g.strokes) + [placed]), EditLog((EditOp("insert", (len(g),), donor.character),))


def delete_count(rng: np.random.Generator, n_strokes: int) -> int:
    return int(rng.integers(1, max(1, math.ceil(n_strokes / 3)) + 1))


def compose_anomaly(
    g: StrokeGlyph,
    donor_db: GlyphDB,
    rng: np.random.Generator,
    p_del: float = 0.4,
    p_ins: float = 0.4,
    p_swap: float = 0.4,
) -> tuple[StrokeGlyph, EditLog, bool]:
    """Apply delete, insert, swap in that order, each with its own probability.

    Every Bernoulli draw is made regardless of feasibility so that the random
    stream is stable; operators that cannot apply are recorded in ``skipped``.
    """
    for p in (p_del, p_ins, p_swap):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probabilities must lie in [0, 1], got {p}")
    log = EditLog()
    if rng.random() < p_del:
        k = delete_count(rng, len(g))
        if k < len(g):
            g, step = op_delete(g, rng, k)
            log += step
        else:
            log += EditLog(skipped=("delete",))
    if rng.random() < p_ins:
        if any(c != g.character and len(donor_db[c]) for c in donor_db):
            g, step = op_insert(g, donor_db, rng)
            log += step
        else:
            log += EditLog(skipped=("insert",))
    if rng.random() < p_swap:
        if len(g) >= 2:
            g, step = op_swap(g, rng)
            log += step
        else:
            log += EditLog(skipped=("swap",))
    return g, log, bool(log)
