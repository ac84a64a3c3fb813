"""TSAP (anomaly-count perception) and CTR (canonical recognition) metrics."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from vtrkit.marked import Language, MarkedTextError, MarkedTranscript, anomaly_counts, parse_marked, strip_markers
from vtrkit.scoring import hungarian_match, ned, ned_matrix

log = logging.getLogger(__name__)

DEFAULT_DELTA = 0.7
LEVELS = ("image", "box")


class DatasetError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class SchemaError(DatasetError):
    pass


class DatasetEmptyError(DatasetError):
    pass


@dataclass(frozen=True)
class EvalRecord:
    id: str
    level: str
    language: Language
    gt: MarkedTranscript
    pred: MarkedTranscript

    def __post_init__(self):
        if self.level not in LEVELS:
            raise SchemaError(f"unknown level {self.level!r}")
        if self.gt.language != self.pred.language:
            raise SchemaError(f"record {self.id!r}: gt and pred languages differ")

    @classmethod
    def from_texts(cls, id: str, gt: str, pred: str, language="en", level="image") -> "EvalRecord":
        lang = Language.coerce(language)
        return cls(id, level, lang, parse_marked(gt, lang), parse_marked(pred, lang))


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    n_records: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(*(a + b for a, b in zip(asdict(self).values(), asdict(other).values())))


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    f1: float
    ctr_recall: float
    ctr_ned: float
    counts: Counts
    delta: float = DEFAULT_DELTA
    level: str | None = None

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "delta": self.delta,
            "tsap": {"precision": self.precision, "recall": self.recall, "f1": self.f1},
            "ctr": {"recall": self.ctr_recall, "ned": self.ctr_ned},
            "counts": asdict(self.counts),
        }

    def to_table(self) -> str:
        c = self.counts
        head = f"{'level':<6} {'n':>6} {'P':>7} {'R':>7} {'F1':>7} | {'CTR-R':>7} {'NED':>7}"
        row = (
            f"{self.level or 'all':<6} {c.n_records:>6} {self.precision:>7.4f} {self.recall:>7.4f} "
            f"{self.f1:>7.4f} | {self.ctr_recall:>7.4f} {self.ctr_ned:>7.4f}"
        )
        tail = f"delta={self.delta}  tp={c.tp} fp={c.fp} fn={c.fn} tn={c.tn}"
        return "\n".join([head, row, tail])


def tsap_match(gt_count: int, pred_count: int, delta: float = DEFAULT_DELTA) -> bool:
    """True iff ``delta * gt <= pred <= gt / delta`` (inclusive)."""
    if gt_count <= 0:
        raise ValueError("tsap_match needs a positive ground-truth count")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return delta * gt_count <= pred_count <= gt_count / delta


def classify(g: int, p: int, delta: float = DEFAULT_DELTA) -> Counts:
    """Bucket one record by its gt/pred anomalous counts.

    A record with both counts positive but outside the tolerance interval is
    both a false positive and a false negative.
    """
    if g > 0 and p > 0 and tsap_match(g, p, delta):
        return Counts(tp=1, n_records=1)
    return Counts(fp=int(p > 0), fn=int(g > 0), tn=int(g == 0 and p == 0), n_records=1)


def _prf(c: Counts) -> tuple[float, float, float]:
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def tsap_metrics(records: Sequence[EvalRecord], delta: float = DEFAULT_DELTA) -> tuple[float, float, float, Counts]:
    if not records:
        raise DatasetEmptyError("no records to evaluate")
    total = Counts()
    for r in records:
        total = total + classify(anomaly_counts(r.gt)[0], anomaly_counts(r.pred)[0], delta)
    return (*_prf(total), total)


def ctr_record(gt: MarkedTranscript, pred: MarkedTranscript) -> tuple[float, float]:
    """Token recall and whole-string NED for one record."""
    gt_units = gt.units()
    pred_units = pred.units()
    gt_text, pred_text = strip_markers(gt), strip_markers(pred)
    if not gt_units:
        return 1.0, (0.0 if not pred_units else 1.0)
    if pred_units:
        costs = ned_matrix(gt_units, pred_units)
        exact = sum(1 for i, j in hungarian_match(costs) if costs[i, j] == 0.0)
    else:
        exact = 0
    return exact / len(gt_units), ned(gt_text, pred_text)


def ctr_metrics(records: Sequence[EvalRecord]) -> tuple[float, float]:
    if not records:
        raise DatasetEmptyError("no records to evaluate")
    recalls, neds = zip(*(ctr_record(r.gt, r.pred) for r in records))
    return sum(recalls) / len(records), sum(neds) / len(records)


def evaluate(records: Sequence[EvalRecord], delta: float = DEFAULT_DELTA, level: str | None = None) -> MetricReport:
    if level is not None and level not in LEVELS:
        raise SchemaError(f"unknown level {level!r}")
    chosen = [r for r in records if level is None or r.level == level]
    if not chosen:
        raise DatasetEmptyError(f"no records at level {level!r}" if level else "dataset is empty")
    p, r, f1, counts = tsap_metrics(chosen, delta)
    ctr_r, ctr_n = ctr_metrics(chosen)
    return MetricReport(p, r, f1, ctr_r, ctr_n, counts, delta, level)


# -- dataset I/O -----------------------------------------------------------

def _text_field(obj, key: str, lineno: int) -> str:
    value = obj.get(key)
    if isinstance(value, dict):
        value = value.get("text")
    if not isinstance(value, str):
        raise SchemaError(f"field {key!r} must be an inline string or a map with 'text'", lineno)
    return value


def _iter_json_lines(path: Path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise DatasetError(f"malformed JSON: {e.msg}", lineno) from None
            if not isinstance(obj, dict):
                raise DatasetError("record must be a map", lineno)
            yield lineno, obj


def _record(lineno: int, rid, level, language, gt: str, pred: str) -> EvalRecord:
    if not isinstance(rid, str) or not rid:
        raise SchemaError("missing or non-string 'id'", lineno)
    if level not in LEVELS:
        raise SchemaError(f"unknown level {level!r}", lineno)
    try:
        lang = Language.coerce(language)
    except ValueError as e:
        raise SchemaError(str(e), lineno) from None
    try:
        return EvalRecord(rid, level, lang, parse_marked(gt, lang), parse_marked(pred, lang))
    except MarkedTextError as e:
        raise DatasetError(f"record {rid!r}: {e}", lineno) from None


def load_dataset(path: str | Path) -> list[EvalRecord]:
    """Read paired records: one ``{"id","level","language","gt","pred"}`` map per line."""
    records, seen = [], set()
    for lineno, obj in _iter_json_lines(Path(path)):
        r = _record(lineno, obj.get("id"), obj.get("level"), obj.get("language"),
                    _text_field(obj, "gt", lineno), _text_field(obj, "pred", lineno))
        if r.id in seen:
            raise SchemaError(f"duplicate id {r.id!r}", lineno)
        seen.add(r.id)
        records.append(r)
    if not records:
        raise DatasetEmptyError(f"{path}: dataset is empty")
    return records


def load_label_pair(gt_path: str | Path, pred_path: str | Path) -> list[EvalRecord]:
    """Join two label files (renderer schema, ``"text"`` field) on ``id``.

    Ids missing from the prediction file are scored against an empty prediction.
    """
    preds: dict[str, str] = {}
    for lineno, obj in _iter_json_lines(Path(pred_path)):
        preds[str(obj.get("id"))] = _text_field(obj, "text", lineno)
    records, seen = [], set()
    for lineno, obj in _iter_json_lines(Path(gt_path)):
        rid = obj.get("id")
        r = _record(lineno, rid, obj.get("level"), obj.get("language"),
                    _text_field(obj, "text", lineno), preds.get(str(rid), ""))
        if r.id in seen:
            raise SchemaError(f"duplicate id {r.id!r}", lineno)
        seen.add(r.id)
        records.append(r)
    extra = set(preds) - seen
    if extra:
        log.warning("%d prediction ids have no ground truth and were ignored", len(extra))
    if not records:
        raise DatasetEmptyError(f"{gt_path}: dataset is empty")
    return records


def evaluate_dataset(path: str | Path, delta: float = DEFAULT_DELTA, level: str | None = None) -> MetricReport:
    return evaluate(load_dataset(path), delta, level)
