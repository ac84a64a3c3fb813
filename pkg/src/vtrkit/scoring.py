"""Reward math: NED, Hungarian matching, semantic/structural scores, composite reward."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from vtrkit import _kernels
from vtrkit.marked import (
    SENTINEL,
    Language,
    MarkedTranscript,
    anomaly_counts,
    parse_marked,
    tokenize,
)

DEFAULT_OMEGA = 5.0
EVAL_OMEGA = 1.0


@dataclass(frozen=True)
class RewardConfig:
    omega: float = DEFAULT_OMEGA
    w_semantic: float = 0.5
    w_quality: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        for name in ("w_semantic", "w_quality"):
            w = getattr(self, name)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {w}")
        if abs(self.w_semantic + self.w_quality - 1.0) > 1e-12:
            raise ValueError("w_semantic + w_quality must equal 1")

    @classmethod
    def with_overrides(cls, omega=None, w_semantic=None, w_quality=None, base: "RewardConfig | None" = None):
        """Apply optional overrides; a single weight implies its complement."""
        base = base or cls()
        if w_semantic is not None and w_quality is None:
            w_quality = 1.0 - w_semantic
        elif w_quality is not None and w_semantic is None:
            w_semantic = 1.0 - w_quality
        return cls(
            omega=base.omega if omega is None else omega,
            w_semantic=base.w_semantic if w_semantic is None else w_semantic,
            w_quality=base.w_quality if w_quality is None else w_quality,
        )


@dataclass(frozen=True)
class ScoreReport:
    semantic: float
    quality: float
    reward: float
    matching: tuple[tuple[int, int, float], ...]
    unmatched_count: int
    n_anomalous: int = 0
    n_total: int = 0
    config: RewardConfig = field(default_factory=RewardConfig)

    def to_dict(self) -> dict:
        return {
            "semantic": self.semantic,
            "quality": self.quality,
            "reward": self.reward,
            "unmatched": self.unmatched_count,
            "n_anomalous": self.n_anomalous,
            "n_total": self.n_total,
            "matching": [list(m) for m in self.matching],
            "omega": self.config.omega,
            "w_semantic": self.config.w_semantic,
            "w_quality": self.config.w_quality,
        }


def _clip01(x: float) -> float:
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else x


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over Unicode scalar values."""
    if a == b:
        return 0
    codes, off = _kernels.encode([a, b])
    return int(_kernels.levenshtein_codes(codes[: off[1]], codes[off[1]:], _kernels.peq_table()))


def ned(a: str, b: str) -> float:
    """Levenshtein distance divided by the longer length (0 for two empties)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def ned_matrix(rows: Sequence[str], cols: Sequence[str]) -> np.ndarray:
    """Pairwise NED between two token lists, shape ``(len(rows), len(cols))``."""
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)))
    ca, oa = _kernels.encode(rows)
    cb, ob = _kernels.encode(cols)
    return _kernels.ned_matrix(ca, oa, cb, ob, _kernels.peq_table())


def hungarian_match(costs) -> list[tuple[int, int]]:
    """Minimum-cost assignment of cardinality ``min(m, n)``.

    Ties between optimal assignments are broken toward the lexicographically
    smallest sorted list of ``(row, col)`` pairs.
    """
    c = np.asarray(costs, dtype=np.float64)
    if c.size == 0:
        return []
    if c.ndim != 2:
        raise ValueError("cost matrix must be two-dimensional")
    if not np.all(np.isfinite(c)) or (c < 0).any():
        raise ValueError("costs must be finite and non-negative")
    cols = _kernels.lex_min_assignment(c)
    k = c.shape[1]
    return [(i, int(j)) for i, j in enumerate(cols) if j < k]


def semantic_score(
    target: Sequence[str], prediction: MarkedTranscript
) -> tuple[float, list[tuple[int, int, float]], int]:
    """Word-matched semantic alignment.

    Returns ``(score, matching, unmatched_count)``; matching entries are
    ``(target index, prediction unit index, ned)``.
    """
    units = prediction.units()
    n_t, n_p = len(target), len(units)
    if n_t == 0 and n_p == 0:
        return 1.0, [], 0
    matching, dists = [], []
    if n_t and n_p:
        # costs come from ned_matrix, so hungarian_match's input checks are skipped
        costs = ned_matrix(list(target), units)
        cols = _kernels.lex_min_assignment(costs)
        rows = np.flatnonzero(cols < n_p)
        dists = costs[rows, cols[rows]].tolist()
        matching = list(zip(rows.tolist(), cols[rows].tolist(), dists))
    penalty = n_t + n_p - 2 * len(matching)
    total = math.fsum(dists) + penalty
    return _clip01(1.0 - total / max(n_t, n_p)), matching, penalty


def structural_score(n_anomalous: int, n_total: int, omega: float) -> float:
    if n_anomalous < 0 or n_anomalous > n_total:
        raise ValueError(f"need 0 <= anomalous <= total, got ({n_anomalous}, {n_total})")
    if n_total == 0:
        return 1.0
    return _clip01(1.0 - omega * n_anomalous / n_total)


def score_transcript(
    target_text: str, prediction: MarkedTranscript, cfg: RewardConfig | None = None
) -> ScoreReport:
    cfg = cfg or RewardConfig()
    if SENTINEL in target_text:
        raise ValueError("target text must not contain the sentinel character")
    target = tokenize(target_text, prediction.language)
    s_e, matching, unmatched = semantic_score(target, prediction)
    n_a, n_p = anomaly_counts(prediction)
    s_q = structural_score(n_a, n_p, cfg.omega)
    reward = cfg.w_semantic * s_e + cfg.w_quality * s_q
    return ScoreReport(s_e, s_q, reward, tuple(matching), unmatched, n_a, n_p, cfg)


def composite_reward(
    target_text: str,
    prediction_raw: str,
    language: Language | str,
    cfg: RewardConfig | None = None,
) -> ScoreReport:
    """Parse a marked prediction and score it against the target text."""
    return score_transcript(target_text, parse_marked(prediction_raw, language), cfg)


def ocr_baseline_reward(target: str, prediction_plain: str) -> float:
    """String-level accuracy ``1 - edits / len(target)``, clipped to [0, 1]."""
    if not target:
        raise ValueError("target must be non-empty")
    return _clip01(1.0 - levenshtein(target, prediction_plain) / len(target))
