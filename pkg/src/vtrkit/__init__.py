"""Structure-aware scoring, benchmark metrics and synthetic data for visual text rendering."""

from vtrkit.marked import (
    Language,
    MarkedTextError,
    MarkedTranscript,
    Token,
    anomaly_counts,
    parse_marked,
    strip_markers,
    tokenize,
)
from vtrkit.scoring import (
    RewardConfig,
    ScoreReport,
    composite_reward,
    hungarian_match,
    ned,
    ocr_baseline_reward,
    semantic_score,
    structural_score,
)

__version__ = "0.1.0"

__all__ = [
    "Language", "MarkedTextError", "MarkedTranscript", "Token", "anomaly_counts", "parse_marked",
    "strip_markers", "tokenize",
    "RewardConfig", "ScoreReport", "composite_reward", "hungarian_match", "ned", "ocr_baseline_reward",
    "semantic_score", "structural_score",
]
