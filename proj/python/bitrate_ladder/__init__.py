"""Per-scene bitrate ladder construction."""

from ._core import (
    CrfRateModel,
    MonotoneCubic,
    Resolution,
    RQPoint,
    ToolError,
    ValidationError,
    bd_metrics,
    fit_crf_rate,
    ground_truth_predictions,
    label,
    nearest_by_bitrate,
    pareto_front,
    plan_pre_encodes,
    reference_ladder,
    round_and_clamp_crf,
    synthetic_sweep,
    validate_predictions,
)

__all__ = [
    "CrfRateModel",
    "MonotoneCubic",
    "Resolution",
    "RQPoint",
    "ToolError",
    "ValidationError",
    "bd_metrics",
    "fit_crf_rate",
    "ground_truth_predictions",
    "label",
    "nearest_by_bitrate",
    "pareto_front",
    "plan_pre_encodes",
    "reference_ladder",
    "round_and_clamp_crf",
    "synthetic_sweep",
    "validate_predictions",
]
