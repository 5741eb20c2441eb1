"""Comparative analytics for cross-limb EMG motion assessments.

The package turns paired limb recordings (raw EMG channels, a motion
track and a video reference) into scored, highlightable muscle-activity
comparisons: RMS envelopes, shared-bucket histograms, divergence scores
calibrated by skewness, and threshold-driven collapse of insignificant
charts. A FastAPI service and a batch CLI expose the same engine.
"""

__version__ = "0.1.0"

from .model import (
    AFFECTED,
    UNAFFECTED,
    Assessment,
    Envelope,
    MotionTrack,
    MuscleId,
    ProportionSummary,
    RawEmgChannel,
    default_catalog,
)
from .signals import (
    derive_acceleration,
    derive_displacement,
    derive_speed,
    proportion_summary,
    resample_to_grid,
    rms_envelope,
    truncate,
)
from .significance import (
    BundleComparison,
    CompareConfig,
    HighlightedEnvelope,
    MuscleSignificance,
    ValueHistogram,
    apply_threshold,
    compare_bundles,
    histogram,
    kl_divergence,
    mute_muscle,
    shared_buckets,
    significance_score,
    skewness,
    unmute_muscle,
    visibility_report,
)

__all__ = [
    "AFFECTED",
    "UNAFFECTED",
    "Assessment",
    "BundleComparison",
    "CompareConfig",
    "Envelope",
    "HighlightedEnvelope",
    "MotionTrack",
    "MuscleId",
    "MuscleSignificance",
    "ProportionSummary",
    "RawEmgChannel",
    "ValueHistogram",
    "apply_threshold",
    "compare_bundles",
    "default_catalog",
    "derive_acceleration",
    "derive_displacement",
    "derive_speed",
    "histogram",
    "kl_divergence",
    "mute_muscle",
    "proportion_summary",
    "resample_to_grid",
    "rms_envelope",
    "shared_buckets",
    "significance_score",
    "skewness",
    "truncate",
    "unmute_muscle",
    "visibility_report",
]
