"""Cross-limb significance scoring and threshold filtering.

The pipeline per muscle: pool both limbs' envelope values, cluster them
in 1-D to derive shared histogram buckets (cluster count chosen by the
elbow rule), build one smoothed histogram per limb, score each limb's
divergence from the opposite limb, calibrate by skewness, normalize
scores across the whole comparison, and scale each envelope by its
normalized score to produce the highlighted series that the threshold
slider filters.

The 1-D clustering is solved exactly: optimal 1-D clusters are
contiguous in sorted order, so a divide-and-conquer dynamic program
finds the global within-cluster-sum-of-squares optimum for every K in
one pass.  This keeps results deterministic and independent of any
initialization.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .model import (
    AFFECTED,
    UNAFFECTED,
    Assessment,
    DomainError,
    Envelope,
    MuscleId,
)
from .signals import MOTION_METRICS, restrict_channel, restrict_track, rms_envelope


# ---------------------------------------------------------------------------
# exact 1-D clustering


def _segment_cost(s1, s2, j, i):
    """Sum of squared deviations of x[j..i] about its mean (prefix sums)."""
    cnt = i - j + 1
    s = s1[i + 1] - s1[j]
    q = s2[i + 1] - s2[j]
    return np.maximum(q - s * s / cnt, 0.0)


def _cluster_table(x_sorted: np.ndarray, k_max: int):
    """WCSS and optimal split points for every k in 1..k_max.

    Returns (wcss, opts) where wcss[k-1] is the global optimum for k
    clusters and opts[k-1][i] is the start index of the last cluster in
    the optimal k-clustering of x[0..i].  Split-point monotonicity makes
    each row computable by divide and conquer; ties break to the
    smallest split so results are reproducible bit for bit.
    """
    n = len(x_sorted)
    x0 = x_sorted - x_sorted.mean()  # shift improves conditioning only
    s1 = np.concatenate(([0.0], np.cumsum(x0)))
    s2 = np.concatenate(([0.0], np.cumsum(x0 * x0)))

    idx = np.arange(n)
    d_prev = _segment_cost(s1, s2, np.zeros(n, dtype=np.intp), idx)
    wcss = [float(d_prev[n - 1])]
    opts = [np.zeros(n, dtype=np.intp)]
    for k in range(2, k_max + 1):
        d_cur = np.full(n, np.inf)
        opt = np.zeros(n, dtype=np.intp)
        lo = np.array([k - 1], dtype=np.intp)
        hi = np.array([n - 1], dtype=np.intp)
        jlo = np.array([k - 1], dtype=np.intp)
        jhi = np.array([n - 1], dtype=np.intp)
        while len(lo):
            mid = (lo + hi) // 2
            jh = np.minimum(mid, jhi)
            counts = jh - jlo + 1
            total = int(counts.sum())
            starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
            i_cand = np.repeat(mid, counts)
            j_cand = np.arange(total) - np.repeat(starts, counts) + np.repeat(jlo, counts)
            vals = d_prev[j_cand - 1] + _segment_cost(s1, s2, j_cand, i_cand)
            gmin = np.minimum.reduceat(vals, starts)
            first = np.where(vals == np.repeat(gmin, counts), np.arange(total), total)
            jopt = j_cand[np.minimum.reduceat(first, starts)]
            d_cur[mid] = gmin
            opt[mid] = jopt
            lo_n = np.concatenate([lo, mid + 1])
            hi_n = np.concatenate([mid - 1, hi])
            jlo_n = np.concatenate([jlo, jopt])
            jhi_n = np.concatenate([jopt, jhi])
            keep = lo_n <= hi_n
            lo, hi, jlo, jhi = lo_n[keep], hi_n[keep], jlo_n[keep], jhi_n[keep]
        wcss.append(float(d_cur[n - 1]))
        opts.append(opt)
        d_prev = d_cur
    return wcss, opts


def _backtrack_centers(x_sorted: np.ndarray, opts, k: int) -> np.ndarray:
    segments = []
    i = len(x_sorted) - 1
    for kk in range(k, 0, -1):
        j = int(opts[kk - 1][i])
        segments.append((j, i))
        i = j - 1
    segments.reverse()
    return np.array([x_sorted[j : i + 1].mean() for j, i in segments])


def kmeans_1d(values, k: int) -> tuple[np.ndarray, float]:
    """Globally optimal 1-D k-means.

    Returns (sorted cluster means, within-cluster sum of squares).
    """
    x = np.sort(np.asarray(values, dtype=float))
    if len(x) == 0:
        raise DomainError("cannot cluster an empty value set")
    if k < 1 or k > len(x):
        raise DomainError(f"k must be in [1, {len(x)}]")
    wcss, opts = _cluster_table(x, k)
    return _backtrack_centers(x, opts, k), wcss[k - 1]


@dataclass(frozen=True)
class BucketSpec:
    """Shared histogram buckets for one muscle across both limbs.

    ``boundaries`` has k+1 cut points with open ends at +-inf; bucket i
    is the left-closed interval [boundaries[i], boundaries[i+1]).
    ``wcss`` holds the optimum for every candidate cluster count, for
    inspection of the elbow choice.
    """

    centers: np.ndarray
    boundaries: np.ndarray
    wcss: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.centers)


def _elbow_k(wcss: list[float], k_min: int, k_cap: int) -> int:
    """Cluster count at the sharpest bend of the WCSS curve.

    Second differences need both neighbors, so the curve is anchored at
    k=1 (total sum of squares); candidates without a right neighbor are
    not eligible.  Ties go to the smaller count.
    """
    if k_cap <= k_min:
        return k_cap
    best_k, best_d2 = k_min, -np.inf
    for k in range(k_min, k_cap):
        d2 = wcss[k - 2] - 2.0 * wcss[k - 1] + wcss[k]
        if d2 > best_d2:
            best_k, best_d2 = k, d2
    return best_k


def shared_buckets(
    values_affected,
    values_unaffected,
    k_range: tuple[int, int] = (2, 8),
) -> BucketSpec:
    """Cluster the pooled values of both limbs into shared buckets.

    Cluster count selection follows the elbow rule over the exact WCSS
    table; constant input degenerates to a single all-covering bucket.
    Bucket boundaries are midpoints between adjacent cluster means.
    """
    k_min, k_max = k_range
    if k_min < 2 or k_max < k_min:
        raise DomainError("k range must satisfy 2 <= k_min <= k_max")
    pooled = np.sort(
        np.concatenate(
            [np.asarray(values_affected, float), np.asarray(values_unaffected, float)]
        )
    )
    if len(pooled) == 0:
        raise DomainError("cannot build buckets from empty values")
    n_distinct = int(len(np.unique(pooled)))
    k_cap = min(k_max, n_distinct)
    if k_cap <= 1:
        center = float(pooled[0])
        return BucketSpec(
            centers=np.array([center]),
            boundaries=np.array([-np.inf, np.inf]),
            wcss=(0.0,),
        )
    wcss, opts = _cluster_table(pooled, k_cap)
    k = _elbow_k(wcss, k_min, k_cap)
    centers = np.unique(_backtrack_centers(pooled, opts, k))
    mids = 0.5 * (centers[:-1] + centers[1:])
    boundaries = np.concatenate(([-np.inf], mids, [np.inf]))
    return BucketSpec(centers=centers, boundaries=boundaries, wcss=tuple(wcss))


# ---------------------------------------------------------------------------
# histograms, divergence, skew calibration


@dataclass(frozen=True)
class ValueHistogram:
    """Bucketed distribution of one limb's envelope values.

    Probabilities carry additive (+1) smoothing so every bucket has
    nonzero mass and divergences stay finite.
    """

    bucket_centers: np.ndarray
    bucket_boundaries: np.ndarray
    counts: np.ndarray
    probabilities: np.ndarray


def histogram(values, buckets: BucketSpec) -> ValueHistogram:
    """Count values into shared buckets and smooth into probabilities."""
    x = np.asarray(values, dtype=float)
    if len(x) == 0:
        raise DomainError("cannot histogram empty values")
    k = buckets.k
    idx = np.searchsorted(buckets.boundaries[1:-1], x, side="right")
    counts = np.bincount(idx, minlength=k).astype(np.intp)
    probabilities = (counts + 1.0) / (len(x) + k)
    return ValueHistogram(
        bucket_centers=buckets.centers,
        bucket_boundaries=buckets.boundaries,
        counts=counts,
        probabilities=probabilities,
    )


def kl_divergence(q: ValueHistogram, p: ValueHistogram) -> float:
    """Divergence of distribution q from reference distribution p.

    Finite because both histograms are smoothed, and non-negative by
    Gibbs' inequality.
    """
    if len(q.probabilities) != len(p.probabilities) or not np.array_equal(
        q.bucket_boundaries, p.bucket_boundaries
    ):
        raise DomainError("histograms not comparable")
    return float(np.sum(q.probabilities * np.log(q.probabilities / p.probabilities)))


def skewness(values) -> float:
    """Fisher-Pearson adjusted sample skewness; 0 for flat input."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 3:
        raise DomainError("skewness needs at least 3 values")
    s = x.std(ddof=1)
    if s == 0.0:
        return 0.0
    centered = (x - x.mean()) / s
    return float(n / ((n - 1.0) * (n - 2.0)) * np.sum(centered**3))


@dataclass(frozen=True)
class MuscleSignificance:
    """Directed significance of one muscle on one limb.

    ``score`` shrinks the divergence when the limb's own value
    distribution is concentrated at small values (positive skew), so
    weak-but-noisy muscles do not outrank genuinely different ones.
    """

    muscle: MuscleId
    side: str
    divergence: float
    skewness: float
    skew_weight: float
    score: float
    normalized_score: float = 0.0


def significance_score(
    side_values,
    other_side_values,
    buckets: BucketSpec,
    muscle: MuscleId,
    side: str,
) -> MuscleSignificance:
    """Directed score: divergence from the opposite limb, skew-calibrated."""
    q = histogram(side_values, buckets)
    p = histogram(other_side_values, buckets)
    divergence = kl_divergence(q, p)
    x = np.asarray(side_values, dtype=float)
    gamma = skewness(x) if len(x) >= 3 else 0.0
    weight = 1.0 / (1.0 + max(0.0, gamma))
    return MuscleSignificance(
        muscle=muscle,
        side=side,
        divergence=divergence,
        skewness=gamma,
        skew_weight=weight,
        score=divergence * weight,
    )


# ---------------------------------------------------------------------------
# bundle comparison


@dataclass(frozen=True)
class CompareConfig:
    """Tunable parameters of the comparison pipeline."""

    window_s: float = 0.100
    hop_s: float = 0.010
    k_min: int = 2
    k_max: int = 8
    tau: float = 0.0
    motion_metric: str = "displacement"
    muted: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.window_s <= 0 or self.hop_s <= 0:
            raise DomainError("window_s and hop_s must be positive")
        if self.k_min < 2 or self.k_max < self.k_min:
            raise DomainError("k range must satisfy 2 <= k_min <= k_max")
        if not (0.0 <= self.tau <= 1.0):
            raise DomainError("tau must lie in [0, 1]")
        if self.motion_metric not in MOTION_METRICS:
            raise DomainError(
                f"motion_metric must be one of {sorted(MOTION_METRICS)}"
            )
        object.__setattr__(self, "muted", frozenset(self.muted))

    def fingerprint(self) -> str:
        """Stable digest of the non-interactive parameters."""
        blob = json.dumps(
            {
                "window_s": self.window_s,
                "hop_s": self.hop_s,
                "k_min": self.k_min,
                "k_max": self.k_max,
                "motion_metric": self.motion_metric,
                "smoothing": "laplace+1",
            },
            sort_keys=True,
        )
        return hashlib.sha1(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class HighlightedEnvelope:
    """An envelope plus its significance-scaled highlight.

    ``highlighted`` is the base series scaled by the muscle's normalized
    score, so it never exceeds the base; ``visible_mask`` marks samples
    surviving the current threshold.
    """

    muscle: MuscleId
    side: str
    base: Envelope
    highlighted: np.ndarray
    visible_mask: np.ndarray

    @property
    def visible(self) -> bool:
        return bool(self.visible_mask.any())


@dataclass(frozen=True)
class BundleComparison:
    """Paired affected/unaffected envelopes with significance state."""

    patient_id: str
    motion_type: str
    config: CompareConfig
    muscles: tuple[MuscleId, ...]
    charts: dict[tuple[str, str], HighlightedEnvelope]
    scores: dict[tuple[str, str], MuscleSignificance]
    threshold: float
    muted: frozenset[str]
    unpaired: tuple[str, ...]
    h_max: float
    motion: Optional[dict[str, tuple[np.ndarray, np.ndarray]]] = None

    def chart(self, muscle: str, side: str) -> HighlightedEnvelope:
        return self.charts[(muscle, side)]

    def base_envelopes(self, side: str) -> dict[str, Envelope]:
        return {
            m.name: self.charts[(m.name, side)].base for m in self.muscles
        }


@dataclass(frozen=True)
class VisibilityReport:
    """Chart visibility under the current threshold."""

    tau: float
    h_max: float
    chart_visible: dict[tuple[str, str], bool]
    collapsed: tuple[str, ...]
    surviving: tuple[str, ...]


def _visible_mask(highlighted: np.ndarray, tau: float, h_max: float) -> np.ndarray:
    if tau <= 0.0:
        return np.ones(len(highlighted), dtype=bool)
    cutoff = tau * h_max
    if cutoff > 0.0:
        return highlighted >= cutoff
    # Nothing stands out anywhere (h_max == 0): any positive threshold
    # collapses every chart.
    return highlighted > 0.0


def _with_state(
    comparison: BundleComparison, tau: float, muted: frozenset[str]
) -> BundleComparison:
    """Recompute normalization, highlights and masks for new interactive state."""
    if not (0.0 <= tau <= 1.0):
        raise DomainError("tau must lie in [0, 1]")
    names = [m.name for m in comparison.muscles]
    active = [n for n in names if n not in muted]
    if not active:
        raise DomainError("cannot mute all muscles")
    max_score = max(
        (comparison.scores[(n, side)].score for n in active for side in (AFFECTED, UNAFFECTED)),
        default=0.0,
    )
    scores = {}
    charts = {}
    for n in names:
        for side in (AFFECTED, UNAFFECTED):
            entry = comparison.scores[(n, side)]
            if n in muted or max_score <= 0.0:
                norm = 0.0
            else:
                norm = entry.score / max_score
            scores[(n, side)] = replace(entry, normalized_score=norm)
            base = comparison.charts[(n, side)].base
            charts[(n, side)] = HighlightedEnvelope(
                muscle=entry.muscle,
                side=side,
                base=base,
                highlighted=base.values * norm,
                visible_mask=np.zeros(len(base), dtype=bool),
            )
    h_max = max(
        (float(charts[(n, side)].highlighted.max()) for n in active
         for side in (AFFECTED, UNAFFECTED) if len(charts[(n, side)].highlighted)),
        default=0.0,
    )
    for n in names:
        for side in (AFFECTED, UNAFFECTED):
            ch = charts[(n, side)]
            if n in muted:
                mask = np.zeros(len(ch.highlighted), dtype=bool)
            else:
                mask = _visible_mask(ch.highlighted, tau, h_max)
            charts[(n, side)] = replace(ch, visible_mask=mask)
    return replace(
        comparison,
        charts=charts,
        scores=scores,
        threshold=tau,
        muted=muted,
        h_max=h_max,
    )


def compare_bundles(
    affected: Assessment, unaffected: Assessment, config: CompareConfig = CompareConfig()
) -> BundleComparison:
    """Score every paired muscle's cross-limb difference.

    Envelopes are computed on each side's retained interval; muscles
    present on only one side are reported unpaired and excluded from
    scoring.  Scores are normalized so the most significant chart in the
    comparison is exactly 1.
    """
    if affected.patient_id != unaffected.patient_id:
        raise DomainError("assessments must belong to one patient")
    if affected.motion_type != unaffected.motion_type:
        raise DomainError("assessments must record the same motion")
    if affected.side != AFFECTED or unaffected.side != UNAFFECTED:
        raise DomainError("sides must differ: pass (affected, unaffected)")

    paired = [
        ch.muscle
        for ch in affected.channels.values()
        if ch.muscle.name in unaffected.channels
    ]
    unpaired = tuple(
        sorted(set(affected.channels) ^ set(unaffected.channels))
    )
    if not paired:
        raise DomainError("no muscle appears on both sides")

    k_range = (config.k_min, config.k_max)
    scores: dict[tuple[str, str], MuscleSignificance] = {}
    charts: dict[tuple[str, str], HighlightedEnvelope] = {}
    for muscle in paired:
        env = {}
        for side, assessment in ((AFFECTED, affected), (UNAFFECTED, unaffected)):
            chan = restrict_channel(
                assessment.channels[muscle.name], *assessment.retained_interval
            )
            env[side] = rms_envelope(chan, config.window_s, config.hop_s)
        buckets = shared_buckets(env[AFFECTED].values, env[UNAFFECTED].values, k_range)
        for side, other in ((AFFECTED, UNAFFECTED), (UNAFFECTED, AFFECTED)):
            scores[(muscle.name, side)] = significance_score(
                env[side].values, env[other].values, buckets, muscle, side
            )
            charts[(muscle.name, side)] = HighlightedEnvelope(
                muscle=muscle,
                side=side,
                base=env[side],
                highlighted=env[side].values * 0.0,
                visible_mask=np.zeros(len(env[side]), dtype=bool),
            )

    motion = {}
    metric = MOTION_METRICS[config.motion_metric]
    for side, assessment in ((AFFECTED, affected), (UNAFFECTED, unaffected)):
        if assessment.motion is not None:
            track = restrict_track(assessment.motion, *assessment.retained_interval)
            if len(track) >= 3:
                motion[side] = metric(track)

    muted = frozenset(n for n in config.muted if n in {m.name for m in paired})
    skeleton = BundleComparison(
        patient_id=affected.patient_id,
        motion_type=affected.motion_type,
        config=config,
        muscles=tuple(paired),
        charts=charts,
        scores=scores,
        threshold=config.tau,
        muted=muted,
        unpaired=unpaired,
        h_max=0.0,
        motion=motion or None,
    )
    return _with_state(skeleton, config.tau, muted)


def apply_threshold(comparison: BundleComparison, tau: float) -> BundleComparison:
    """Re-filter all charts against tau * (global highlighted maximum)."""
    return _with_state(comparison, tau, comparison.muted)


def set_state(
    comparison: BundleComparison, tau: float, muted
) -> BundleComparison:
    """Set threshold and muted set together (restoring saved analyst state)."""
    names = {m.name for m in comparison.muscles}
    return _with_state(comparison, tau, frozenset(muted) & names)


def mute_muscle(comparison: BundleComparison, muscle: str) -> BundleComparison:
    """Remove a muscle from the comparison; remaining scores rescale."""
    if muscle not in {m.name for m in comparison.muscles}:
        raise DomainError(f"unknown muscle '{muscle}'")
    return _with_state(comparison, comparison.threshold, comparison.muted | {muscle})


def unmute_muscle(comparison: BundleComparison, muscle: str) -> BundleComparison:
    """Reverse of mute_muscle; restores the original scaling exactly."""
    return _with_state(comparison, comparison.threshold, comparison.muted - {muscle})


def visibility_report(comparison: BundleComparison) -> VisibilityReport:
    """Which charts survive the current threshold, and which rows collapse."""
    chart_visible = {}
    collapsed = []
    surviving = []
    for m in comparison.muscles:
        vis_a = comparison.charts[(m.name, AFFECTED)].visible
        vis_u = comparison.charts[(m.name, UNAFFECTED)].visible
        chart_visible[(m.name, AFFECTED)] = vis_a
        chart_visible[(m.name, UNAFFECTED)] = vis_u
        if vis_a or vis_u:
            surviving.append(m.name)
        else:
            collapsed.append(m.name)
    return VisibilityReport(
        tau=comparison.threshold,
        h_max=comparison.h_max,
        chart_visible=chart_visible,
        collapsed=tuple(collapsed),
        surviving=tuple(surviving),
    )
