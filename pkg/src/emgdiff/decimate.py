"""Peak-preserving downsampling for transport payloads.

Clinicians judge spikes; naive striding hides them.  Each output bucket
keeps the sample indices of its minimum and maximum, so every series'
global extremes survive decimation exactly.
"""
from __future__ import annotations

import numpy as np


def minmax_indices(values, max_points: int) -> np.ndarray:
    """Indices of a min/max-preserving subset with at most max_points entries.

    Returning indices, not values, lets aligned series (base envelope,
    highlight, mask) share one selection.
    """
    v = np.asarray(values, dtype=float)
    n = len(v)
    if max_points < 2:
        raise ValueError("max_points must be at least 2")
    if n <= max_points:
        return np.arange(n)
    buckets = max_points // 2
    edges = np.linspace(0, n, buckets + 1).astype(int)
    keep = set()
    for b in range(buckets):
        lo, hi = edges[b], edges[b + 1]
        if hi <= lo:
            continue
        seg = v[lo:hi]
        keep.add(lo + int(np.argmin(seg)))
        keep.add(lo + int(np.argmax(seg)))
    return np.array(sorted(keep), dtype=int)
