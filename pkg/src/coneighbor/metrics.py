"""Ranking metrics: average precision and ROC-AUC.

Both are computed from ranks in O(n log n) numpy and are cross-checked in
the tests against naive quadratic definitions to 1e-12.
"""

from __future__ import annotations

import numpy as np

from .errors import UndefinedMetricError


def _validate(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise UndefinedMetricError("scores and labels must be equal-length 1-d")
    if scores.size == 0:
        raise UndefinedMetricError("no samples")
    if not np.all(np.isfinite(scores)):
        raise UndefinedMetricError("non-finite scores")
    labels = labels.astype(bool)
    return scores, labels


def average_precision(scores, labels) -> float:
    """Mean over positives of precision at that positive's rank.

    Items are ranked by descending score; equal scores keep their input
    order (stable sort), so ties are resolved deterministically.
    """
    scores, labels = _validate(scores, labels)
    if not labels.any():
        raise UndefinedMetricError("average precision needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    hits = labels[order]
    csum = np.cumsum(hits)
    ranks = np.arange(1, scores.size + 1)
    return float((csum[hits] / ranks[hits]).mean())


def auc_roc(scores, labels) -> float:
    """Probability a random positive outranks a random negative.

    Rank-sum (Mann-Whitney) formulation with midrank handling, so tied
    scores contribute half credit.
    """
    scores, labels = _validate(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("auc needs both a positive and a negative")
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    # midranks: average the 1-based rank over each tie group
    uniq, inv, counts = np.unique(sorted_scores, return_inverse=True,
                                  return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    midranks = (starts + ends + 1) / 2.0     # 1-based average rank per value
    ranks = np.empty(scores.size, dtype=np.float64)
    ranks[order] = midranks[inv]
    rank_sum_pos = ranks[labels].sum()
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
