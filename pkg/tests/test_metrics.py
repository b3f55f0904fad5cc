import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneighbor.errors import UndefinedMetricError
from coneighbor.metrics import auc_roc, average_precision


def naive_ap(scores, labels):
    """Quadratic-ish reference: explicit rank walk, stable tie order."""
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    tp = 0
    precisions = []
    for rank, i in enumerate(order, start=1):
        if labels[i]:
            tp += 1
            precisions.append(tp / rank)
    return sum(precisions) / len(precisions)


def naive_auc(scores, labels):
    """All positive/negative pairs compared directly."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestAveragePrecision:
    def test_positives_ranked_first(self):
        assert average_precision([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0

    def test_single_positive_at_rank_two(self):
        assert average_precision([0.9, 0.1], [0, 1]) == 0.5

    def test_all_positive(self):
        assert average_precision([0.3, 0.2, 0.9], [1, 1, 1]) == 1.0

    def test_no_positives_undefined(self):
        with pytest.raises(UndefinedMetricError):
            average_precision([0.5, 0.4], [0, 0])

    def test_ties_resolved_by_input_order(self):
        # equal scores: the stable sort keeps the positive after the negative
        assert average_precision([0.5, 0.5], [0, 1]) == 0.5
        assert average_precision([0.5, 0.5], [1, 0]) == 1.0

    def test_random_scores_near_half(self):
        r = np.random.default_rng(0)
        ap = average_precision(r.random(10_000), r.random(10_000) < 0.5)
        assert ap == pytest.approx(0.5, abs=0.02)


class TestAucRoc:
    def test_perfect_separation(self):
        assert auc_roc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0

    def test_perfectly_wrong(self):
        assert auc_roc([0.9, 0.1], [0, 1]) == 0.0

    def test_all_equal_scores(self):
        assert auc_roc([0.4, 0.4, 0.4, 0.4], [1, 0, 1, 0]) == 0.5

    @pytest.mark.parametrize("labels", [[1, 1], [0, 0]])
    def test_single_class_undefined(self, labels):
        with pytest.raises(UndefinedMetricError):
            auc_roc([0.5, 0.6], labels)

    def test_random_scores_near_half(self):
        r = np.random.default_rng(1)
        auc = auc_roc(r.random(10_000), r.random(10_000) < 0.5)
        assert auc == pytest.approx(0.5, abs=0.02)

    def test_label_flip_complements(self):
        r = np.random.default_rng(2)
        s = r.integers(0, 10, 200) / 10.0      # heavy ties
        y = r.random(200) < 0.4
        assert auc_roc(s, y) + auc_roc(s, ~y) == pytest.approx(1.0)


class TestInputValidation:
    def test_length_mismatch(self):
        with pytest.raises(UndefinedMetricError):
            average_precision([0.5], [1, 0])

    def test_empty(self):
        with pytest.raises(UndefinedMetricError):
            auc_roc([], [])

    def test_nan_scores_rejected(self):
        with pytest.raises(UndefinedMetricError):
            average_precision([np.nan, 0.5], [1, 0])


class TestAgainstNaive:
    def test_continuous_scores(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 60))
            s = rng.random(n)
            y = rng.random(n) < 0.5
            if y.any():
                assert average_precision(s, y) == pytest.approx(
                    naive_ap(s, y), abs=1e-12)
            if y.any() and not y.all():
                assert auc_roc(s, y) == pytest.approx(naive_auc(s, y),
                                                      abs=1e-12)

    def test_discrete_scores_force_ties(self, rng):
        for _ in range(100):
            n = int(rng.integers(4, 60))
            s = rng.integers(0, 4, n) / 4.0
            y = rng.random(n) < 0.5
            if y.any():
                assert average_precision(s, y) == pytest.approx(
                    naive_ap(s, y), abs=1e-12)
            if y.any() and not y.all():
                assert auc_roc(s, y) == pytest.approx(naive_auc(s, y),
                                                      abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1, allow_nan=False, width=32),
                          st.booleans()), min_size=2, max_size=40))
def test_bounds_and_oracle_property(pairs):
    scores = [s for s, _ in pairs]
    labels = [y for _, y in pairs]
    if any(labels):
        ap = average_precision(scores, labels)
        assert 0.0 <= ap <= 1.0
        assert ap == pytest.approx(naive_ap(scores, labels), abs=1e-12)
    if any(labels) and not all(labels):
        auc = auc_roc(scores, labels)
        assert 0.0 <= auc <= 1.0
        assert auc == pytest.approx(naive_auc(scores, labels), abs=1e-12)
