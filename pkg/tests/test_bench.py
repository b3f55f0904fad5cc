import pytest

from coneighbor.bench import _fit_axis, format_report, run_bench
from coneighbor.errors import ConfigError


class TestFitAxis:
    def test_linear_through_origin_doubles(self):
        ax = _fit_axis("sequence_length", [4, 8, 16, 32],
                       [0.004, 0.008, 0.016, 0.032])
        assert ax.doubling_ratio == pytest.approx(2.0)
        assert ax.slope == pytest.approx(1e-3)

    def test_constant_time_ratio_one(self):
        ax = _fit_axis("hashtable_size", [16, 32, 64], [0.01, 0.01, 0.01])
        assert ax.doubling_ratio == pytest.approx(1.0)

    def test_offset_dominated_ratio_between(self):
        # large fixed cost, small linear part: ratio lands in (1, 2)
        ax = _fit_axis("sequence_length", [8, 16, 32],
                       [0.010 + 8e-5 * 8, 0.010 + 8e-5 * 16,
                        0.010 + 8e-5 * 32])
        assert 1.0 < ax.doubling_ratio < 2.0

    def test_degenerate_fit_rejected(self):
        # fitted line crosses zero at the half-range evaluation point
        with pytest.raises(ConfigError):
            _fit_axis("sequence_length", [4, 8], [0.0, 0.02])


@pytest.fixture(scope="module")
def report():
    return run_bench(batch_size=50, num_nodes=80, num_events=1_500,
                     seq_lens=(4, 8, 16), widths=(16, 32, 64), repeats=2,
                     seed=0)


class TestRunBench:
    def test_structure(self, report):
        assert report.seq_axis.values == [4, 8, 16]
        assert report.width_axis.values == [16, 32, 64]
        assert all(s > 0 for s in report.seq_axis.seconds)
        assert all(s > 0 for s in report.width_axis.seconds)
        assert report.notes

    def test_roundtrips_to_dict(self, report):
        d = report.to_dict()
        assert d["sequence_length"]["values"] == [4, 8, 16]
        assert len(d["hashtable_size"]["seconds"]) == 3

    def test_format_mentions_both_axes(self, report):
        text = format_report(report)
        assert "sequence_length" in text
        assert "hashtable_size" in text
        assert "doubling ratio" in text
