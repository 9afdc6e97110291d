import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from pbitsim.smtj import (
    MtjState,
    SmtjParams,
    TelegraphTrace,
    dwell_times,
    occupancy_ap,
    r_antiparallel,
    sample_trajectory,
    switching_times,
)

SLOW = SmtjParams()  # 27.6 kOhm / 14.5% / 4.2 ms reference device
FAST = SmtjParams(tmr=0.30, tau_mean=68.9e-6, window_width=0.2e-3)


class TestRAntiparallel:
    def test_reference_device(self):
        assert r_antiparallel(SLOW) == pytest.approx(31602.0, rel=1e-12)

    def test_zero_tmr_identity(self):
        assert r_antiparallel(SmtjParams(r_parallel=5e4, tmr=0.0)) == 5e4

    def test_thirty_percent(self):
        p = SmtjParams(r_parallel=100e3, tmr=0.30)
        assert r_antiparallel(p) == pytest.approx(130e3, rel=1e-12)


class TestParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"r_parallel": 0.0},
            {"r_parallel": -1.0},
            {"tmr": -0.1},
            {"tau_mean": 0.0},
            {"window_width": -1e-3},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SmtjParams(**kwargs)

    def test_json_roundtrip_exact_keys(self):
        obj = SLOW.to_json()
        assert set(obj) == {
            "r_parallel_ohm",
            "tmr",
            "tau_mean_s",
            "b_5050_T",
            "window_width_T",
        }
        assert SmtjParams.from_json(json.loads(json.dumps(obj))) == SLOW


class TestOccupancy:
    def test_half_at_5050_point(self):
        assert occupancy_ap(SLOW, SLOW.b_5050) == 0.5

    def test_saturates_far_above_window(self):
        assert occupancy_ap(SLOW, SLOW.b_5050 + 10 * SLOW.window_width) < 1e-4
        assert occupancy_ap(SLOW, SLOW.b_5050 - 10 * SLOW.window_width) > 1 - 1e-4

    def test_window_edges(self):
        # fluctuation visible between -7.5 and -6.9 mT for the 0.6 mT window
        assert occupancy_ap(SLOW, -7.5e-3) >= 0.9
        assert occupancy_ap(SLOW, -6.9e-3) <= 0.1

    @given(
        b1=st.floats(-10e-3, -4e-3),
        b2=st.floats(-10e-3, -4e-3),
    )
    def test_monotone_decreasing(self, b1, b2):
        lo, hi = min(b1, b2), max(b1, b2)
        o_lo, o_hi = occupancy_ap(SLOW, lo), occupancy_ap(SLOW, hi)
        assert 0.0 <= o_hi <= o_lo <= 1.0
        if hi - lo > 1e-6:
            assert o_hi < o_lo


class TestDwellTimes:
    def test_equal_at_5050(self):
        assert dwell_times(SLOW, SLOW.b_5050) == (SLOW.tau_mean, SLOW.tau_mean)

    def test_split_at_075_occupancy(self):
        # logistic inverse: occupancy 0.75 at b_5050 + scale * ln(1/3)
        b = SLOW.b_5050 + (SLOW.window_width / 8) * np.log(1.0 / 3.0)
        assert occupancy_ap(SLOW, b) == pytest.approx(0.75, rel=1e-12)
        tau_ap, tau_p = dwell_times(SLOW, b)
        assert tau_ap == pytest.approx(1.5 * SLOW.tau_mean, rel=1e-9)
        assert tau_p == pytest.approx(0.5 * SLOW.tau_mean, rel=1e-9)

    def test_reference_dwell(self):
        tau_ap, tau_p = dwell_times(SLOW, SLOW.b_5050)
        assert tau_ap == pytest.approx(4.2e-3)
        assert tau_p == pytest.approx(4.2e-3)

    @given(b=st.floats(-9e-3, -5e-3))
    def test_split_identities(self, b):
        tau_ap, tau_p = dwell_times(SLOW, b)
        assert tau_ap + tau_p == pytest.approx(2 * SLOW.tau_mean, rel=1e-12)
        assert tau_ap / (tau_ap + tau_p) == pytest.approx(
            occupancy_ap(SLOW, b), rel=1e-12
        )


class TestSampleTrajectory:
    def test_deterministic(self):
        a = sample_trajectory(FAST, FAST.b_5050, 0.05, 1e-6, seed=3)
        b = sample_trajectory(FAST, FAST.b_5050, 0.05, 1e-6, seed=3)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.labels, b.labels)

    def test_two_level_exact(self):
        tr = sample_trajectory(SLOW, SLOW.b_5050, 0.5, 1e-4, seed=9)
        assert np.isin(tr.values, [SLOW.r_parallel, r_antiparallel(SLOW)]).all()
        assert np.array_equal(
            tr.values == r_antiparallel(SLOW), tr.labels == MtjState.ANTIPARALLEL
        )

    def test_occupancy_converges(self):
        tr = sample_trajectory(FAST, FAST.b_5050, 1e4 * FAST.tau_mean, FAST.tau_mean / 10, seed=17)
        assert abs(tr.labels.mean() - 0.5) < 0.02

    def test_far_field_constant_antiparallel(self):
        tr = sample_trajectory(SLOW, SLOW.b_5050 - 20 * SLOW.window_width, 0.1, 4e-5, seed=1)
        assert np.all(tr.values == r_antiparallel(SLOW))

    def test_reference_run_length(self):
        # 4.2 ms dwell sampled at 100 kHz: mean run of identical labels near 420
        tr = sample_trajectory(SLOW, SLOW.b_5050, 50.0, 1e-5, seed=21)
        edges = np.flatnonzero(np.diff(tr.labels)) + 1
        runs = np.diff(np.concatenate([[0], edges, [len(tr)]]))[1:-1]
        assert runs.mean() == pytest.approx(420, rel=0.15)

    @pytest.mark.parametrize("duration,dt", [(0.0, 1e-5), (1.0, 0.0), (1e-6, 1e-5)])
    def test_rejects_bad_args(self, duration, dt):
        with pytest.raises(ValueError):
            sample_trajectory(SLOW, SLOW.b_5050, duration, dt, seed=0)

    def test_warns_on_coarse_dt(self):
        with pytest.warns(UserWarning, match="dwells"):
            sample_trajectory(SLOW, SLOW.b_5050, 0.2, 1e-3, seed=0)


class TestStatisticalInvariants:
    def test_occupancy_within_002_for_95_of_100_seeds(self):
        duration = 1e4 * FAST.tau_mean
        good = 0
        for seed in range(100):
            tr = sample_trajectory(FAST, FAST.b_5050, duration, FAST.tau_mean / 10, seed)
            good += abs(tr.labels.mean() - 0.5) < 0.02
        assert good >= 95

    def test_holding_times_exponential_ks_95_of_100_seeds(self):
        duration = 1400 * FAST.tau_mean
        good = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            _, times = switching_times(FAST, FAST.b_5050, duration, rng)
            holds = np.diff(np.concatenate([[0.0], times]))
            assert holds.size >= 1000
            p_value = stats.kstest(holds, "expon", args=(0, FAST.tau_mean)).pvalue
            good += p_value >= 0.01
        assert good >= 95

    def test_switching_times_sorted_within_duration(self):
        rng = np.random.default_rng(5)
        _, times = switching_times(SLOW, SLOW.b_5050, 1.0, rng)
        assert np.all(np.diff(times) > 0)
        assert times[-1] < 1.0


class TestTraceCsv:
    def test_roundtrip_with_labels(self):
        tr = sample_trajectory(FAST, FAST.b_5050, 0.01, 5e-6, seed=4)
        buf = io.StringIO()
        tr.to_csv(buf)
        buf.seek(0)
        back = TelegraphTrace.from_csv(buf)
        assert back.sample_interval == pytest.approx(tr.sample_interval, rel=1e-9)
        assert np.array_equal(back.values, tr.values)
        assert np.array_equal(back.labels, tr.labels)

    def test_unlabeled_omits_state_column(self):
        tr = TelegraphTrace(sample_interval=1e-3, values=np.array([1.0, 2.0, 3.0]))
        buf = io.StringIO()
        tr.to_csv(buf)
        assert buf.getvalue().splitlines()[0] == "time_s,resistance_ohm"

    def test_trace_validation(self):
        with pytest.raises(ValueError):
            TelegraphTrace(sample_interval=0.0, values=np.array([1.0]))
        with pytest.raises(ValueError):
            TelegraphTrace(sample_interval=1.0, values=np.array([]))
        with pytest.raises(ValueError):
            TelegraphTrace(
                sample_interval=1.0,
                values=np.array([1.0, 2.0]),
                labels=np.array([0], dtype=np.uint8),
            )
