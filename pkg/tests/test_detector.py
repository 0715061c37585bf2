import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.detector.alarm_log import AlarmLog, alarm_frequency, alarm_record, summary_record
from src.detector.stopping_rules import (
    Detector,
    DetectorConfig,
    DetectorState,
    Procedure,
    musuc_step,
    rs_step,
    run_detector,
    run_on_e_values,
)
from src.epredictor.scores import ConstantScore, KNNScore
from src.oracle.brute_force import brute_force_musuc, brute_force_rs
from src.utils.errors import ConfigError, DomainError
from tests.helpers import log_uniform_e

RS = Procedure.ROBERTS_SHIRYAEV
MUSUC = Procedure.MUSUC


def alarms(e_values, c, procedure=RS, **kwargs):
    return run_on_e_values(e_values, DetectorConfig(c, procedure, **kwargs)).alarm_times


class TestDetectorConfig:
    @pytest.mark.parametrize("c", [1.0, 0.5, -3.0, math.inf, math.nan])
    def test_threshold_must_exceed_one(self, c):
        with pytest.raises(ConfigError):
            DetectorConfig(c)

    def test_procedure_from_string(self):
        assert DetectorConfig(2.0, "musuc").procedure is MUSUC

    def test_unknown_procedure(self):
        with pytest.raises(ConfigError):
            DetectorConfig(2.0, "cusum")

    def test_rejects_negative_floor(self):
        with pytest.raises(ConfigError):
            DetectorConfig(2.0, e_floor=-1.0)


class TestRobertsShiryaev:
    def test_single_large_e_alarms(self):
        state, alarm = rs_step(DetectorState(), 3.0, DetectorConfig(2.0))
        assert alarm
        assert state == DetectorState()

    def test_constant_e_alarms_every_c_steps(self):
        assert alarms([1.0] * 10, 3) == [3, 6, 9]

    def test_geometric_series_never_reaches_two(self):
        assert alarms([0.5] * 500, 2) == []

    def test_sum_is_nondecreasing_within_run(self, rng):
        config = DetectorConfig(50.0)
        state = DetectorState()
        for e in rng.uniform(0.0, 2.0, size=200):
            previous = state.sum_stat
            state, alarm = rs_step(state, e, config)
            assert alarm or state.sum_stat >= previous

    def test_zero_e_keeps_accumulated_sum(self):
        config = DetectorConfig(3.0)
        state, _ = rs_step(DetectorState(), 2.0, config)
        state, alarm = rs_step(state, 0.0, config)
        assert not alarm and state.sum_stat == 2.0 and state.product == 0.0
        assert state.log_product == -math.inf
        state, alarm = rs_step(state, 1e9, config)
        assert not alarm

    def test_huge_e_alarms_and_resets(self):
        detector = Detector(DetectorConfig(2.0))
        assert detector.update(1e300)
        assert detector.state == DetectorState()
        assert not detector.update(1.0)
        assert detector.update(1.0)
        assert detector.alarm_times == [1, 3]

    def test_rejects_musuc_config(self):
        with pytest.raises(ConfigError):
            rs_step(DetectorState(), 1.0, DetectorConfig(2.0, MUSUC))

    @pytest.mark.parametrize("e", [-0.1, math.inf, math.nan])
    def test_rejects_invalid_e(self, e):
        with pytest.raises(DomainError):
            rs_step(DetectorState(), e, DetectorConfig(2.0))


class TestMusuc:
    def test_constant_one_never_alarms(self):
        assert alarms([1.0] * 100, 1.5, MUSUC) == []

    def test_product_threshold(self):
        assert alarms([2.0, 2.0], 4, MUSUC) == [2]

    def test_zero_blocks_rest_of_run(self):
        assert alarms([0.0, 1e6, 1e6], 2, MUSUC) == []

    def test_floor_lifts_zero(self):
        assert alarms([0.0, 1e6, 1e6], 2, MUSUC, e_floor=1e-3) == [2, 3]

    def test_rejects_rs_config(self):
        with pytest.raises(ConfigError):
            musuc_step(DetectorState(), 1.0, DetectorConfig(2.0))

    def test_log_product_tracks_long_runs(self):
        detector = Detector(DetectorConfig(2.0, MUSUC))
        for _ in range(2000):
            detector.update(1e-200)
        assert detector.state.log_product == pytest.approx(2000 * math.log(1e-200))
        assert detector.state.product == 0.0
        assert detector.alarm_times == []


class TestAgainstBruteForce:
    def test_incremental_rules_match_literal_definitions(self, rng):
        for _ in range(1000):
            e = log_uniform_e(rng, int(rng.integers(1, 201)))
            if rng.random() < 0.2:
                e[int(rng.integers(0, len(e)))] = 0.0
            c = float(rng.uniform(1.0001, 50.0))
            assert alarms(e, c, RS) == brute_force_rs(e, c).alarm_times
            assert alarms(e, c, MUSUC) == brute_force_musuc(e, c).alarm_times

    def test_rs_sum_is_exact_when_it_lands_on_the_threshold(self):
        e = [0.1] + [1.0] * 59
        assert brute_force_rs(e, 5.0).alarm_times == [50, 55, 60]
        assert alarms(e, 5.0, RS) == [50, 55, 60]

    def test_rs_sum_resolves_half_ulp_terms(self):
        c = 1.0 + 2.0 ** -52
        e = [1.0, 2.0 ** -53, 1.0]
        assert alarms(e, c, RS) == brute_force_rs(e, c).alarm_times == [3]

    def test_incremental_rs_matches_on_short_decimal_grids(self, rng):
        for _ in range(300):
            e = [float(x) for x in rng.choice([0.1, 0.2, 0.3, 0.5, 1.0, 1.1], size=int(rng.integers(1, 120)))]
            c = float(rng.integers(2, 12))
            assert alarms(e, c, RS) == brute_force_rs(e, c).alarm_times

    def test_rs_alarms_no_later_than_musuc(self, rng):
        for _ in range(500):
            e = log_uniform_e(rng, int(rng.integers(1, 201)), 1e-2, 1e2)
            c = float(rng.uniform(1.5, 50.0))
            rs, mu = alarms(e, c, RS), alarms(e, c, MUSUC)
            assert len(rs) >= len(mu)
            assert all(sigma <= sigma_prime for sigma, sigma_prime in zip(rs, mu))


class TestReset:
    @given(
        st.lists(st.floats(min_value=0.0, max_value=100.0), min_size=1, max_size=80),
        st.floats(min_value=1.01, max_value=30.0),
        st.sampled_from([RS, MUSUC]),
    )
    @settings(max_examples=300, deadline=None)
    def test_restart_after_alarm_reproduces_later_alarms(self, e, c, procedure):
        times = alarms(e, c, procedure)
        for sigma in times:
            suffix = alarms(e[sigma:], c, procedure)
            assert [t + sigma for t in suffix] == [t for t in times if t > sigma]


class TestThresholdMonotonicity:
    def test_musuc_kth_alarm_is_nondecreasing_in_c(self, rng):
        for _ in range(500):
            e = log_uniform_e(rng, 150, 1e-2, 1e2)
            c1, c2 = sorted(rng.uniform(1.1, 40.0, size=2))
            low, high = alarms(e, c1, MUSUC), alarms(e, c2, MUSUC)
            assert len(low) >= len(high)
            assert all(a <= b for a, b in zip(low, high))

    def test_first_rs_alarm_is_nondecreasing_in_c(self, rng):
        for _ in range(500):
            e = log_uniform_e(rng, 150, 1e-2, 1e2)
            c1, c2 = sorted(rng.uniform(1.1, 40.0, size=2))
            low, high = alarms(e, c1, RS), alarms(e, c2, RS)
            if high:
                assert low and low[0] <= high[0]

    def test_later_rs_alarms_can_come_earlier_under_higher_c(self):
        e = [18.0, 0.125, 20.0]
        assert alarms(e, 18.0, RS) == [1]
        assert alarms(e, 20.0, RS) == [2, 3]


class TestRunDetector:
    def test_constant_predictor_rs(self):
        log = run_detector(ConstantScore(), np.zeros((20, 1)), DetectorConfig(5.0))
        assert log.alarm_times == [5, 10, 15, 20]
        assert log.count_up_to(20) == 4
        assert alarm_frequency(log) == 0.2

    def test_constant_predictor_musuc(self, rng):
        log = run_detector(ConstantScore(), rng.normal(size=(300, 2)), DetectorConfig(1.01, MUSUC))
        assert log.alarm_times == [] and log.horizon == 300

    def test_constant_law_frequency_at_bound(self):
        log = run_detector(ConstantScore(), np.zeros((1000, 1)), DetectorConfig(5.0))
        assert alarm_frequency(log) == 0.2

    @given(st.integers(min_value=2, max_value=12), st.integers(min_value=1, max_value=200))
    @settings(max_examples=100, deadline=None)
    def test_constant_law(self, c, n):
        log = run_detector(ConstantScore(), np.zeros((n, 1)), DetectorConfig(float(c)))
        assert log.alarm_times == list(range(c, n + 1, c))
        assert alarm_frequency(log) == (n // c) / n <= 1 / c

    def test_on_alarm_fires_online(self, rng):
        points = np.vstack([rng.normal(size=(100, 1)), rng.normal(10.0, 1.0, size=(50, 1))])
        seen = []
        log = run_detector(KNNScore(), points, DetectorConfig(20.0), on_alarm=lambda k, sigma: seen.append((k, sigma)))
        assert seen == list(enumerate(log.alarm_times, 1))

    def test_count_up_to_matches_definition(self, rng):
        log = run_detector(KNNScore(), rng.normal(size=(200, 1)), DetectorConfig(2.0))
        for n in range(log.horizon + 1):
            assert log.count_up_to(n) == max([k for k, s in enumerate(log.alarm_times, 1) if s <= n], default=0)


class TestAlarmLog:
    def test_rejects_unsorted_times(self):
        with pytest.raises(DomainError):
            AlarmLog([3, 2], 5)

    def test_rejects_times_beyond_horizon(self):
        with pytest.raises(DomainError):
            AlarmLog([6], 5)

    def test_frequency(self):
        assert alarm_frequency(AlarmLog([5, 10, 15, 20], 20)) == 0.2
        assert alarm_frequency(AlarmLog([], 100)) == 0.0

    def test_frequency_needs_horizon(self):
        with pytest.raises(DomainError):
            alarm_frequency(AlarmLog([], 0))

    def test_json_lines(self):
        buffer = io.StringIO()
        AlarmLog([5, 10], 20).write_jsonl(buffer)
        records = [json.loads(line) for line in buffer.getvalue().splitlines()]
        assert records == [{"k": 1, "sigma": 5}, {"k": 2, "sigma": 10}, {"n": 20, "A_n": 2, "freq": 0.1}]

    def test_records(self):
        assert alarm_record(3, 17) == {"k": 3, "sigma": 17}
        assert summary_record(0, 0) == {"n": 0, "A_n": 0, "freq": 0.0}
