"""Tests for A3 handover evaluation."""

import numpy as np
import pytest

from backend.simulation.handover_engine import (
    CAUSE_A3,
    CAUSE_MLB,
    A3Timer,
    HandoverEvent,
    HandoverParams,
    HysteresisTable,
    a3_condition,
    execute_handover,
    execute_handovers,
    update_a3,
    update_a3_all,
)
from backend.simulation.mobility import UeState
from backend.simulation.radio_model import Measurement

DT = 0.01


def _ue(serving: int = 0, ue_id: int = 0) -> UeState:
    return UeState(ue_id=ue_id, position=(0.0, 0.0), heading=0.0, speed=16.6667, serving_sector=serving)


def _measurement(rsrp, t: float = 0.0) -> Measurement:
    return Measurement(ue_id=0, rsrp=np.array(rsrp, dtype=float), serving_sinr=0.0, timestamp=t)


def _run_ticks(ticks, rsrp, table, params, timer, serving=0):
    """Feed the same measurement for `ticks` ticks; return the events."""
    events = []
    for k in range(ticks):
        event = update_a3(_ue(serving), _measurement(rsrp, (k + 1) * DT), table, params, DT, timer)
        if event is not None:
            events.append((k + 1, event))
    return events


class TestA3Condition:
    """Test the A3 entering condition."""

    def test_margin_above_hysteresis(self):
        assert a3_condition(-80.0, -76.0, 3.0)

    def test_strict_at_zero(self):
        assert not a3_condition(-80.0, -80.0, 0.0)

    def test_lower_hysteresis_enables(self):
        assert a3_condition(-80.0, -78.0, 0.0)
        assert not a3_condition(-80.0, -78.0, 3.0)

    def test_monotone_in_hysteresis(self, rng):
        serving = rng.uniform(-110, -60, 2000)
        neighbor = rng.uniform(-110, -60, 2000)
        h_low = rng.uniform(0, 3, 2000)
        h_high = h_low + rng.uniform(0, 3, 2000)
        assert np.all(a3_condition(serving, neighbor, h_low) | ~a3_condition(serving, neighbor, h_high))


class TestHysteresisTable:
    """Test the shared per-sector hysteresis table."""

    def test_defaults(self, hysteresis_table):
        assert hysteresis_table.get(0, 4) == 3.0
        assert all(hysteresis_table.is_default(s) for s in range(9))

    def test_set_reports_change(self, hysteresis_table):
        assert hysteresis_table.set(0, 4, 1.5, raw=1.47)
        assert not hysteresis_table.set(0, 4, 1.5)
        assert hysteresis_table.get(0, 4) == 1.5
        assert not hysteresis_table.is_default(0)
        assert hysteresis_table.is_default(4)

    def test_raw_kept(self, hysteresis_table):
        hysteresis_table.set(2, 1, 1.0, raw=0.99)
        assert hysteresis_table.raw[2, 1] == pytest.approx(0.99)

    @pytest.mark.parametrize("value", [-0.5, 3.5])
    def test_out_of_range_rejected(self, hysteresis_table, value):
        with pytest.raises(ValueError):
            hysteresis_table.set(0, 1, value)

    def test_self_entry_rejected(self, hysteresis_table):
        with pytest.raises(ValueError):
            hysteresis_table.set(3, 3, 1.0)


class TestUpdateA3:
    """Test time-to-trigger handling for one UE."""

    RSRP = [-90.0, -85.0, -100.0]  # neighbor 1 exceeds serving 0 by 5 dB

    def test_fires_after_ttt(self, handover_params):
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        events = _run_ticks(26, self.RSRP, table, handover_params, timer)
        assert len(events) == 1
        tick, event = events[0]
        assert tick == 26
        assert (event.source, event.target, event.cause) == (0, 1, CAUSE_A3)
        assert event.timestamp == pytest.approx(0.26)
        assert event.effective_hysteresis_used == 3.0

    def test_not_before_ttt(self, handover_params):
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        assert _run_ticks(25, self.RSRP, table, handover_params, timer) == []
        assert timer.elapsed[0, 1] == pytest.approx(0.25)

    def test_dropout_resets(self, handover_params):
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        assert _run_ticks(25, self.RSRP, table, handover_params, timer) == []
        assert update_a3(_ue(), _measurement([-90.0, -89.0, -100.0]), table, handover_params, DT, timer) is None
        assert timer.elapsed[0, 1] == 0.0
        assert _run_ticks(25, self.RSRP, table, handover_params, timer) == []
        assert len(_run_ticks(1, self.RSRP, table, handover_params, timer)) == 1

    def test_zero_ttt_fires_immediately(self):
        params = HandoverParams(ttt=0.0)
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        assert update_a3(_ue(), _measurement(self.RSRP), table, params, DT, timer) is not None

    def test_accumulator_capped_and_reset_after_handover(self, handover_params):
        """Test that timers never exceed TTT and the serving row is cleared."""
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        _run_ticks(26, self.RSRP, table, handover_params, timer)
        assert np.all(timer.elapsed[0] == 0.0)
        assert np.all(timer.elapsed <= handover_params.ttt)

    def test_strongest_matured_neighbor_wins(self, handover_params):
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        events = _run_ticks(26, [-90.0, -85.0, -80.0], table, handover_params, timer)
        assert events[0][1].target == 2

    def test_rsrp_tie_goes_to_lowest_id(self, handover_params):
        """Test that equal RSRP targets resolve to the lowest sector id."""
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        events = _run_ticks(26, [-90.0, -80.0, -80.0], table, handover_params, timer)
        assert events[0][1].target == 1

    def test_lowered_hysteresis_is_mlb_induced(self, handover_params):
        """Test that a handover enabled only by lowered hysteresis is tagged as MLB."""
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        table.set(0, 1, 1.0)
        events = _run_ticks(26, [-90.0, -88.0, -100.0], table, handover_params, timer)
        assert events[0][1].cause == CAUSE_MLB
        assert events[0][1].effective_hysteresis_used == 1.0

    def test_uses_serving_row_of_table(self, handover_params):
        """Test that only the serving sector's hysteresis row applies."""
        table, timer = HysteresisTable(3, 3.0), A3Timer(1, 3)
        table.set(2, 1, 0.0)  # another sector's row
        assert _run_ticks(40, [-90.0, -88.0, -100.0], table, handover_params, timer) == []

    def test_incomplete_measurement_rejected(self, handover_params):
        with pytest.raises(ValueError):
            update_a3(_ue(), _measurement([-90.0, -85.0]), HysteresisTable(3, 3.0), handover_params, DT, A3Timer(1, 3))

    def test_non_positive_dt_rejected(self, handover_params):
        with pytest.raises(ValueError):
            update_a3(_ue(), _measurement(self.RSRP), HysteresisTable(3, 3.0), handover_params, 0.0, A3Timer(1, 3))


class TestUpdateA3All:
    """Test the batch A3 evaluation."""

    def test_matches_single_ue_path(self, handover_params, rng):
        """Test that batch evaluation matches per-UE evaluation on a random walk."""
        num_ues, num_sectors, ticks = 30, 4, 200
        table = HysteresisTable(num_sectors, 3.0)
        table.set(0, 1, 1.5)
        table.set(2, 3, 0.0)
        batch_timer, single_timer = A3Timer(num_ues, num_sectors), A3Timer(num_ues, num_sectors)
        batch_serving = rng.integers(0, num_sectors, num_ues)
        single_serving = batch_serving.copy()
        walk = rng.uniform(-100, -80, (num_ues, num_sectors))

        for k in range(ticks):
            walk += rng.normal(0, 1.0, walk.shape)
            t = (k + 1) * DT
            batch = update_a3_all(walk, batch_serving, table, handover_params, DT, batch_timer, t)
            single = []
            for u in range(num_ues):
                event = update_a3(
                    _ue(int(single_serving[u]), u),
                    _measurement(walk[u], t),
                    table,
                    handover_params,
                    DT,
                    single_timer,
                )
                if event is not None:
                    single.append(event)
            assert batch == single
            execute_handovers(batch, batch_serving, num_sectors)
            execute_handovers(single, single_serving, num_sectors)

    def test_ttt_property_on_fuzzed_traces(self, handover_params):
        """1000 random traces: every event needs 26 ticks of continuous condition, and
        every neighbor reaching 26 ticks triggers an event."""
        rng = np.random.default_rng(2024)
        num_ues, num_sectors, ticks = 1000, 3, 300
        required = 26  # ticks of 10 ms covering 256 ms
        table = HysteresisTable(num_sectors, 3.0)
        timer = A3Timer(num_ues, num_sectors)
        serving = np.zeros(num_ues, dtype=int)
        streak = np.zeros((num_ues, num_sectors), dtype=int)
        rsrp = rng.uniform(-95, -85, (num_ues, num_sectors))
        violations = 0

        for k in range(ticks):
            rsrp += rng.normal(0, 1.5, rsrp.shape)
            dropout = rng.random(rsrp.shape) < 0.02
            rsrp_tick = np.where(dropout, rsrp - 30.0, rsrp)

            rows = np.arange(num_ues)
            holds = rsrp_tick - rsrp_tick[rows, serving][:, None] > 3.0
            holds[rows, serving] = False
            streak = np.where(holds, streak + 1, 0)

            events = update_a3_all(rsrp_tick, serving, table, handover_params, DT, timer, (k + 1) * DT)
            fired = {e.ue_id: e for e in events}
            expected = np.flatnonzero((streak >= required).any(axis=1))
            if set(fired) != set(expected.tolist()):
                violations += 1
            for ue_id, event in fired.items():
                if streak[ue_id, event.target] < required:
                    violations += 1
                candidates = np.where(streak[ue_id] >= required, rsrp_tick[ue_id], -np.inf)
                if event.target != int(np.argmax(candidates)):
                    violations += 1
                streak[ue_id] = 0

            execute_handovers(events, serving, num_sectors)

        assert violations == 0


class TestExecuteHandover:
    """Test handover execution."""

    def _event(self, ue_id=0, source=2, target=5):
        return HandoverEvent(ue_id, source, target, 1.0, CAUSE_A3, 3.0)

    def test_updates_serving(self):
        serving = np.array([2, 2])
        assert execute_handover(self._event(), serving, 9)
        assert serving[0] == 5

    def test_two_in_one_tick(self):
        """Test that several UEs can hand over in the same tick."""
        serving = np.array([2, 2, 7])
        executed = execute_handovers([self._event(1), self._event(0)], serving, 9)
        assert [e.ue_id for e in executed] == [0, 1]
        assert list(serving) == [5, 5, 7]

    def test_already_on_target_ignored(self):
        serving = np.array([5])
        assert not execute_handover(self._event(), serving, 9)
        assert execute_handovers([self._event()], serving, 9) == []

    def test_unknown_target_rejected(self):
        with pytest.raises(ValueError):
            execute_handover(self._event(target=12), np.array([2]), 9)

    def test_source_equals_target_rejected(self):
        with pytest.raises(ValueError):
            HandoverEvent(0, 3, 3, 0.0, CAUSE_A3, 3.0)
